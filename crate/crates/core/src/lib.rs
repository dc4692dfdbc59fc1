//! Systematic-edit-aware history slicing.
//!
//! A history is read from Git or a JSON fixture, every (commit, file) pair
//! becomes a change element, and dependencies among elements are extracted.
//! Commits made of one uniform edit repeated across files are detected and
//! their same-commit coupling dropped, so slices only carry the files that
//! are actually needed.

pub mod analysis;
pub mod deps;
pub mod edit;
mod error;
pub mod history;
pub mod report;
pub mod slicer;
pub mod syntax;
pub mod synthetic;
pub mod systematic;

pub use deps::{build_graph, eliminate, ChangeElement, DepKind, DependencyGraph, Edge};
pub use edit::{summarize_commit, AbstractEditScript, ChangeType, CommitEditSummary, MemberKey, MemberKind};
pub use error::{Error, Result};
pub use history::{load_fixture_history, load_git_history, ChangeKind, Commit, CommitId, FileChange, FilePath, History};
pub use systematic::{classify, detect_all, SystematicVerdict, VerdictKind};
pub use slicer::{materialize, slice, slice_all, HistorySlice, SliceCommit, Slicer};
pub use report::{compare_reports, run, Command, Format, Pipeline, ReductionReport, RunConfig, RunOutput, Source};
