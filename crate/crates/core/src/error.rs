use std::path::PathBuf;

use thiserror::Error;

use crate::history::{CommitId, FilePath};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a git repository: {0}")]
    NotARepository(PathBuf),

    #[error("unknown commit: {0}")]
    UnknownCommit(String),

    #[error("commit {from} is not an ancestor of {to}")]
    NotAncestor { from: String, to: String },

    #[error("history is not linear: {0} is a merge commit")]
    NotLinearHistory(String),

    #[error("empty commit range {0}..{0}")]
    EmptyRange(String),

    #[error("malformed fixture: {0}")]
    MalformedFixture(String),

    #[error("invalid path {0:?}")]
    InvalidPath(String),

    #[error("invalid history: {0}")]
    InvalidHistory(String),

    #[error("criterion {0} is not a commit of this history")]
    UnknownCriterion(CommitId),

    #[error("tree diff requested on an unparseable tree")]
    DiffOnUnparseable,

    #[error("patch conflict: {commit}:{file} does not apply ({reason})")]
    PatchConflict {
        commit: CommitId,
        file: FilePath,
        reason: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("report criteria differ: {0}")]
    MismatchedCriteria(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("git: {0}")]
    Git(#[from] git2::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status the command-line front end reports for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::PatchConflict { .. } => 3,
            Error::Invariant(_) => 4,
            _ => 2,
        }
    }
}
