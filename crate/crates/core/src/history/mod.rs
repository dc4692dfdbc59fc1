//! Normalized model of a linear commit history.
//!
//! Both ingestion routes (a Git repository or a JSON fixture) end in the same
//! place: every file change is rebuilt from its full before/after texts with
//! [`text::diff_lines`], so the two sources produce identical hunks for the
//! same edits.

mod fixture;
mod git;
pub mod text;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::deps::ChangeElement;
use crate::error::{Error, Result};

pub use fixture::{load_fixture_history, parse_fixture, Fixture, FixtureBuilder, FixtureCommit, FixtureFile};
pub use git::load_git_history;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CommitId(String);

impl CommitId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidHistory("empty commit id".into()));
        }
        Ok(CommitId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// First seven characters, the usual abbreviated form for hashes.
    pub fn short(&self) -> &str {
        match self.0.char_indices().nth(7) {
            Some((i, _)) => &self.0[..i],
            None => &self.0,
        }
    }
}

impl fmt::Display for CommitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Repository-relative, `/`-separated path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FilePath(String);

impl FilePath {
    pub fn new(path: impl Into<String>) -> Result<Self> {
        let path = path.into();
        let valid = !path.is_empty()
            && !path.starts_with('/')
            && path
                .split('/')
                .all(|seg| !seg.is_empty() && seg != "." && seg != "..");
        if valid {
            Ok(FilePath(path))
        } else {
            Err(Error::InvalidPath(path))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for FilePath {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        FilePath::new(value)
    }
}

impl From<FilePath> for String {
    fn from(value: FilePath) -> Self {
        value.0
    }
}

impl fmt::Display for FilePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChangeKind {
    Added,
    Modified,
    Deleted,
    Renamed,
}

/// One contiguous changed region of a file.
///
/// `old_start` is the 1-based index of the first replaced line in the
/// pre-image; for a pure insertion it is the line the new text is inserted
/// before (so it may be one past the end). `new_start` follows the same rule
/// in the post-image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub old_start: usize,
    pub old_len: usize,
    pub new_start: usize,
    pub new_len: usize,
    pub old_lines: Vec<String>,
    pub new_lines: Vec<String>,
}

impl Hunk {
    /// Last pre-image line covered, or `old_start - 1` for insertions.
    pub fn old_end(&self) -> usize {
        self.old_start + self.old_len - 1
    }

    pub fn new_end(&self) -> usize {
        self.new_start + self.new_len - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileChange {
    pub path: FilePath,
    pub kind: ChangeKind,
    pub old_path: Option<FilePath>,
    pub hunks: Vec<Hunk>,
    pub before_text: Option<String>,
    pub after_text: Option<String>,
    /// Binary content never becomes a change element; it only travels with
    /// its commit.
    pub binary: bool,
}

impl FileChange {
    /// Builds a text change, deriving hunks from the two full texts.
    ///
    /// Returns `None` when nothing changed (same path, same text).
    pub fn from_texts(
        path: FilePath,
        old_path: Option<FilePath>,
        before: Option<String>,
        after: Option<String>,
    ) -> Option<FileChange> {
        let before = before.map(|t| text::normalize(&t));
        let after = after.map(|t| text::normalize(&t));
        let kind = match (&before, &after) {
            (None, None) => return None,
            (None, Some(_)) => ChangeKind::Added,
            (Some(_), None) => ChangeKind::Deleted,
            (Some(b), Some(a)) => {
                if old_path.as_ref().is_some_and(|p| *p != path) {
                    ChangeKind::Renamed
                } else if a == b {
                    return None;
                } else {
                    ChangeKind::Modified
                }
            }
        };
        let hunks = text::diff_lines(
            before.as_deref().unwrap_or(""),
            after.as_deref().unwrap_or(""),
        );
        let old_path = if kind == ChangeKind::Renamed { old_path } else { None };
        Some(FileChange {
            path,
            kind,
            old_path,
            hunks,
            before_text: before,
            after_text: after,
            binary: false,
        })
    }

    pub fn binary(path: FilePath, kind: ChangeKind, old_path: Option<FilePath>) -> FileChange {
        FileChange {
            path,
            kind,
            old_path,
            hunks: Vec::new(),
            before_text: None,
            after_text: None,
            binary: true,
        }
    }

    /// The path this file had before the change.
    pub fn source_path(&self) -> &FilePath {
        self.old_path.as_ref().unwrap_or(&self.path)
    }

    pub fn before_lines(&self) -> Vec<&str> {
        text::lines(self.before_text.as_deref().unwrap_or(""))
    }

    pub fn after_lines(&self) -> Vec<&str> {
        text::lines(self.after_text.as_deref().unwrap_or(""))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commit {
    pub id: CommitId,
    pub parent: Option<CommitId>,
    pub message: String,
    /// Seconds since the epoch, UTC.
    pub timestamp: i64,
    pub file_changes: Vec<FileChange>,
}

impl Commit {
    pub fn file(&self, path: &FilePath) -> Option<&FileChange> {
        self.file_changes.iter().find(|fc| &fc.path == path)
    }

    /// Text file changes, the ones that form change elements.
    pub fn text_changes(&self) -> impl Iterator<Item = &FileChange> {
        self.file_changes.iter().filter(|fc| !fc.binary)
    }

    pub fn subject(&self) -> &str {
        self.message.lines().next().unwrap_or("")
    }
}

/// A linear range of commits, oldest first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct History {
    commits: Vec<Commit>,
    index: BTreeMap<CommitId, usize>,
}

impl History {
    /// Validates and normalizes a commit list.
    ///
    /// Commits without file changes are dropped and the parent link of the
    /// next kept commit is pointed at the previous kept one. File changes are
    /// sorted by path.
    pub fn new(commits: Vec<Commit>) -> Result<History> {
        let mut kept: Vec<Commit> = Vec::with_capacity(commits.len());
        let mut seen = HashSet::new();
        for mut commit in commits {
            if !seen.insert(commit.id.clone()) {
                return Err(Error::InvalidHistory(format!("duplicate commit id {}", commit.id)));
            }
            if commit.file_changes.is_empty() {
                continue;
            }
            commit.file_changes.sort_by(|a, b| a.path.cmp(&b.path));
            if let Some(dup) = commit
                .file_changes
                .windows(2)
                .find(|w| w[0].path == w[1].path)
            {
                return Err(Error::InvalidHistory(format!(
                    "commit {} changes {} twice",
                    commit.id, dup[0].path
                )));
            }
            if let Some(prev) = kept.last() {
                commit.parent = Some(prev.id.clone());
            }
            kept.push(commit);
        }
        let index = kept
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.clone(), i))
            .collect();
        Ok(History { commits: kept, index })
    }

    pub fn commits(&self) -> &[Commit] {
        &self.commits
    }

    pub fn len(&self) -> usize {
        self.commits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commits.is_empty()
    }

    pub fn first(&self) -> Option<&CommitId> {
        self.commits.first().map(|c| &c.id)
    }

    pub fn last(&self) -> Option<&CommitId> {
        self.commits.last().map(|c| &c.id)
    }

    pub fn position(&self, id: &CommitId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn commit(&self, id: &CommitId) -> Option<&Commit> {
        self.position(id).map(|i| &self.commits[i])
    }

    /// Text contents, before the first commit, of every file the range
    /// touches that already existed.
    pub fn base_snapshot(&self) -> BTreeMap<FilePath, String> {
        let mut base = BTreeMap::new();
        // paths whose pre-range state is already decided (seen or created)
        let mut decided = HashSet::new();
        for commit in &self.commits {
            for fc in commit.text_changes() {
                let src = fc.source_path().clone();
                if decided.insert(src.clone()) {
                    if let Some(before) = &fc.before_text {
                        base.insert(src, before.clone());
                    }
                }
                decided.insert(fc.path.clone());
            }
        }
        base
    }

    /// Text contents of all files the range touched, after the whole range.
    pub fn final_snapshot(&self) -> BTreeMap<FilePath, String> {
        let mut snap = self.base_snapshot();
        for commit in &self.commits {
            for fc in commit.text_changes() {
                if fc.kind == ChangeKind::Renamed {
                    snap.remove(fc.source_path());
                }
                match &fc.after_text {
                    Some(t) => snap.insert(fc.path.clone(), t.clone()),
                    None => snap.remove(&fc.path),
                };
            }
        }
        snap
    }
}

/// One element per (commit, changed text file), in history order.
pub fn change_elements(h: &History) -> Vec<ChangeElement> {
    h.commits()
        .iter()
        .flat_map(|c| {
            c.text_changes().map(move |fc| ChangeElement {
                commit: c.id.clone(),
                file: fc.path.clone(),
            })
        })
        .collect()
}
