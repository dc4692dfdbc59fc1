//! Self-contained JSON histories.
//!
//! ```json
//! { "commits": [ { "id": "c1", "message": "...", "timestamp": 0,
//!     "files": [ { "path": "A.java", "before": null, "after": "class A {}\n" } ] } ] }
//! ```
//!
//! `before: null` marks an added file and `after: null` a deleted one. The
//! `before` text of a file must equal its state left by the previous commit
//! that touched it; the first appearance of a path defines its pre-range state.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Commit, CommitId, FileChange, FilePath, History};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub commits: Vec<FixtureCommit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureCommit {
    pub id: String,
    #[serde(default)]
    pub message: String,
    #[serde(default)]
    pub timestamp: i64,
    pub files: Vec<FixtureFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub path: String,
    pub before: Option<String>,
    pub after: Option<String>,
}

pub fn load_fixture_history(path: impl AsRef<Path>) -> Result<History> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::MalformedFixture(format!("{}: {e}", path.display())))?;
    parse_fixture(&text)?.to_history()
}

pub fn parse_fixture(json: &str) -> Result<Fixture> {
    serde_json::from_str(json).map_err(|e| {
        Error::MalformedFixture(format!("line {}, column {}: {e}", e.line(), e.column()))
    })
}

impl Fixture {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("fixture serializes");
        out.push('\n');
        out
    }

    pub fn to_history(&self) -> Result<History> {
        let malformed = |ci: usize, field: &str, msg: String| {
            Error::MalformedFixture(format!("commits[{ci}].{field}: {msg}"))
        };
        let mut state: BTreeMap<FilePath, Option<String>> = BTreeMap::new();
        let mut commits = Vec::with_capacity(self.commits.len());
        let mut ids = std::collections::HashSet::new();
        for (ci, fc) in self.commits.iter().enumerate() {
            let id = CommitId::new(fc.id.clone()).map_err(|e| malformed(ci, "id", e.to_string()))?;
            if !ids.insert(id.clone()) {
                return Err(malformed(ci, "id", format!("duplicate commit id {id}")));
            }
            let mut changes = Vec::new();
            let mut paths = std::collections::HashSet::new();
            for (fi, file) in fc.files.iter().enumerate() {
                let field = format!("files[{fi}]");
                let path = FilePath::new(file.path.clone())
                    .map_err(|e| malformed(ci, &format!("{field}.path"), e.to_string()))?;
                if !paths.insert(path.clone()) {
                    return Err(malformed(ci, &field, format!("path {path} listed twice")));
                }
                let before = file.before.as_ref().map(|t| super::text::normalize(t));
                if let Some(known) = state.get(&path) {
                    if *known != before {
                        return Err(malformed(
                            ci,
                            &format!("{field}.before"),
                            format!("does not match the current content of {path}"),
                        ));
                    }
                }
                let after = file.after.as_ref().map(|t| super::text::normalize(t));
                state.insert(path.clone(), after.clone());
                if let Some(change) = FileChange::from_texts(path, None, before, after) {
                    changes.push(change);
                }
            }
            commits.push(Commit {
                id,
                parent: None,
                message: fc.message.clone(),
                timestamp: fc.timestamp,
                file_changes: changes,
            });
        }
        History::new(commits)
    }

    /// Serializes a history back to the fixture form. Binary changes have no
    /// fixture representation and are left out.
    pub fn from_history(h: &History) -> Fixture {
        let commits = h
            .commits()
            .iter()
            .map(|c| FixtureCommit {
                id: c.id.to_string(),
                message: c.message.clone(),
                timestamp: c.timestamp,
                files: c
                    .text_changes()
                    .map(|fc| FixtureFile {
                        path: fc.path.to_string(),
                        before: fc.before_text.clone(),
                        after: fc.after_text.clone(),
                    })
                    .collect(),
            })
            .collect();
        Fixture { commits }
    }
}

/// Builds fixtures by stating only the new content of each file; `before`
/// texts are filled in from the running state.
#[derive(Debug, Default, Clone)]
pub struct FixtureBuilder {
    fixture: Fixture,
    state: BTreeMap<String, Option<String>>,
    clock: i64,
}

impl FixtureBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares the pre-range content of a file.
    pub fn base(&mut self, path: &str, text: &str) -> &mut Self {
        self.state.insert(path.to_owned(), Some(text.to_owned()));
        self
    }

    /// Appends a commit. `None` content deletes the file.
    pub fn commit<'a>(
        &mut self,
        id: &str,
        message: &str,
        files: impl IntoIterator<Item = (&'a str, Option<String>)>,
    ) -> &mut Self {
        self.clock += 60;
        let files = files
            .into_iter()
            .map(|(path, after)| {
                let before = self.state.get(path).cloned().flatten();
                self.state.insert(path.to_owned(), after.clone());
                FixtureFile { path: path.to_owned(), before, after }
            })
            .collect();
        self.fixture.commits.push(FixtureCommit {
            id: id.to_owned(),
            message: message.to_owned(),
            timestamp: 1_500_000_000 + self.clock,
            files,
        });
        self
    }

    /// Current content of a file, as left by the latest commit or base.
    pub fn content(&self, path: &str) -> Option<&str> {
        self.state.get(path).and_then(|t| t.as_deref())
    }

    pub fn fixture(&self) -> Fixture {
        self.fixture.clone()
    }

    pub fn history(&self) -> History {
        self.fixture.to_history().expect("builder fixtures are consistent")
    }
}
