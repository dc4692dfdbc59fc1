use std::path::Path;

use git2::{Delta, DiffFindOptions, DiffOptions, ErrorCode, Oid, Repository};

use super::{ChangeKind, Commit, CommitId, FileChange, FilePath, History};
use crate::error::{Error, Result};

/// Loads the commits in `(from, to]`, oldest first.
///
/// Every commit between the two must have exactly one parent.
pub fn load_git_history(repo_path: impl AsRef<Path>, from: &str, to: &str) -> Result<History> {
    let repo_path = repo_path.as_ref();
    let repo = Repository::open(repo_path).map_err(|e| match e.code() {
        ErrorCode::NotFound => Error::NotARepository(repo_path.to_owned()),
        _ => Error::Git(e),
    })?;
    let resolve = |spec: &str| -> Result<Oid> {
        repo.revparse_single(spec)
            .and_then(|o| o.peel_to_commit())
            .map(|c| c.id())
            .map_err(|_| Error::UnknownCommit(spec.to_owned()))
    };
    let from_oid = resolve(from)?;
    let to_oid = resolve(to)?;
    if from_oid == to_oid {
        return Err(Error::EmptyRange(from.to_owned()));
    }

    let mut chain = Vec::new();
    let mut cursor = repo.find_commit(to_oid)?;
    while cursor.id() != from_oid {
        match cursor.parent_count() {
            0 => {
                return Err(Error::NotAncestor { from: from.to_owned(), to: to.to_owned() });
            }
            1 => {}
            _ => return Err(Error::NotLinearHistory(cursor.id().to_string())),
        }
        let parent = cursor.parent(0)?;
        chain.push(cursor);
        cursor = parent;
    }
    chain.reverse();

    let mut commits = Vec::with_capacity(chain.len());
    for commit in &chain {
        let parent = commit.parent(0)?;
        let mut opts = DiffOptions::new();
        opts.ignore_submodules(true);
        let mut diff =
            repo.diff_tree_to_tree(Some(&parent.tree()?), Some(&commit.tree()?), Some(&mut opts))?;
        diff.find_similar(Some(DiffFindOptions::new().renames(true)))?;

        let mut changes = Vec::new();
        for delta in diff.deltas() {
            let status = delta.status();
            let (old, new) = (delta.old_file(), delta.new_file());
            let path_of = |f: &git2::DiffFile<'_>| -> Result<FilePath> {
                let p = f.path().ok_or_else(|| Error::InvalidPath("<non-utf8>".into()))?;
                FilePath::new(p.to_string_lossy().replace('\\', "/"))
            };
            let (kind, path, old_path) = match status {
                Delta::Added | Delta::Copied => (ChangeKind::Added, path_of(&new)?, None),
                Delta::Deleted => (ChangeKind::Deleted, path_of(&old)?, None),
                Delta::Modified | Delta::Typechange => (ChangeKind::Modified, path_of(&new)?, None),
                Delta::Renamed => (ChangeKind::Renamed, path_of(&new)?, Some(path_of(&old)?)),
                _ => continue,
            };
            let blob_text = |oid: Oid, present: bool| -> Result<Option<Option<String>>> {
                if !present {
                    return Ok(Some(None));
                }
                let blob = repo.find_blob(oid)?;
                if blob.is_binary() {
                    return Ok(None);
                }
                Ok(std::str::from_utf8(blob.content()).ok().map(|s| Some(s.to_owned())))
            };
            let before = blob_text(old.id(), kind != ChangeKind::Added)?;
            let after = blob_text(new.id(), kind != ChangeKind::Deleted)?;
            match (before, after) {
                (Some(before), Some(after)) => {
                    if let Some(fc) = FileChange::from_texts(path, old_path, before, after) {
                        changes.push(fc);
                    }
                }
                _ => changes.push(FileChange::binary(path, kind, old_path)),
            }
        }
        commits.push(Commit {
            id: CommitId::new(commit.id().to_string())?,
            parent: Some(CommitId::new(parent.id().to_string())?),
            message: commit.message().unwrap_or("").trim_end().to_owned(),
            timestamp: commit.time().seconds(),
            file_changes: changes,
        });
    }
    History::new(commits)
}
