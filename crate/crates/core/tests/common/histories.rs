//! Random line-level file histories whose generator records, for every
//! line, the change that last wrote it.

use std::collections::{BTreeMap, BTreeSet};

use histslice::history::FixtureBuilder;
use histslice::{ChangeElement, CommitId, FilePath, History};
use rand::Rng;

const FILES: usize = 3;
const MAX_LINES: usize = 200;

/// Last writer of each line: `None` for lines from before the range.
type Owned = Vec<(String, Option<ChangeElement>)>;

pub struct TextualCase {
    pub history: History,
    /// Edges `(newer, older)` found by the replay.
    pub expected: BTreeSet<(ChangeElement, ChangeElement)>,
}

fn text(lines: &Owned) -> String {
    lines.iter().map(|(l, _)| format!("{l}\n")).collect()
}

/// Every written line is globally unique, so the line diff of two
/// snapshots aligns exactly the lines the generator kept.
pub fn random_textual_history(rng: &mut impl Rng, max_commits: usize) -> TextualCase {
    generate(rng, max_commits, true)
}

/// Like [`random_textual_history`], but every removal writes at least one
/// line in its place and no file is deleted, so no change goes unowned.
pub fn random_writing_history(rng: &mut impl Rng, max_commits: usize) -> TextualCase {
    generate(rng, max_commits, false)
}

fn generate(rng: &mut impl Rng, max_commits: usize, pure_deletions: bool) -> TextualCase {
    let mut fresh = 0usize;
    let mut next_line = |tag: &str| {
        fresh += 1;
        format!("{tag}{fresh}")
    };
    let mut state: BTreeMap<String, Option<Owned>> = BTreeMap::new();
    let mut b = FixtureBuilder::new();
    for f in 0..FILES {
        let path = format!("f{f}.txt");
        if rng.gen_bool(0.8) {
            let lines: Owned = (0..rng.gen_range(0..40)).map(|_| (next_line("b"), None)).collect();
            b.base(&path, &text(&lines));
            state.insert(path, Some(lines));
        } else {
            state.insert(path, None);
        }
    }

    let mut expected = BTreeSet::new();
    let mut made = 0;
    for c in 0..max_commits {
        let id = format!("c{c:02}");
        let commit = CommitId::new(id.clone()).unwrap();
        let n_files = rng.gen_range(1..=2);
        let mut paths: Vec<String> = state.keys().cloned().collect();
        let mut files = Vec::new();
        for _ in 0..n_files {
            let path = paths.swap_remove(rng.gen_range(0..paths.len()));
            let me = ChangeElement { commit: commit.clone(), file: FilePath::new(path.clone()).unwrap() };
            let before = state[&path].clone();
            let mut removed: Vec<Option<ChangeElement>> = Vec::new();
            let after: Option<Owned> = match before.clone() {
                None => Some((0..rng.gen_range(1..20)).map(|_| (next_line("a"), Some(me.clone()))).collect()),
                Some(lines) if pure_deletions && rng.gen_bool(0.05) => {
                    removed.extend(lines.into_iter().map(|(_, o)| o));
                    None
                }
                Some(mut lines) => {
                    for _ in 0..rng.gen_range(1..=3) {
                        let at = rng.gen_range(0..=lines.len());
                        let del = rng.gen_range(0..=5).min(lines.len() - at);
                        let room = MAX_LINES.saturating_sub(lines.len() - del);
                        let floor = usize::from(!pure_deletions && del > 0);
                        let ins = rng.gen_range(floor..=5).min(room).max(floor);
                        let new: Owned = (0..ins).map(|_| (next_line("n"), Some(me.clone()))).collect();
                        for (_, o) in lines.splice(at..at + del, new) {
                            if o.as_ref() != Some(&me) {
                                removed.push(o);
                            }
                        }
                    }
                    Some(lines)
                }
            };
            let unchanged = match (&before, &after) {
                (Some(x), Some(y)) => text(x) == text(y),
                _ => false,
            };
            if unchanged {
                continue;
            }
            for o in removed.into_iter().flatten() {
                expected.insert((me.clone(), o));
            }
            files.push((path.clone(), after.as_ref().map(text)));
            state.insert(path, after);
        }
        if files.is_empty() {
            continue;
        }
        made += 1;
        b.commit(&id, &format!("change {made}"), files.iter().map(|(p, t)| (p.as_str(), t.clone())));
    }
    TextualCase { history: b.history(), expected }
}
