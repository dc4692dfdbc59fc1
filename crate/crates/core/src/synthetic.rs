//! Generated histories with known geometry, for regression tests,
//! benchmarks and demos.

use crate::history::{Fixture, FixtureBuilder};

fn sweep_file(i: usize, limit: i32, limit_final: bool, other: i32) -> String {
    let fin = if limit_final { "final " } else { "" };
    format!(
        "package demo;\n\nclass C{i} {{\n    {fin}int limit{i} = {limit};\n    int spare{i} = 0;\n    int other{i} = {other};\n}}\n"
    )
}

pub const SWEEP_FILES: usize = 20;
pub const OVERLAPPED_FILES: usize = 14;
/// The sweep file the criterion touches; not overlapped by older commits.
pub const CRITERION_FILE: usize = 15;

/// A history in which a 20-file sweep adding `final` follows 14 commits
/// that each edited one of the swept lines, and a last commit edits a line
/// next to the sweep's change in an untouched file.
///
/// Commits: `o01`..`o14`, then `sweep`, then `fix`. Files `src/C1.java`
/// to `src/C20.java`.
pub fn final_sweep_fixture() -> Fixture {
    let path = |i: usize| format!("src/C{i}.java");
    let mut b = FixtureBuilder::new();
    for i in 1..=SWEEP_FILES {
        b.base(&path(i), &sweep_file(i, 10, false, 1));
    }
    for i in 1..=OVERLAPPED_FILES {
        let id = format!("o{i:02}");
        b.commit(&id, &format!("Raise limit in C{i}"), [(path(i).as_str(), Some(sweep_file(i, 11, false, 1)))]);
    }
    let swept: Vec<(String, String)> = (1..=SWEEP_FILES)
        .map(|i| {
            let limit = if i <= OVERLAPPED_FILES { 11 } else { 10 };
            (path(i), sweep_file(i, limit, true, 1))
        })
        .collect();
    b.commit("sweep", "Make limits final", swept.iter().map(|(p, t)| (p.as_str(), Some(t.clone()))));
    let k = CRITERION_FILE;
    b.commit("fix", &format!("Adjust other{k}"), [(path(k).as_str(), Some(sweep_file(k, 10, true, 2)))]);
    b.fixture()
}

/// Shape of [`sweep_history`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepShape {
    pub files: usize,
    pub rounds: usize,
}

/// Lines between the starts of consecutive rounds' field blocks.
const BLOCK: usize = 10;

struct SweepState {
    values: Vec<i32>,
    finals: Vec<bool>,
    pads: Vec<i32>,
}

fn sweep_history_file(i: usize, st: &SweepState) -> String {
    let mut out = format!("package gen;\n\nclass G{i} {{\n");
    for r in 0..st.values.len() {
        let fin = if st.finals[r] { "final " } else { "" };
        out.push_str(&format!("    {fin}int value{r} = {};\n", st.values[r]));
        out.push_str(&format!("    int gap{r} = 0;\n"));
        out.push_str(&format!("    int pad{r} = {};\n", st.pads[r]));
        for k in 3..BLOCK {
            out.push_str(&format!("    int fill{r}x{k} = 0;\n"));
        }
    }
    out.push_str("}\n");
    out
}

/// A history of `rounds` rounds over `files` files. Each round has, per
/// file, a commit `p{r}x{i}` changing field `value{r}`; then one commit
/// `s{r}` adding `final` to `value{r}` in every file; then per file a
/// commit `q{r}x{i}` changing `pad{r}`, two lines below.
///
/// Rounds use field blocks ten lines apart, so they never interact.
pub fn sweep_history(shape: SweepShape) -> Fixture {
    let SweepShape { files, rounds } = shape;
    let path = |i: usize| format!("src/G{i}.java");
    let mut states: Vec<SweepState> = (0..files)
        .map(|_| SweepState { values: vec![0; rounds], finals: vec![false; rounds], pads: vec![0; rounds] })
        .collect();
    let mut b = FixtureBuilder::new();
    for (i, st) in states.iter().enumerate() {
        b.base(&path(i), &sweep_history_file(i, st));
    }
    for r in 0..rounds {
        for (i, st) in states.iter_mut().enumerate() {
            st.values[r] = 1;
            let text = sweep_history_file(i, st);
            b.commit(&format!("p{r}x{i}"), &format!("Set value{r} in G{i}"), [(path(i).as_str(), Some(text))]);
        }
        let mut swept = Vec::new();
        for (i, st) in states.iter_mut().enumerate() {
            st.finals[r] = true;
            swept.push((path(i), sweep_history_file(i, st)));
        }
        b.commit(&format!("s{r}"), &format!("Make value{r} final"), swept.iter().map(|(p, t)| (p.as_str(), Some(t.clone()))));
        for (i, st) in states.iter_mut().enumerate() {
            st.pads[r] = 1;
            let text = sweep_history_file(i, st);
            b.commit(&format!("q{r}x{i}"), &format!("Set pad{r} in G{i}"), [(path(i).as_str(), Some(text))]);
        }
    }
    b.fixture()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(final_sweep_fixture().commits.len(), 16);
        let f = sweep_history(SweepShape { files: 3, rounds: 2 });
        assert_eq!(f.commits.len(), 2 * (3 + 1 + 3));
        f.to_history().unwrap();
    }
}
