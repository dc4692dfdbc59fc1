//! History slices: the dependency closure of a criterion commit and the
//! commit list, possibly split, that reproduces it.

mod patch;

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::deps::{ChangeElement, DependencyGraph};
use crate::error::{Error, Result};
use crate::history::{CommitId, FilePath};

pub use patch::{apply_series, materialize, patch_series, unified_diff, Patch};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceCommit {
    pub source: CommitId,
    /// In the source commit's file order.
    pub included_files: Vec<FilePath>,
    /// Some of the source commit's files were left out.
    pub split: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceStats {
    /// Change elements in the slice.
    pub size: usize,
    /// Change elements in the slice computed without elimination.
    pub original_size: usize,
    /// `1 - size / original_size`.
    pub reduction_ratio: f64,
    pub commits: usize,
    pub original_commits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistorySlice {
    pub criterion: CommitId,
    /// History order.
    pub elements: Vec<ChangeElement>,
    /// Oldest first.
    pub commits: Vec<SliceCommit>,
    pub stats: SliceStats,
}

impl HistorySlice {
    pub fn contains(&self, e: &ChangeElement) -> bool {
        self.elements.contains(e)
    }
}

/// Reachability over a fixed graph, reused across criteria.
pub struct Slicer<'g> {
    graph: &'g DependencyGraph,
    effective: Vec<Vec<usize>>,
    all: Vec<Vec<usize>>,
}

fn reach(adj: &[Vec<usize>], start: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for s in start {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(n) = queue.pop_front() {
        for &m in &adj[n] {
            if !seen[m] {
                seen[m] = true;
                queue.push_back(m);
            }
        }
    }
    seen
}

impl<'g> Slicer<'g> {
    pub fn new(graph: &'g DependencyGraph) -> Slicer<'g> {
        Slicer { graph, effective: graph.adjacency(true), all: graph.adjacency(false) }
    }

    /// Element indices reachable from the criterion's elements, reflexively.
    pub fn closure(&self, criterion: &CommitId, effective: bool) -> Result<Vec<bool>> {
        let pos = self.graph.commit_index(criterion).ok_or_else(|| Error::UnknownCriterion(criterion.clone()))?;
        let adj = if effective { &self.effective } else { &self.all };
        Ok(reach(adj, self.graph.elements_of(pos)))
    }

    pub fn slice(&self, criterion: &CommitId) -> Result<HistorySlice> {
        let g = self.graph;
        let pos = g.commit_index(criterion).ok_or_else(|| Error::UnknownCriterion(criterion.clone()))?;
        let reached = self.closure(criterion, true)?;
        let reached_all = self.closure(criterion, false)?;

        let mut commits = Vec::new();
        for (p, node) in g.commits.iter().enumerate() {
            let hit: Vec<&FilePath> = g.elements_of(p).filter(|&i| reached[i]).map(|i| &g.element(i).file).collect();
            if hit.is_empty() && p != pos {
                continue;
            }
            let included_files: Vec<FilePath> = if g.splittable.contains(&node.id) {
                node.files.iter().filter(|f| hit.contains(f)).cloned().collect()
            } else {
                node.files.clone()
            };
            let split = included_files.len() < node.files.len();
            commits.push(SliceCommit { source: node.id.clone(), included_files, split });
        }
        let original_commits = (0..g.commits.len())
            .filter(|&p| p == pos || g.elements_of(p).any(|i| reached_all[i]))
            .count();

        let elements: Vec<ChangeElement> =
            reached.iter().enumerate().filter(|(_, &r)| r).map(|(i, _)| g.element(i).clone()).collect();
        let size = elements.len();
        let original_size = reached_all.iter().filter(|&&r| r).count();
        let reduction_ratio = if original_size == 0 { 0.0 } else { 1.0 - size as f64 / original_size as f64 };
        let stats = SliceStats { size, original_size, reduction_ratio, commits: commits.len(), original_commits };
        Ok(HistorySlice { criterion: criterion.clone(), elements, commits, stats })
    }
}

pub fn slice(g: &DependencyGraph, criterion: &CommitId) -> Result<HistorySlice> {
    Slicer::new(g).slice(criterion)
}

/// One slice per commit, each commit taken as the criterion.
pub fn slice_all(g: &DependencyGraph) -> BTreeMap<CommitId, HistorySlice> {
    let slicer = Slicer::new(g);
    g.commits
        .par_iter()
        .map(|c| (c.id.clone(), slicer.slice(&c.id).expect("criterion from the graph")))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::deps::{CommitNode, DepKind, Edge};

    fn graph(commits: &[(&str, &[&str])], edges: &[(usize, usize, DepKind)]) -> DependencyGraph {
        let nodes: Vec<CommitNode> = commits
            .iter()
            .map(|(id, files)| CommitNode {
                id: CommitId::new(*id).unwrap(),
                files: files.iter().map(|f| FilePath::new(*f).unwrap()).collect(),
            })
            .collect();
        let elements = nodes
            .iter()
            .flat_map(|n| n.files.iter().map(|f| ChangeElement { commit: n.id.clone(), file: f.clone() }))
            .collect();
        let edges: BTreeSet<Edge> = edges.iter().map(|&(from, to, kind)| Edge { from, to, kind }).collect();
        DependencyGraph::from_parts(nodes, elements, edges).unwrap()
    }

    fn id(s: &str) -> CommitId {
        CommitId::new(s).unwrap()
    }

    #[test]
    fn no_edges_gives_the_criterion_alone() {
        let g = graph(&[("c1", &["a"]), ("c2", &["a", "b"])], &[]);
        let s = slice(&g, &id("c2")).unwrap();
        assert_eq!(s.elements.len(), 2);
        assert_eq!(s.commits.len(), 1);
        assert!(!s.commits[0].split);
    }

    #[test]
    fn chain_is_oldest_first() {
        let g = graph(
            &[("c1", &["f"]), ("c2", &["f"]), ("c3", &["f"])],
            &[(2, 1, DepKind::Textual), (1, 0, DepKind::Textual)],
        );
        let s = slice(&g, &id("c3")).unwrap();
        assert_eq!(s.elements.len(), 3);
        let order: Vec<&str> = s.commits.iter().map(|c| c.source.as_str()).collect();
        assert_eq!(order, ["c1", "c2", "c3"]);
    }

    #[test]
    fn splittable_commits_are_cut_to_reached_files() {
        let mut g = graph(
            &[("s", &["a", "b", "c"]), ("k", &["b"])],
            &[
                (3, 1, DepKind::Textual),
                (0, 1, DepKind::Commit),
                (1, 0, DepKind::Commit),
                (0, 2, DepKind::Commit),
                (2, 0, DepKind::Commit),
                (1, 2, DepKind::Commit),
                (2, 1, DepKind::Commit),
            ],
        );
        let full = slice(&g, &id("k")).unwrap();
        assert_eq!(full.stats.size, 4);
        g.splittable.insert(id("s"));
        g.eliminated = g.edges.iter().filter(|e| e.kind == DepKind::Commit).copied().collect();
        let s = slice(&g, &id("k")).unwrap();
        assert_eq!(s.stats.size, 2);
        assert_eq!(s.stats.original_size, 4);
        assert!((s.stats.reduction_ratio - 0.5).abs() < 1e-12);
        assert_eq!(s.commits[0].included_files, [FilePath::new("b").unwrap()]);
        assert!(s.commits[0].split);
    }

    #[test]
    fn unknown_criterion() {
        let g = graph(&[("c1", &["a"])], &[]);
        assert!(matches!(slice(&g, &id("nope")), Err(Error::UnknownCriterion(_))));
    }

    #[test]
    fn slice_all_covers_every_commit() {
        let g = graph(&[("c1", &["a"]), ("c2", &["a"]), ("c3", &["b"]), ("c4", &["a"]), ("c5", &["b"])], &[]);
        assert_eq!(slice_all(&g).len(), 5);
    }
}
