//! Random dependency graphs and a Floyd–Warshall closure oracle.

use std::collections::BTreeSet;

use histslice::deps::{CommitNode, DepKind, DependencyGraph, Edge};
use histslice::{ChangeElement, CommitId, FilePath};
use rand::Rng;

/// A graph of at most `max_nodes` elements spread over commits of one to
/// three files, with at most `max_edges` edges of any kind (cycles
/// included) and a random set of splittable commits eliminated.
pub fn random_graph(rng: &mut impl Rng, max_nodes: usize, max_edges: usize) -> DependencyGraph {
    let target = rng.gen_range(1..=max_nodes);
    let mut commits = Vec::new();
    let mut elements = Vec::new();
    while elements.len() < target {
        let k = rng.gen_range(1..=3).min(target - elements.len());
        let id = CommitId::new(format!("c{}", commits.len())).unwrap();
        let files: Vec<FilePath> = (0..k).map(|f| FilePath::new(format!("f{f}")).unwrap()).collect();
        for f in &files {
            elements.push(ChangeElement { commit: id.clone(), file: f.clone() });
        }
        commits.push(CommitNode { id, files });
    }
    let n = elements.len();
    let commit_of: Vec<usize> = {
        let mut out = Vec::new();
        for (i, c) in commits.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, c.files.len()));
        }
        out
    };
    let mut edges = BTreeSet::new();
    for _ in 0..rng.gen_range(0..=max_edges) {
        let (from, to) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let kind = if commit_of[from] == commit_of[to] && from != to && rng.gen_bool(0.5) {
            DepKind::Commit
        } else if rng.gen_bool(0.5) {
            DepKind::Textual
        } else {
            DepKind::Build
        };
        edges.insert(Edge { from, to, kind });
    }
    let mut g = DependencyGraph::from_parts(commits, elements, edges).unwrap();
    for c in &g.commits {
        if rng.gen_bool(0.3) {
            g.splittable.insert(c.id.clone());
        }
    }
    g.eliminated = g
        .edges
        .iter()
        .filter(|e| e.kind == DepKind::Commit && g.splittable.contains(&g.element(e.from).commit))
        .copied()
        .collect();
    g
}

/// Reflexive-transitive closure matrix over the effective (or all) edges.
pub fn closure_matrix(g: &DependencyGraph, effective: bool) -> Vec<Vec<bool>> {
    let n = g.elements.len();
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in &g.edges {
        if !effective || !g.eliminated.contains(e) {
            m[e.from][e.to] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                let via = m[k].clone();
                for (cell, reach) in m[i].iter_mut().zip(via) {
                    *cell |= reach;
                }
            }
        }
    }
    m
}

/// Elements reachable from the elements of `criterion` per the matrix.
pub fn oracle_slice(g: &DependencyGraph, m: &[Vec<bool>], criterion: &CommitId) -> BTreeSet<ChangeElement> {
    let sources: Vec<usize> = (0..g.elements.len()).filter(|&i| &g.element(i).commit == criterion).collect();
    (0..g.elements.len())
        .filter(|&j| sources.iter().any(|&i| m[i][j]))
        .map(|j| g.element(j).clone())
        .collect()
}
