//! Dependencies among change elements.

mod build;
mod textual;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::HistoryAnalysis;
use crate::error::{Error, Result};
use crate::history::{ChangeKind, CommitId, FilePath, History};
use crate::systematic::SystematicVerdict;

pub use build::build_deps_from;
pub use textual::textual_deps;

/// The change one commit made to one text file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChangeElement {
    pub commit: CommitId,
    pub file: FilePath,
}

impl fmt::Display for ChangeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.commit, self.file)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DepKind {
    Textual,
    Build,
    Commit,
}

impl DepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DepKind::Textual => "textual",
            DepKind::Build => "build",
            DepKind::Commit => "commit",
        }
    }
}

/// A dependency `from → to` between two elements, given as indices into
/// [`DependencyGraph::elements`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: DepKind,
}

/// Per-history indexing shared by the extractors: elements in history
/// order and the file identity each continues.
#[derive(Debug, Clone)]
pub(crate) struct ElementIndex {
    pub elements: Vec<ChangeElement>,
    /// Elements sharing a chain are the same file across renames.
    pub chain: Vec<usize>,
    /// Per commit, the range of its elements.
    pub by_commit: Vec<std::ops::Range<usize>>,
}

impl ElementIndex {
    pub fn new(h: &History) -> ElementIndex {
        let mut elements = Vec::new();
        let mut chain = Vec::new();
        let mut by_commit = Vec::new();
        let mut current: HashMap<FilePath, usize> = HashMap::new();
        let mut next_chain = 0;
        for c in h.commits() {
            let start = elements.len();
            for fc in &c.file_changes {
                let id = match fc.kind {
                    ChangeKind::Added => None,
                    ChangeKind::Renamed => current.remove(fc.source_path()),
                    ChangeKind::Modified | ChangeKind::Deleted => current.get(&fc.path).copied(),
                }
                .unwrap_or_else(|| {
                    next_chain += 1;
                    next_chain - 1
                });
                if fc.kind == ChangeKind::Deleted {
                    current.remove(&fc.path);
                } else {
                    current.insert(fc.path.clone(), id);
                }
                if !fc.binary {
                    elements.push(ChangeElement { commit: c.id.clone(), file: fc.path.clone() });
                    chain.push(id);
                }
            }
            by_commit.push(start..elements.len());
        }
        ElementIndex { elements, chain, by_commit }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommitNode {
    pub id: CommitId,
    /// Every changed file, binary ones included.
    pub files: Vec<FilePath>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    pub commits: Vec<CommitNode>,
    /// History order.
    pub elements: Vec<ChangeElement>,
    pub edges: BTreeSet<Edge>,
    /// Commit edges removed from the effective relation.
    pub eliminated: BTreeSet<Edge>,
    /// Commits whose commit edges were eliminated.
    pub splittable: BTreeSet<CommitId>,
    commit_of: Vec<usize>,
    index: HashMap<ChangeElement, usize>,
}

impl DependencyGraph {
    /// Assembles a graph from elements in history order and edges over them.
    pub fn from_parts(
        commits: Vec<CommitNode>,
        elements: Vec<ChangeElement>,
        edges: BTreeSet<Edge>,
    ) -> Result<DependencyGraph> {
        let positions: HashMap<&CommitId, usize> = commits.iter().enumerate().map(|(i, c)| (&c.id, i)).collect();
        let commit_of = elements
            .iter()
            .map(|e| {
                positions
                    .get(&e.commit)
                    .copied()
                    .ok_or_else(|| Error::Invariant(format!("element {e} names an unknown commit")))
            })
            .collect::<Result<Vec<_>>>()?;
        if commit_of.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invariant("elements are not in history order".into()));
        }
        let index: HashMap<ChangeElement, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        if index.len() != elements.len() {
            return Err(Error::Invariant("duplicate change element".into()));
        }
        if let Some(e) = edges.iter().find(|e| e.from >= elements.len() || e.to >= elements.len()) {
            return Err(Error::Invariant(format!("edge {e:?} out of range")));
        }
        Ok(DependencyGraph {
            commits,
            elements,
            edges,
            eliminated: BTreeSet::new(),
            splittable: BTreeSet::new(),
            commit_of,
            index,
        })
    }

    pub fn element(&self, i: usize) -> &ChangeElement {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &ChangeElement) -> Option<usize> {
        self.index.get(e).copied()
    }

    /// Position in history of the commit owning element `i`.
    pub fn commit_position(&self, i: usize) -> usize {
        self.commit_of[i]
    }

    pub fn commit_index(&self, id: &CommitId) -> Option<usize> {
        self.commits.iter().position(|c| &c.id == id)
    }

    /// Elements of the commit at position `pos`.
    pub fn elements_of(&self, pos: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.commit_of.partition_point(|&c| c < pos);
        let end = self.commit_of.partition_point(|&c| c <= pos);
        start..end
    }

    /// Edges minus the eliminated ones.
    pub fn effective_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| !self.eliminated.contains(e))
    }

    /// Out-neighbours over effective edges (or all edges), deduplicated.
    pub fn adjacency(&self, effective: bool) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.elements.len()];
        for e in &self.edges {
            if effective && self.eliminated.contains(e) {
                continue;
            }
            adj[e.from].push(e.to);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Checks the structural invariants of a finished graph.
    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            let (cf, ct) = (self.commit_of[e.from], self.commit_of[e.to]);
            let ok = match e.kind {
                DepKind::Textual => ct < cf,
                DepKind::Build => ct < cf || (ct == cf && self.elements[e.from].file != self.elements[e.to].file),
                DepKind::Commit => {
                    ct == cf && e.from != e.to && self.edges.contains(&Edge { from: e.to, to: e.from, kind: e.kind })
                }
            };
            if !ok {
                return Err(Error::Invariant(format!(
                    "malformed {} edge {} -> {}",
                    e.kind.as_str(),
                    self.elements[e.from],
                    self.elements[e.to]
                )));
            }
        }
        if let Some(e) = self.eliminated.iter().find(|e| e.kind != DepKind::Commit || !self.edges.contains(e)) {
            return Err(Error::Invariant(format!("eliminated edge {e:?} is not a commit edge of the graph")));
        }
        Ok(())
    }

    /// One line per edge: `fromCommit:fromFile<TAB>kind<TAB>toCommit:toFile`.
    pub fn to_edge_list(&self, effective: bool) -> String {
        let mut out = String::new();
        for e in &self.edges {
            if effective && self.eliminated.contains(e) {
                continue;
            }
            out.push_str(&format!("{}\t{}\t{}\n", self.elements[e.from], e.kind.as_str(), self.elements[e.to]));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct JsonEdge<'a> {
            from: &'a ChangeElement,
            to: &'a ChangeElement,
            kind: DepKind,
            eliminated: bool,
        }
        #[derive(Serialize)]
        struct JsonGraph<'a> {
            elements: &'a [ChangeElement],
            edges: Vec<JsonEdge<'a>>,
            splittable: &'a BTreeSet<CommitId>,
        }
        let edges = self
            .edges
            .iter()
            .map(|e| JsonEdge {
                from: &self.elements[e.from],
                to: &self.elements[e.to],
                kind: e.kind,
                eliminated: self.eliminated.contains(e),
            })
            .collect();
        let g = JsonGraph { elements: &self.elements, edges, splittable: &self.splittable };
        let mut s = serde_json::to_string_pretty(&g).expect("graph serializes");
        s.push('\n');
        s
    }
}

/// All ordered pairs of distinct elements within each commit.
pub fn commit_deps(h: &History) -> BTreeSet<Edge> {
    commit_edges(&ElementIndex::new(h))
}

fn commit_edges(ix: &ElementIndex) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    for range in &ix.by_commit {
        for from in range.clone() {
            for to in range.clone() {
                if from != to {
                    out.insert(Edge { from, to, kind: DepKind::Commit });
                }
            }
        }
    }
    out
}

pub fn build_deps(h: &History) -> BTreeSet<Edge> {
    build_deps_from(h, &HistoryAnalysis::new(h))
}

/// Textual, build and commit dependencies of a history, before elimination.
pub fn build_graph(h: &History, analysis: &HistoryAnalysis, context: usize) -> Result<DependencyGraph> {
    let ix = ElementIndex::new(h);
    let mut edges = textual::textual_edges(h, &ix, context);
    edges.extend(build::build_edges(&ix, analysis));
    edges.extend(commit_edges(&ix));
    let commits = h
        .commits()
        .iter()
        .map(|c| CommitNode { id: c.id.clone(), files: c.file_changes.iter().map(|f| f.path.clone()).collect() })
        .collect();
    let g = DependencyGraph::from_parts(commits, ix.elements, edges)?;
    g.validate()?;
    Ok(g)
}

/// Moves the commit edges of every splittable commit to `eliminated`.
pub fn eliminate(g: &DependencyGraph, verdicts: &BTreeMap<CommitId, SystematicVerdict>) -> DependencyGraph {
    let mut out = g.clone();
    out.splittable = g
        .commits
        .iter()
        .filter(|c| verdicts.get(&c.id).is_some_and(|v| v.splittable))
        .map(|c| c.id.clone())
        .collect();
    let positions: BTreeSet<usize> = g
        .commits
        .iter()
        .enumerate()
        .filter(|(_, c)| out.splittable.contains(&c.id))
        .map(|(i, _)| i)
        .collect();
    out.eliminated = g
        .edges
        .iter()
        .filter(|e| e.kind == DepKind::Commit && positions.contains(&g.commit_of[e.from]))
        .copied()
        .collect();
    out
}
