//! Build dependencies by name-based def-use resolution: an element that
//! writes a reference to a name depends on every element that last
//! introduced or modified a declaration with that name.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{DepKind, Edge, ElementIndex};
use crate::analysis::{FileAnalysis, HistoryAnalysis};
use crate::history::History;

pub fn build_deps_from(h: &History, analysis: &HistoryAnalysis) -> BTreeSet<Edge> {
    build_edges(&ElementIndex::new(h), analysis)
}

pub(crate) fn build_edges(ix: &ElementIndex, analysis: &HistoryAnalysis) -> BTreeSet<Edge> {
    // (chain, declaration key) -> owning element
    let mut owners: BTreeMap<(usize, String), (usize, String)> = BTreeMap::new();
    let mut by_name: HashMap<String, BTreeSet<(usize, String)>> = HashMap::new();
    let mut edges = BTreeSet::new();

    for (range, (_, files)) in ix.by_commit.iter().zip(&analysis.commits) {
        let text: Vec<&FileAnalysis> = files.iter().filter(|f| !f.binary).collect();
        debug_assert_eq!(text.len(), range.len());
        let elems: Vec<(usize, &FileAnalysis)> = range.clone().zip(text).collect();

        // Declarations written by this commit are visible to its other files.
        let mut fresh: HashMap<&str, Vec<usize>> = HashMap::new();
        for &(e, fa) in &elems {
            for d in &fa.declared {
                fresh.entry(d.name.as_str()).or_default().push(e);
            }
        }
        for &(e, fa) in &elems {
            for name in &fa.uses {
                if let Some(decls) = by_name.get(name) {
                    for d in decls {
                        edges.insert(Edge { from: e, to: owners[d].0, kind: DepKind::Build });
                    }
                }
                for &t in fresh.get(name.as_str()).into_iter().flatten() {
                    if ix.elements[t].file != ix.elements[e].file {
                        edges.insert(Edge { from: e, to: t, kind: DepKind::Build });
                    }
                }
            }
        }
        for &(e, fa) in &elems {
            let chain = ix.chain[e];
            for key in &fa.removed {
                let slot = (chain, key.clone());
                if let Some((_, name)) = owners.remove(&slot) {
                    by_name.entry(name).or_default().remove(&slot);
                }
            }
            for d in &fa.declared {
                let slot = (chain, d.key.clone());
                owners.insert(slot.clone(), (e, d.name.clone()));
                by_name.entry(d.name.clone()).or_default().insert(slot);
            }
        }
    }
    edges
}
