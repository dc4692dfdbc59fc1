//! Textual dependencies: overlap of an element's widened pre-image range
//! with the lines last written by older elements on the same file.

use std::collections::BTreeSet;

use super::{DepKind, Edge, ElementIndex};
use crate::history::{FileChange, History, Hunk};

/// Textual dependency edges, `context` lines of widening on each side.
pub fn textual_deps(h: &History, context: usize) -> BTreeSet<Edge> {
    textual_edges(h, &ElementIndex::new(h), context)
}

pub(crate) fn textual_edges(h: &History, ix: &ElementIndex, context: usize) -> BTreeSet<Edge> {
    let changes: Vec<&FileChange> = h.commits().iter().flat_map(|c| c.text_changes()).collect();
    let mut edges = BTreeSet::new();
    for (e, fc) in changes.iter().enumerate() {
        let mut lines = widened_range(fc, context);
        let mut prev = e;
        while !lines.is_empty() {
            let Some(p) = (0..prev).rev().find(|&p| ix.chain[p] == ix.chain[e]) else { break };
            prev = p;
            let hunks = &changes[p].hunks;
            let mut remaining = BTreeSet::new();
            for l in lines {
                match trace_back(hunks, l) {
                    None => {
                        edges.insert(Edge { from: e, to: p, kind: DepKind::Textual });
                    }
                    Some(old) => {
                        remaining.insert(old);
                    }
                }
            }
            lines = remaining;
        }
    }
    edges
}

/// Pre-image lines covered by the change's hunks, widened by `context`.
fn widened_range(fc: &FileChange, context: usize) -> BTreeSet<usize> {
    let n = fc.before_lines().len();
    let mut out = BTreeSet::new();
    for h in &fc.hunks {
        let (lo, hi) = if h.old_len == 0 {
            // between lines old_start - 1 and old_start
            (h.old_start.saturating_sub(context), h.old_start + context - 1)
        } else {
            (h.old_start.saturating_sub(context), h.old_end() + context)
        };
        out.extend(lo.max(1)..=hi.min(n));
    }
    out
}

/// Follows a post-image line of a change back to its pre-image line, or
/// `None` if the change itself wrote it.
fn trace_back(hunks: &[Hunk], line: usize) -> Option<usize> {
    let mut shift: isize = 0;
    for h in hunks {
        if h.new_len > 0 && (h.new_start..=h.new_end()).contains(&line) {
            return None;
        }
        if h.new_start + h.new_len <= line {
            shift += h.old_len as isize - h.new_len as isize;
        }
    }
    Some((line as isize + shift) as usize)
}
