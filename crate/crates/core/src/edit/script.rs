//! Edit script generation from a node mapping, and replay of scripts.
//!
//! Generation follows Chawathe et al.'s algorithm: a breadth-first walk of
//! the target tree inserts, updates and moves nodes of a working copy of the
//! source, aligning children with an LCS, and unmatched source nodes are
//! deleted afterwards in post-order.

use serde::Serialize;

use super::matcher::{lcs, match_trees, Mapping};
use crate::error::{Error, Result};
use crate::syntax::{Kind, NodeId, PlainTree, SyntaxTree};

/// Node of the working tree. Ids below the source tree's length are source
/// nodes; inserted nodes are numbered from there on, in insertion order.
pub type WorkId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum EditOp {
    Insert { node: WorkId, kind: Kind, label: String, parent: WorkId, pos: usize },
    Delete { node: WorkId },
    Update { node: WorkId, label: String },
    /// Detach `node`, then insert it under `parent` at `pos`.
    Move { node: WorkId, parent: WorkId, pos: usize },
}

#[derive(Debug, Clone)]
pub struct TreeDiff {
    pub ops: Vec<EditOp>,
    pub mapping: Mapping,
    pub src_len: usize,
    /// Target-tree node of each inserted working node.
    pub inserted: Vec<NodeId>,
}

impl TreeDiff {
    /// Target-tree counterpart of a working node, if it has one.
    pub fn dst_of(&self, node: WorkId) -> Option<NodeId> {
        if node < self.src_len {
            self.mapping.src_to_dst[node]
        } else {
            self.inserted.get(node - self.src_len).copied()
        }
    }
}

/// Mutable label tree with stable ids.
#[derive(Debug, Clone)]
struct WorkTree {
    kind: Vec<Kind>,
    label: Vec<String>,
    parent: Vec<Option<WorkId>>,
    children: Vec<Vec<WorkId>>,
    root: WorkId,
}

impl WorkTree {
    fn from_tree(t: &SyntaxTree) -> WorkTree {
        WorkTree {
            kind: (0..t.len()).map(|n| t.kind(n)).collect(),
            label: (0..t.len()).map(|n| t.label(n).to_owned()).collect(),
            parent: (0..t.len()).map(|n| t.parent(n)).collect(),
            children: (0..t.len()).map(|n| t.children(n).to_vec()).collect(),
            root: t.root(),
        }
    }

    fn add(&mut self, kind: Kind, label: String) -> WorkId {
        self.kind.push(kind);
        self.label.push(label);
        self.parent.push(None);
        self.children.push(Vec::new());
        self.kind.len() - 1
    }

    fn detach(&mut self, node: WorkId) {
        if let Some(p) = self.parent[node].take() {
            self.children[p].retain(|&c| c != node);
        }
    }

    fn attach(&mut self, node: WorkId, parent: WorkId, pos: usize) {
        self.children[parent].insert(pos, node);
        self.parent[node] = Some(parent);
    }

    fn index_in_parent(&self, node: WorkId) -> usize {
        let p = self.parent[node].expect("attached node");
        self.children[p].iter().position(|&c| c == node).expect("child of parent")
    }

    fn postorder(&self) -> Vec<WorkId> {
        let mut out = Vec::new();
        let mut stack = vec![(self.root, false)];
        while let Some((n, done)) = stack.pop() {
            if done {
                out.push(n);
            } else {
                stack.push((n, true));
                stack.extend(self.children[n].iter().rev().map(|&c| (c, false)));
            }
        }
        out
    }

    fn plain(&self, node: WorkId) -> PlainTree {
        PlainTree {
            kind: self.kind[node],
            label: self.label[node].clone(),
            children: self.children[node].iter().map(|&c| self.plain(c)).collect(),
        }
    }
}

/// Computes an edit script turning `before` into `after`.
///
/// Empty exactly when the trees are isomorphic.
pub fn tree_diff(before: &SyntaxTree, after: &SyntaxTree) -> Result<TreeDiff> {
    if before.is_unparseable() || after.is_unparseable() {
        return Err(Error::DiffOnUnparseable);
    }
    let mapping = match_trees(before, after);
    Ok(Generator::new(before, after, mapping).run())
}

struct Generator<'a> {
    dst: &'a SyntaxTree,
    work: WorkTree,
    src_len: usize,
    w_to_dst: Vec<Option<NodeId>>,
    dst_to_w: Vec<Option<WorkId>>,
    in_order_w: Vec<bool>,
    in_order_dst: Vec<bool>,
    ops: Vec<EditOp>,
    inserted: Vec<NodeId>,
    mapping: Mapping,
}

impl<'a> Generator<'a> {
    fn new(src: &SyntaxTree, dst: &'a SyntaxTree, mapping: Mapping) -> Self {
        Generator {
            dst,
            work: WorkTree::from_tree(src),
            src_len: src.len(),
            w_to_dst: mapping.src_to_dst.clone(),
            dst_to_w: mapping.dst_to_src.clone(),
            in_order_w: vec![false; src.len()],
            in_order_dst: vec![false; dst.len()],
            ops: Vec::new(),
            inserted: Vec::new(),
            mapping,
        }
    }

    fn run(mut self) -> TreeDiff {
        let dst = self.dst;
        let mut queue = std::collections::VecDeque::from([dst.root()]);
        while let Some(x) = queue.pop_front() {
            queue.extend(dst.children(x).iter().copied());
            let w = match (self.dst_to_w[x], dst.parent(x)) {
                (Some(w), parent) => {
                    if self.work.label[w] != dst.label(x) {
                        self.work.label[w] = dst.label(x).to_owned();
                        self.ops.push(EditOp::Update { node: w, label: dst.label(x).to_owned() });
                    }
                    if let Some(y) = parent {
                        let z = self.dst_to_w[y].expect("parent processed first");
                        if self.work.parent[w] != Some(z) {
                            self.work.detach(w);
                            let pos = self.find_pos(x);
                            self.work.attach(w, z, pos);
                            self.ops.push(EditOp::Move { node: w, parent: z, pos });
                        }
                    }
                    w
                }
                (None, Some(y)) => {
                    let z = self.dst_to_w[y].expect("parent processed first");
                    let pos = self.find_pos(x);
                    let w = self.work.add(dst.kind(x), dst.label(x).to_owned());
                    self.work.attach(w, z, pos);
                    self.w_to_dst.push(Some(x));
                    self.in_order_w.push(false);
                    self.dst_to_w[x] = Some(w);
                    self.inserted.push(x);
                    self.ops.push(EditOp::Insert {
                        node: w,
                        kind: dst.kind(x),
                        label: dst.label(x).to_owned(),
                        parent: z,
                        pos,
                    });
                    w
                }
                (None, None) => unreachable!("roots are always matched"),
            };
            self.in_order_w[w] = true;
            self.in_order_dst[x] = true;
            self.align_children(w, x);
        }
        for w in self.work.postorder() {
            if self.w_to_dst[w].is_none() {
                self.ops.push(EditOp::Delete { node: w });
                self.work.detach(w);
            }
        }
        TreeDiff { ops: self.ops, mapping: self.mapping, src_len: self.src_len, inserted: self.inserted }
    }

    fn align_children(&mut self, w: WorkId, x: NodeId) {
        let dst = self.dst;
        for &c in &self.work.children[w] {
            self.in_order_w[c] = false;
        }
        for &c in dst.children(x) {
            self.in_order_dst[c] = false;
        }
        let s1: Vec<WorkId> = self.work.children[w]
            .iter()
            .copied()
            .filter(|&c| self.w_to_dst[c].is_some_and(|d| dst.parent(d) == Some(x)))
            .collect();
        let s2: Vec<NodeId> = dst
            .children(x)
            .iter()
            .copied()
            .filter(|&d| self.dst_to_w[d].is_some_and(|c| self.work.parent[c] == Some(w)))
            .collect();
        let w_to_dst = &self.w_to_dst;
        for (a, b) in lcs(&s1, &s2, |a, b| w_to_dst[a] == Some(b)) {
            self.in_order_w[a] = true;
            self.in_order_dst[b] = true;
        }
        for b in s2 {
            if self.in_order_dst[b] {
                continue;
            }
            let a = self.dst_to_w[b].expect("filtered to matched");
            self.work.detach(a);
            let pos = self.find_pos(b);
            self.work.attach(a, w, pos);
            self.ops.push(EditOp::Move { node: a, parent: w, pos });
            self.in_order_w[a] = true;
            self.in_order_dst[b] = true;
        }
    }

    /// Position under the working parent right after the partner of the
    /// nearest in-order left sibling of `x`.
    fn find_pos(&self, x: NodeId) -> usize {
        let dst = self.dst;
        let Some(y) = dst.parent(x) else { return 0 };
        let siblings = dst.children(y);
        let xpos = siblings.iter().position(|&s| s == x).expect("child of parent");
        let Some(&v) = siblings[..xpos].iter().rev().find(|&&s| self.in_order_dst[s]) else {
            return 0;
        };
        let u = self.dst_to_w[v].expect("in-order nodes are matched");
        self.work.index_in_parent(u) + 1
    }
}

/// Replays `ops` on `before` and returns the resulting label tree.
pub fn apply(before: &SyntaxTree, ops: &[EditOp]) -> Result<PlainTree> {
    let mut work = WorkTree::from_tree(before);
    let bad = |msg: String| Error::Invariant(format!("edit script does not apply: {msg}"));
    for op in ops {
        match op {
            EditOp::Insert { node, kind, label, parent, pos } => {
                let id = work.add(*kind, label.clone());
                if id != *node {
                    return Err(bad(format!("insert numbered {node}, expected {id}")));
                }
                if *parent >= id || *pos > work.children[*parent].len() {
                    return Err(bad(format!("insert position {parent}/{pos}")));
                }
                work.attach(id, *parent, *pos);
            }
            EditOp::Delete { node } => {
                if !work.children.get(*node).is_some_and(|c| c.is_empty()) {
                    return Err(bad(format!("delete of non-leaf {node}")));
                }
                work.detach(*node);
            }
            EditOp::Update { node, label } => {
                let slot = work.label.get_mut(*node).ok_or_else(|| bad(format!("update of {node}")))?;
                *slot = label.clone();
            }
            EditOp::Move { node, parent, pos } => {
                if *node >= work.kind.len() || *parent >= work.kind.len() {
                    return Err(bad(format!("move of {node}")));
                }
                work.detach(*node);
                if *pos > work.children[*parent].len() {
                    return Err(bad(format!("move position {parent}/{pos}")));
                }
                work.attach(*node, *parent, *pos);
            }
        }
    }
    Ok(work.plain(work.root))
}
