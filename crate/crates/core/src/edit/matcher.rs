//! Node matching between two syntax trees.
//!
//! Three phases in the spirit of GumTree: greedy top-down matching of
//! isomorphic subtrees, bottom-up matching of containers by the share of
//! already matched descendants, and an LCS-based recovery over the children
//! of every matched pair.

use std::collections::HashMap;

use crate::syntax::{NodeId, SyntaxTree};

const MIN_HEIGHT: usize = 2;
const MIN_DICE: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct Mapping {
    pub src_to_dst: Vec<Option<NodeId>>,
    pub dst_to_src: Vec<Option<NodeId>>,
}

impl Mapping {
    fn new(src_len: usize, dst_len: usize) -> Self {
        Mapping { src_to_dst: vec![None; src_len], dst_to_src: vec![None; dst_len] }
    }

    fn link(&mut self, a: NodeId, b: NodeId) {
        self.src_to_dst[a] = Some(b);
        self.dst_to_src[b] = Some(a);
    }

    pub fn len(&self) -> usize {
        self.src_to_dst.iter().filter(|m| m.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-tree facts the matcher needs.
struct Index {
    hash: Vec<u64>,
    height: Vec<usize>,
    /// preorder rank and the rank one past the last descendant
    pre: Vec<usize>,
    pre_end: Vec<usize>,
    by_pre: Vec<NodeId>,
}

impl Index {
    fn new(t: &SyntaxTree) -> Index {
        let n = t.len();
        let mut height = vec![1; n];
        for id in t.postorder() {
            height[id] = 1 + t.children(id).iter().map(|&c| height[c]).max().unwrap_or(0);
        }
        let by_pre = t.preorder();
        let mut pre = vec![0; n];
        for (rank, &id) in by_pre.iter().enumerate() {
            pre[id] = rank;
        }
        let mut pre_end = vec![0; n];
        for id in t.postorder() {
            pre_end[id] = t.children(id).last().map_or(pre[id] + 1, |&c| pre_end[c]);
        }
        Index { hash: t.subtree_hashes(), height, pre, pre_end, by_pre }
    }

    fn is_descendant(&self, node: NodeId, ancestor: NodeId) -> bool {
        self.pre[ancestor] < self.pre[node] && self.pre[node] < self.pre_end[ancestor]
    }

    fn descendants(&self, node: NodeId) -> &[NodeId] {
        &self.by_pre[self.pre[node] + 1..self.pre_end[node]]
    }
}

pub fn isomorphic(a: &SyntaxTree, x: NodeId, b: &SyntaxTree, y: NodeId) -> bool {
    a.kind(x) == b.kind(y)
        && a.label(x) == b.label(y)
        && a.children(x).len() == b.children(y).len()
        && a.children(x)
            .iter()
            .zip(b.children(y))
            .all(|(&c, &d)| isomorphic(a, c, b, d))
}

pub fn match_trees(src: &SyntaxTree, dst: &SyntaxTree) -> Mapping {
    let si = Index::new(src);
    let di = Index::new(dst);
    let mut m = Mapping::new(src.len(), dst.len());

    top_down(src, dst, &si, &di, &mut m);
    if m.src_to_dst[src.root()].is_none()
        && m.dst_to_src[dst.root()].is_none()
        && src.kind(src.root()) == dst.kind(dst.root())
    {
        m.link(src.root(), dst.root());
    }
    bottom_up(src, dst, &si, &di, &mut m);
    for &a in &si.by_pre {
        if let Some(b) = m.src_to_dst[a] {
            recover(src, dst, &si, &di, &mut m, a, b);
        }
    }
    m
}

fn link_subtree(src: &SyntaxTree, dst: &SyntaxTree, m: &mut Mapping, a: NodeId, b: NodeId) {
    m.link(a, b);
    for (&c, &d) in src.children(a).iter().zip(dst.children(b)) {
        link_subtree(src, dst, m, c, d);
    }
}

fn top_down(src: &SyntaxTree, dst: &SyntaxTree, si: &Index, di: &Index, m: &mut Mapping) {
    let mut classes: HashMap<u64, (Vec<NodeId>, Vec<NodeId>)> = HashMap::new();
    for &a in &si.by_pre {
        if si.height[a] >= MIN_HEIGHT {
            classes.entry(si.hash[a]).or_default().0.push(a);
        }
    }
    for &b in &di.by_pre {
        if di.height[b] >= MIN_HEIGHT {
            if let Some(class) = classes.get_mut(&di.hash[b]) {
                class.1.push(b);
            }
        }
    }
    let mut order: Vec<(usize, usize, u64)> = classes
        .iter()
        .filter(|(_, (s, d))| !d.is_empty() && !s.is_empty())
        .map(|(&h, (s, _))| (si.height[s[0]], si.pre[s[0]], h))
        .collect();
    // tallest first, ties in source order for determinism
    order.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));

    for (_, _, h) in order {
        let (s, d) = &classes[&h];
        let s: Vec<_> = s.iter().copied().filter(|&a| m.src_to_dst[a].is_none()).collect();
        let d: Vec<_> = d.iter().copied().filter(|&b| m.dst_to_src[b].is_none()).collect();
        if s.is_empty() || s.len() != d.len() {
            continue;
        }
        for (a, b) in s.into_iter().zip(d) {
            if isomorphic(src, a, dst, b) {
                link_subtree(src, dst, m, a, b);
            }
        }
    }
}

fn bottom_up(src: &SyntaxTree, dst: &SyntaxTree, si: &Index, di: &Index, m: &mut Mapping) {
    for t in src.postorder() {
        if m.src_to_dst[t].is_some() || src.children(t).is_empty() {
            continue;
        }
        let mut candidates: Vec<NodeId> = Vec::new();
        for &d in si.descendants(t) {
            let Some(p) = m.src_to_dst[d] else { continue };
            for anc in dst.ancestors(p) {
                if dst.kind(anc) == src.kind(t) && m.dst_to_src[anc].is_none() && !candidates.contains(&anc) {
                    candidates.push(anc);
                }
            }
        }
        let mut best: Option<(f64, NodeId)> = None;
        for c in candidates {
            let score = dice(si, di, m, t, c);
            let better = match best {
                None => true,
                Some((s, b)) => score > s || (score == s && di.pre[c] < di.pre[b]),
            };
            if better {
                best = Some((score, c));
            }
        }
        if let Some((score, c)) = best {
            if score >= MIN_DICE {
                m.link(t, c);
            }
        }
    }
}

fn dice(si: &Index, di: &Index, m: &Mapping, t: NodeId, c: NodeId) -> f64 {
    let st = si.descendants(t);
    let dc = di.descendants(c);
    if st.is_empty() && dc.is_empty() {
        return 0.0;
    }
    let common = st
        .iter()
        .filter(|&&d| m.src_to_dst[d].is_some_and(|p| di.is_descendant(p, c)))
        .count();
    2.0 * common as f64 / (st.len() + dc.len()) as f64
}

fn recover(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    si: &Index,
    di: &Index,
    m: &mut Mapping,
    a: NodeId,
    b: NodeId,
) {
    // isomorphic, then same kind and label, then same kind
    for pass in 0..3 {
        let xs: Vec<NodeId> = src.children(a).iter().copied().filter(|&c| m.src_to_dst[c].is_none()).collect();
        let ys: Vec<NodeId> = dst.children(b).iter().copied().filter(|&c| m.dst_to_src[c].is_none()).collect();
        if xs.is_empty() || ys.is_empty() {
            return;
        }
        let pairs = lcs(&xs, &ys, |x, y| match pass {
            0 => si.hash[x] == di.hash[y] && isomorphic(src, x, dst, y),
            1 => src.kind(x) == dst.kind(y) && src.label(x) == dst.label(y),
            _ => src.kind(x) == dst.kind(y),
        });
        for (x, y) in pairs {
            if pass == 0 {
                link_subtree(src, dst, m, x, y);
            } else {
                m.link(x, y);
                recover(src, dst, si, di, m, x, y);
            }
        }
    }
}

/// Longest common subsequence of two sequences under `eq`, as index pairs.
pub fn lcs<T: Copy>(xs: &[T], ys: &[T], eq: impl Fn(T, T) -> bool) -> Vec<(T, T)> {
    let (n, k) = (xs.len(), ys.len());
    let mut table = vec![vec![0u32; k + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..k).rev() {
            table[i][j] = if eq(xs[i], ys[j]) {
                table[i + 1][j + 1] + 1
            } else {
                table[i + 1][j].max(table[i][j + 1])
            };
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < k {
        if eq(xs[i], ys[j]) {
            out.push((xs[i], ys[j]));
            i += 1;
            j += 1;
        } else if table[i + 1][j] >= table[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}
