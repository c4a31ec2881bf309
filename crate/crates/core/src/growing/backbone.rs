//! The backbone graph over connections meeting a back-boundary path.
//!
//! Every connection joins two gadgets at two vertices: a G-pair
//! `(left, right)` has `right` below `left` at the low end of α(left) and
//! `left` below `right` at its high end; an M-triple `(lower, middle,
//! upper)` has `lower` below `middle` at the low end of α(middle) and
//! `middle` below `upper` at its high end. A backbone of a path `L` is a
//! chain of such junctions on `L` in which each gadget between two
//! consecutive junctions covers the stretch of `L` between them with its
//! own front boundary.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::connection::Connection;
use crate::gadget::{is_m_triple, GadgetId, GadgetSet};
use crate::graph::VertexId;

/// A junction of a connection placed on the path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BackboneNode {
    pub connection: Connection,
    /// Position of the junction vertex on the path.
    pub position: usize,
    pub below: GadgetId,
    pub above: GadgetId,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct BackboneGraph {
    pub nodes: Vec<BackboneNode>,
    pub edges: Vec<(usize, usize)>,
    /// Nodes whose gadget below covers the first edge of the path.
    pub starts: Vec<usize>,
    /// Nodes whose gadget above covers the last edge of the path.
    pub ends: Vec<usize>,
}

/// The two junctions of a connection.
pub fn junctions(set: &GadgetSet, c: &Connection) -> [(VertexId, GadgetId, GadgetId); 2] {
    let (lo, mid, hi) = match *c {
        Connection::GPair { left, right } => (right, left, right),
        Connection::MTriple { lower, middle, upper } => (lower, middle, upper),
    };
    let a = &set.gadgets[mid].alpha;
    [(a[0], lo, mid), (*a.last().unwrap(), mid, hi)]
}

/// Whether α(id) runs along `l` from position `p` to position `q`.
pub fn covers(set: &GadgetSet, id: GadgetId, l: &[VertexId], p: usize, q: usize) -> bool {
    let a = &set.gadgets[id].alpha;
    let Some(s) = a.iter().position(|&x| x == l[p]) else { return false };
    q >= p && s + (q - p) < a.len() && (p..=q).all(|i| a[s + i - p] == l[i])
}

impl BackboneGraph {
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.0 == i).map(|e| e.1)
    }

    /// Checks that the edge relation has no directed cycle.
    pub fn is_acyclic(&self) -> bool {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        for &(_, b) in &self.edges {
            indeg[b] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = queue.pop_front() {
            seen += 1;
            for j in self.successors(i).collect::<Vec<_>>() {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        seen == n
    }

    /// Every start-to-end path.
    pub fn all_paths(&self) -> Vec<Vec<usize>> {
        let ends: BTreeSet<usize> = self.ends.iter().copied().collect();
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = self.starts.iter().map(|&s| vec![s]).collect();
        stack.reverse();
        while let Some(path) = stack.pop() {
            let i = *path.last().unwrap();
            if ends.contains(&i) {
                out.push(path.clone());
            }
            let next: Vec<usize> = self.successors(i).filter(|j| !path.contains(j)).collect();
            for &j in next.iter().rev() {
                let mut p = path.clone();
                p.push(j);
                stack.push(p);
            }
        }
        out
    }

    /// Gadgets met along a path, from the bottom of `l` to the top.
    pub fn decode(&self, path: &[usize]) -> Vec<GadgetId> {
        let mut out = vec![self.nodes[path[0]].below];
        out.extend(path.iter().map(|&i| self.nodes[i].above));
        out
    }

    /// For every start, the ends reachable from it, with one shortest
    /// path each.
    pub fn start_end_paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for &s in &self.starts {
            let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
            let mut seen = BTreeSet::from([s]);
            let mut queue = VecDeque::from([s]);
            while let Some(i) = queue.pop_front() {
                if self.ends.contains(&i) {
                    let mut path = vec![i];
                    let mut cur = i;
                    while let Some(&p) = parent.get(&cur) {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    out.push(path);
                }
                for j in self.successors(i) {
                    if seen.insert(j) {
                        parent.insert(j, i);
                        queue.push_back(j);
                    }
                }
            }
        }
        out
    }
}

/// Builds the backbone graph of `l` from the stored connections. `keep`
/// filters junctions, e.g. by checking pockets.
pub fn build_backbone_graph(
    set: &GadgetSet,
    connections: &BTreeSet<Connection>,
    l: &[VertexId],
    mut keep: impl FnMut(&BackboneNode) -> bool,
) -> BackboneGraph {
    let t = l.len();
    let mut nodes = Vec::new();
    for c in connections {
        for (x, below, above) in junctions(set, c) {
            let Some(position) = l.iter().position(|&y| y == x) else { continue };
            let node = BackboneNode { connection: *c, position, below, above };
            if keep(&node) {
                nodes.push(node);
            }
        }
    }
    nodes.sort();
    nodes.dedup();
    let mut edges = Vec::new();
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if i != j && a.above == b.below && covers(set, a.above, l, a.position, b.position) {
                edges.push((i, j));
            }
        }
    }
    let starts = (0..nodes.len())
        .filter(|&i| nodes[i].position >= 1 && covers(set, nodes[i].below, l, 0, nodes[i].position))
        .collect();
    let ends = (0..nodes.len())
        .filter(|&i| nodes[i].position + 2 <= t && covers(set, nodes[i].above, l, nodes[i].position, t - 1))
        .collect();
    BackboneGraph { nodes, edges, starts, ends }
}

/// M-triples around mirror-fan `mid` read off start-to-end paths of its
/// backbone graph.
pub fn triples_from_backbone(set: &GadgetSet, bb: &BackboneGraph, mid: GadgetId) -> BTreeSet<Connection> {
    let m = &set.gadgets[mid];
    let mut out = BTreeSet::new();
    for path in bb.start_end_paths() {
        let lower = bb.nodes[path[0]].below;
        let upper = bb.nodes[*path.last().unwrap()].above;
        if is_m_triple(&set.gadgets[lower], m, &set.gadgets[upper]) {
            out.insert(Connection::MTriple { lower, middle: mid, upper });
        }
    }
    out
}

/// M-triples read off start-to-end paths whose gadgets carry mutually
/// consistent labels. `labels` gives the labels a node brings (None if it
/// can never be realized) and `check` merges and validates.
pub fn consistent_triples<L: Clone>(
    set: &GadgetSet,
    bb: &BackboneGraph,
    mid: GadgetId,
    base: L,
    labels: impl Fn(&BackboneNode) -> Option<L>,
    check: impl Fn(&L, &L) -> Option<L>,
) -> BTreeSet<Connection> {
    let m = &set.gadgets[mid];
    let node_labels: Vec<Option<L>> = bb.nodes.iter().map(&labels).collect();
    let ends: BTreeSet<usize> = bb.ends.iter().copied().collect();
    let mut out = BTreeSet::new();
    for &s in &bb.starts {
        let Some(acc) = node_labels[s].as_ref().and_then(|x| check(&base, x)) else { continue };
        let mut stack = vec![(s, acc, vec![s])];
        while let Some((i, acc, path)) = stack.pop() {
            if ends.contains(&i) {
                let (lower, upper) = (bb.nodes[s].below, bb.nodes[i].above);
                if is_m_triple(&set.gadgets[lower], m, &set.gadgets[upper]) {
                    out.insert(Connection::MTriple { lower, middle: mid, upper });
                }
            }
            for j in bb.successors(i) {
                if path.contains(&j) {
                    continue;
                }
                if let Some(next) = node_labels[j].as_ref().and_then(|x| check(&acc, x)) {
                    let mut p = path.clone();
                    p.push(j);
                    stack.push((j, next, p));
                }
            }
        }
    }
    out
}
