//! Connections and how their front boundaries meet a back-boundary path.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::gadget::{GadgetId, GadgetSet};
use crate::graph::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "type")]
pub enum Connection {
    /// β(left) lies on α(right).
    GPair { left: GadgetId, right: GadgetId },
    /// `middle` is a mirror-fan whose back boundary starts on α(lower)
    /// and ends on α(upper).
    MTriple { lower: GadgetId, middle: GadgetId, upper: GadgetId },
}

impl Connection {
    pub fn gadgets(&self) -> Vec<GadgetId> {
        match *self {
            Connection::GPair { left, right } => vec![left, right],
            Connection::MTriple { lower, middle, upper } => vec![lower, middle, upper],
        }
    }

    /// The gadget this connection admitted.
    pub fn admitted(&self) -> GadgetId {
        match *self {
            Connection::GPair { left, .. } => left,
            Connection::MTriple { middle, .. } => middle,
        }
    }

    pub fn contains(&self, id: GadgetId) -> bool {
        self.gadgets().contains(&id)
    }
}

/// A front boundary path with the gadget owning each edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontBoundary {
    pub vertices: Vec<VertexId>,
    pub owners: Vec<GadgetId>,
}

/// α of a connection: the outer gadget's front boundary below the admitted
/// gadget, the admitted gadget's front boundary, then the outer front
/// boundary above it.
pub fn front_boundary(set: &GadgetSet, conn: &Connection) -> FrontBoundary {
    let (below, mid, above) = match *conn {
        Connection::GPair { left, right } => (right, left, right),
        Connection::MTriple { lower, middle, upper } => (lower, middle, upper),
    };
    let m = &set.gadgets[mid];
    let (lo, hi) = (m.alpha[0], *m.alpha.last().unwrap());
    let b = &set.gadgets[below].alpha;
    let u = &set.gadgets[above].alpha;
    let pb = b.iter().position(|&x| x == lo).expect("connection is well formed");
    let pu = u.iter().position(|&x| x == hi).expect("connection is well formed");
    let mut vertices = b[..=pb].to_vec();
    let mut owners = vec![below; pb];
    vertices.extend(&m.alpha[1..]);
    owners.extend(std::iter::repeat_n(mid, m.alpha.len() - 1));
    vertices.extend(&u[pu + 1..]);
    owners.extend(std::iter::repeat_n(above, u.len() - 1 - pu));
    FrontBoundary { vertices, owners }
}

/// How a connection's front boundary meets a path `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OnPath {
    /// Lowest and highest positions on `l` touched.
    pub lo: usize,
    pub hi: usize,
    /// Positions on `l` touched, ascending.
    pub touched: Vec<usize>,
    /// The touched positions form one run along which every edge of `l`
    /// is also an edge of the front boundary.
    pub contiguous: bool,
    pub lower: GadgetId,
    pub higher: GadgetId,
    /// Gadgets whose part of the front boundary touches `l`.
    pub touching: BTreeSet<GadgetId>,
}

pub fn on_path(set: &GadgetSet, conn: &Connection, l: &[VertexId]) -> Option<OnPath> {
    let fb = front_boundary(set, conn);
    let pos_on_l = |v: VertexId| l.iter().position(|&x| x == v);
    let mut touched = Vec::new();
    let mut touching = BTreeSet::new();
    // (position on l, index on the front boundary)
    let mut hits = Vec::new();
    for (i, &v) in fb.vertices.iter().enumerate() {
        if let Some(p) = pos_on_l(v) {
            touched.push(p);
            hits.push((p, i));
            if i > 0 {
                touching.insert(fb.owners[i - 1]);
            }
            if i < fb.owners.len() {
                touching.insert(fb.owners[i]);
            }
        }
    }
    if touched.is_empty() {
        return None;
    }
    touched.sort_unstable();
    let (lo, hi) = (touched[0], *touched.last().unwrap());
    let fb_edges: BTreeSet<(VertexId, VertexId)> = fb.vertices.windows(2).map(|w| (w[0], w[1])).collect();
    let contiguous = touched.len() == hi - lo + 1 && (lo..hi).all(|p| fb_edges.contains(&(l[p], l[p + 1])));
    let idx_of = |p: usize| hits.iter().find(|h| h.0 == p).unwrap().1;
    let (a, b) = (idx_of(lo), idx_of(hi));
    let last = fb.owners.len();
    let lower = if a > 0 { fb.owners[a - 1] } else { fb.owners[0] };
    let higher = if b < last { fb.owners[b] } else { fb.owners[last - 1] };
    Some(OnPath { lo, hi, touched, contiguous, lower, higher, touching })
}
