//! Regular edge labelings and the two oriented subgraphs they induce.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{PlaneGraph, VertexId};
use crate::layout::RectLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeSet {
    T1,
    T2,
}

/// A labeled, directed interior edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Labeled {
    pub set: EdgeSet,
    pub tail: VertexId,
    pub head: VertexId,
}

/// Partition of the interior edges into directed sets T1 (south to north)
/// and T2 (east to west). Keys are unordered pairs stored as `(min, max)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rel {
    edges: BTreeMap<(VertexId, VertexId), Labeled>,
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Serialize, Deserialize)]
struct RelEntry {
    u: VertexId,
    v: VertexId,
    set: EdgeSet,
    dir: String,
}

impl Rel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a labeled edge; errors if the edge already carries a
    /// different label.
    pub fn insert(&mut self, set: EdgeSet, tail: VertexId, head: VertexId) -> Result<()> {
        let lab = Labeled { set, tail, head };
        match self.edges.insert(key(tail, head), lab) {
            Some(prev) if prev != lab => {
                self.edges.insert(key(tail, head), prev);
                Err(Error::LabelConflict(tail, head))
            }
            _ => Ok(()),
        }
    }

    pub fn get(&self, u: VertexId, v: VertexId) -> Option<Labeled> {
        self.edges.get(&key(u, v)).copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Labeled> {
        self.edges.values()
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<RelEntry> = self
            .edges
            .iter()
            .map(|(&(u, v), l)| RelEntry {
                u,
                v,
                set: l.set,
                dir: if l.tail == u { "uv".into() } else { "vu".into() },
            })
            .collect();
        serde_json::to_string(&entries).expect("rel serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let entries: Vec<RelEntry> = serde_json::from_str(text)?;
        let mut rel = Rel::new();
        for e in entries {
            let (tail, head) = match e.dir.as_str() {
                "uv" => (e.u, e.v),
                "vu" => (e.v, e.u),
                other => return Err(Error::InvalidRel(format!("bad dir {other:?}"))),
            };
            rel.insert(e.set, tail, head)?;
        }
        Ok(rel)
    }
}

/// Position of an edge in the ccw block pattern around an interior vertex:
/// T1 out, T2 out, T1 in, T2 in.
pub fn block_class(lab: Labeled, at: VertexId) -> u8 {
    match (lab.set, lab.tail == at) {
        (EdgeSet::T1, true) => 0,
        (EdgeSet::T2, true) => 1,
        (EdgeSet::T1, false) => 2,
        (EdgeSet::T2, false) => 3,
    }
}

/// Whether a cyclic sequence of block classes (with unknowns) can still be
/// completed into four nonempty contiguous blocks in cyclic order 0,1,2,3.
pub fn block_pattern_feasible(seq: &[Option<u8>]) -> bool {
    let n = seq.len();
    let known: Vec<usize> = (0..n).filter(|&i| seq[i].is_some()).collect();
    if known.is_empty() {
        return n >= 4;
    }
    // runs of equal classes among the known entries, in cyclic order
    let mut runs: Vec<(u8, usize, usize)> = Vec::new();
    for &i in &known {
        let c = seq[i].unwrap();
        match runs.last_mut() {
            Some(r) if r.0 == c => r.2 = i,
            _ => runs.push((c, i, i)),
        }
    }
    if runs.len() > 1 && runs[0].0 == runs[runs.len() - 1].0 {
        let last = runs.pop().unwrap();
        runs[0].1 = last.1;
    }
    let k = runs.len();
    let mut seen = [false; 4];
    for r in &runs {
        if std::mem::replace(&mut seen[r.0 as usize], true) {
            return false;
        }
    }
    let unknown_between = |from: usize, to: usize| -> usize {
        // strictly between index `from` and index `to`, walking forward
        let mut count = 0;
        let mut i = (from + 1) % n;
        while i != to {
            if seq[i].is_none() {
                count += 1;
            }
            i = (i + 1) % n;
        }
        count
    };
    if k == 1 {
        // the other three classes fit into any single gap between knowns
        let m = known.len();
        return (0..m).any(|i| unknown_between(known[i], known[(i + 1) % m]) >= 3);
    }
    let mut total = 0;
    for i in 0..k {
        let (c, _, end) = runs[i];
        let (c2, start2, _) = runs[(i + 1) % k];
        let diff = (c2 + 4 - c) % 4;
        total += diff as usize;
        if unknown_between(end, start2) < (diff as usize - 1) {
            return false;
        }
    }
    total == 4
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum RelViolation {
    Unlabeled { u: VertexId, v: VertexId },
    NotInteriorEdge { u: VertexId, v: VertexId },
    Corner { corner: VertexId, u: VertexId, v: VertexId },
    BlockPattern { vertex: VertexId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelReport {
    pub violations: Vec<RelViolation>,
}

impl RelReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_rel(g: &PlaneGraph, r: &Rel) -> RelReport {
    let mut violations = Vec::new();
    let Some(c) = g.corners() else {
        return RelReport { violations: vec![RelViolation::BlockPattern { vertex: 0 }] };
    };
    for lab in r.iter() {
        if !g.has_edge(lab.tail, lab.head) || g.is_exterior_edge(lab.tail, lab.head) {
            violations.push(RelViolation::NotInteriorEdge { u: lab.tail, v: lab.head });
        }
    }
    for (u, v) in g.interior_edges() {
        if r.get(u, v).is_none() {
            violations.push(RelViolation::Unlabeled { u, v });
        }
    }
    let corner_rules = [
        (c.north, EdgeSet::T1, false),
        (c.west, EdgeSet::T2, false),
        (c.south, EdgeSet::T1, true),
        (c.east, EdgeSet::T2, true),
    ];
    for (corner, set, leaving) in corner_rules {
        for &u in g.neighbors(corner) {
            if g.is_exterior_edge(corner, u) {
                continue;
            }
            if let Some(lab) = r.get(corner, u) {
                if lab.set != set || (lab.tail == corner) != leaving {
                    violations.push(RelViolation::Corner { corner, u: lab.tail, v: lab.head });
                }
            }
        }
    }
    for v in g.interior_vertices() {
        let seq: Vec<Option<u8>> = g
            .neighbors(v)
            .iter()
            .map(|&u| r.get(v, u).map(|lab| block_class(lab, v)))
            .collect();
        let complete = seq.iter().all(Option::is_some);
        if complete && !block_pattern_feasible(&seq) {
            violations.push(RelViolation::BlockPattern { vertex: v });
        }
    }
    RelReport { violations }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Which {
    G1,
    G2,
}

/// A face of G1 or G2 split into its two directed sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubFace {
    pub source: VertexId,
    pub sink: VertexId,
    /// The side reached walking counterclockwise from the source: the east
    /// side for G1, the north side for G2. Both sides run source to sink.
    pub ccw_side: Vec<VertexId>,
    pub cw_side: Vec<VertexId>,
    pub is_outer: bool,
}

impl SubFace {
    pub fn side_lengths(&self) -> (usize, usize) {
        (self.ccw_side.len() - 1, self.cw_side.len() - 1)
    }
}

#[derive(Debug, Clone)]
pub struct OrientedSubgraph {
    pub which: Which,
    pub edges: Vec<(VertexId, VertexId)>,
    pub faces: Vec<SubFace>,
    /// Face index to the left of each directed edge.
    pub left_of: HashMap<(VertexId, VertexId), usize>,
    /// Face index to the right of each directed edge.
    pub right_of: HashMap<(VertexId, VertexId), usize>,
    pub outer: usize,
}

pub fn oriented_subgraph(g: &PlaneGraph, r: &Rel, which: Which) -> Result<OrientedSubgraph> {
    let c = g.require_corners()?;
    let set = match which {
        Which::G1 => EdgeSet::T1,
        Which::G2 => EdgeSet::T2,
    };
    let mut edges: Vec<(VertexId, VertexId)> =
        r.iter().filter(|l| l.set == set).map(|l| (l.tail, l.head)).collect();
    edges.extend(match which {
        Which::G1 => [(c.south, c.west), (c.south, c.east), (c.west, c.north), (c.east, c.north)],
        Which::G2 => [(c.south, c.west), (c.north, c.west), (c.east, c.south), (c.east, c.north)],
    });
    let directed: HashMap<(VertexId, VertexId), bool> =
        edges.iter().flat_map(|&(a, b)| [((a, b), true), ((b, a), false)]).collect();
    // restrict the rotation system to the subgraph's edges
    let rotation: Vec<Vec<VertexId>> = (0..g.vertex_count())
        .map(|v| g.neighbors(v).iter().copied().filter(|&u| directed.contains_key(&(v, u))).collect())
        .collect();
    let next_cw = |v: VertexId, u: VertexId| -> VertexId {
        let rot = &rotation[v];
        let p = rot.iter().position(|&x| x == u).unwrap();
        rot[(p + rot.len() - 1) % rot.len()]
    };
    let mut dart_face: HashMap<(VertexId, VertexId), usize> = HashMap::new();
    let mut cycles: Vec<Vec<VertexId>> = Vec::new();
    for &(a0, b0) in &edges {
        for (a, b) in [(a0, b0), (b0, a0)] {
            if dart_face.contains_key(&(a, b)) {
                continue;
            }
            let id = cycles.len();
            let mut cyc = Vec::new();
            let (mut x, mut y) = (a, b);
            while !dart_face.contains_key(&(x, y)) {
                dart_face.insert((x, y), id);
                cyc.push(x);
                let z = next_cw(y, x);
                x = y;
                y = z;
            }
            cycles.push(cyc);
        }
    }
    let outer = dart_face[&(c.south, c.west)];
    let mut faces = Vec::with_capacity(cycles.len());
    for (id, cyc) in cycles.iter().enumerate() {
        let m = cyc.len();
        let fwd = |i: usize| directed[&(cyc[i], cyc[(i + 1) % m])];
        let source = (0..m).find(|&i| fwd(i) && !fwd((i + m - 1) % m));
        let sink = (0..m).find(|&i| !fwd(i) && fwd((i + m - 1) % m));
        let (Some(s), Some(t)) = (source, sink) else {
            return Err(Error::InvalidRel(format!("face {cyc:?} of {which:?} has no source/sink")));
        };
        let walk = |from: usize, to: usize| -> Vec<VertexId> {
            let mut out = vec![cyc[from]];
            let mut i = from;
            while i != to {
                i = (i + 1) % m;
                out.push(cyc[i]);
            }
            out
        };
        let ccw_side = walk(s, t);
        let mut cw_side = walk(t, s);
        cw_side.reverse();
        // every edge on a side must be traversed forward along that side
        let forward_ok = ccw_side.windows(2).all(|w| directed[&(w[0], w[1])])
            && cw_side.windows(2).all(|w| directed[&(w[0], w[1])]);
        if !forward_ok {
            return Err(Error::InvalidRel(format!("face {cyc:?} of {which:?} has several sources")));
        }
        let is_outer = id == outer;
        let (ccw_side, cw_side) = if is_outer {
            // the outer face is traced clockwise; present it like the others
            (cw_side, ccw_side)
        } else {
            (ccw_side, cw_side)
        };
        faces.push(SubFace { source: cyc[s], sink: cyc[t], ccw_side, cw_side, is_outer });
    }
    let mut left_of = HashMap::new();
    let mut right_of = HashMap::new();
    for &(a, b) in &edges {
        left_of.insert((a, b), dart_face[&(a, b)]);
        right_of.insert((a, b), dart_face[&(b, a)]);
    }
    Ok(OrientedSubgraph { which, edges, faces, left_of, right_of, outer })
}

/// A face violating the slant property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlantWitness {
    pub which: Which,
    pub face: SubFace,
}

/// `Ok(None)` when slant; otherwise a face with no two-edge side.
pub fn is_slant(g: &PlaneGraph, r: &Rel) -> Result<Option<SlantWitness>> {
    for which in [Which::G1, Which::G2] {
        let sub = oriented_subgraph(g, r, which)?;
        for f in sub.faces.into_iter().filter(|f| !f.is_outer) {
            let (a, b) = f.side_lengths();
            if a != 2 && b != 2 {
                return Ok(Some(SlantWitness { which, face: f }));
            }
        }
    }
    Ok(None)
}

/// Labels every interior edge from the relative position of its two
/// rectangles: below means T1 upward, right-of means T2 leftward.
pub fn derive_rel_from_layout(g: &PlaneGraph, l: &RectLayout) -> Result<Rel> {
    let mut rel = Rel::new();
    for (u, v) in g.interior_edges() {
        let (ru, rv) = (l.rect(u), l.rect(v));
        let x_overlap = ru.x1.min(rv.x1) - ru.x0.max(rv.x0);
        let y_overlap = ru.y1.min(rv.y1) - ru.y0.max(rv.y0);
        let lab = if ru.y1 == rv.y0 && x_overlap > 0.0 {
            (EdgeSet::T1, u, v)
        } else if rv.y1 == ru.y0 && x_overlap > 0.0 {
            (EdgeSet::T1, v, u)
        } else if ru.x0 == rv.x1 && y_overlap > 0.0 {
            (EdgeSet::T2, u, v)
        } else if rv.x0 == ru.x1 && y_overlap > 0.0 {
            (EdgeSet::T2, v, u)
        } else {
            return Err(Error::BadLayout(format!(
                "rectangles of {u} and {v} do not share a boundary segment"
            )));
        };
        rel.insert(lab.0, lab.1, lab.2)?;
    }
    Ok(rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w1_rel() -> (PlaneGraph, Rel) {
        let g = fixtures::w1();
        let c = g.corners().unwrap();
        let u = g.interior_vertices()[0];
        let mut r = Rel::new();
        r.insert(EdgeSet::T1, c.south, u).unwrap();
        r.insert(EdgeSet::T1, u, c.north).unwrap();
        r.insert(EdgeSet::T2, c.east, u).unwrap();
        r.insert(EdgeSet::T2, u, c.west).unwrap();
        (g, r)
    }

    #[test]
    fn w1_forced_labeling_is_valid() {
        let (g, r) = w1_rel();
        assert!(validate_rel(&g, &r).passed());
    }

    #[test]
    fn w1_wrong_corner_label_fails() {
        let (g, mut r) = w1_rel();
        let c = g.corners().unwrap();
        let u = g.interior_vertices()[0];
        r.edges.insert(key(c.east, u), Labeled { set: EdgeSet::T1, tail: c.east, head: u });
        let report = validate_rel(&g, &r);
        assert!(report.violations.iter().any(|v| matches!(v, RelViolation::Corner { corner, .. } if *corner == c.east)));
    }

    #[test]
    fn w1_subgraphs() {
        let (g, r) = w1_rel();
        for which in [Which::G1, Which::G2] {
            let sub = oriented_subgraph(&g, &r, which).unwrap();
            let inner: Vec<_> = sub.faces.iter().filter(|f| !f.is_outer).collect();
            assert_eq!(inner.len(), 2);
            for f in inner {
                assert_eq!(f.side_lengths(), (2, 2));
            }
        }
        assert_eq!(is_slant(&g, &r).unwrap(), None);
    }

    #[test]
    fn h2_unique_rel_g2_is_a_path() {
        let g = fixtures::h2();
        let c = g.corners().unwrap();
        let (w, e) = (0, 1);
        let mut r = Rel::new();
        for x in [w, e] {
            r.insert(EdgeSet::T1, c.south, x).unwrap();
            r.insert(EdgeSet::T1, x, c.north).unwrap();
        }
        r.insert(EdgeSet::T2, w, c.west).unwrap();
        r.insert(EdgeSet::T2, c.east, e).unwrap();
        r.insert(EdgeSet::T2, e, w).unwrap();
        assert!(validate_rel(&g, &r).passed());
        let g2 = oriented_subgraph(&g, &r, Which::G2).unwrap();
        let inner: Vec<_> = g2.faces.iter().filter(|f| !f.is_outer).collect();
        assert_eq!(inner.len(), 2);
        for f in inner {
            let mut lens = [f.side_lengths().0, f.side_lengths().1];
            lens.sort();
            assert_eq!(lens, [2, 3]);
            assert!(f.ccw_side.contains(&w) || f.cw_side.contains(&w));
        }
        assert_eq!(is_slant(&g, &r).unwrap(), None);
    }

    #[test]
    fn block_pattern_cases() {
        let s = |v: &[i8]| -> Vec<Option<u8>> { v.iter().map(|&x| if x < 0 { None } else { Some(x as u8) }).collect() };
        assert!(block_pattern_feasible(&s(&[0, 1, 2, 3])));
        assert!(block_pattern_feasible(&s(&[1, 2, 3, 0])));
        assert!(block_pattern_feasible(&s(&[0, 0, 1, 2, 2, 3])));
        assert!(!block_pattern_feasible(&s(&[0, 2, 1, 3])));
        assert!(!block_pattern_feasible(&s(&[0, 1, 2, 2])));
        assert!(!block_pattern_feasible(&s(&[0, 1, 0, 2, 3])));
        assert!(block_pattern_feasible(&s(&[0, -1, 2, 3])));
        assert!(!block_pattern_feasible(&s(&[0, 2, -1, 3])));
        assert!(block_pattern_feasible(&s(&[0, -1, -1, -1])));
        assert!(!block_pattern_feasible(&s(&[0, -1, -1])));
        assert!(!block_pattern_feasible(&s(&[3, 2, -1, -1])));
        assert!(block_pattern_feasible(&s(&[1, -1, -1, -1, 1])));
    }

    fn complete_pattern(seq: &[u8]) -> bool {
        let n = seq.len();
        let changes = (0..n).filter(|&i| seq[i] != seq[(i + 1) % n]).count();
        changes == 4 && (0..n).all(|i| seq[(i + 1) % n] == seq[i] || seq[(i + 1) % n] == (seq[i] + 1) % 4)
    }

    #[test]
    fn block_pattern_matches_completion_search() {
        for n in 1..=5usize {
            for code in 0..5usize.pow(n as u32) {
                let seq: Vec<Option<u8>> =
                    (0..n).map(|i| code / 5usize.pow(i as u32) % 5).map(|d| (d < 4).then_some(d as u8)).collect();
                let completable = (0..4usize.pow(n as u32)).any(|fill| {
                    let full: Vec<u8> = (0..n)
                        .map(|i| seq[i].unwrap_or((fill / 4usize.pow(i as u32) % 4) as u8))
                        .collect();
                    (0..n).all(|i| seq[i].is_none() || seq[i] == Some(full[i])) && complete_pattern(&full)
                });
                assert_eq!(block_pattern_feasible(&seq), completable, "{seq:?}");
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let (_, r) = w1_rel();
        assert_eq!(Rel::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn conflicting_insert_is_rejected() {
        let mut r = Rel::new();
        r.insert(EdgeSet::T1, 0, 1).unwrap();
        r.insert(EdgeSet::T1, 0, 1).unwrap();
        assert!(matches!(r.insert(EdgeSet::T2, 1, 0), Err(Error::LabelConflict(1, 0))));
        assert_eq!(r.get(0, 1).unwrap().set, EdgeSet::T1);
    }
}
