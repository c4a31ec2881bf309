//! Fans, mirror-fans and the explicit cut world they act on.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{PlaneGraph, VertexId};
use crate::rel::{EdgeSet, Rel};

pub type Edge = (VertexId, VertexId);
pub type GadgetId = usize;
/// A path from vS to vN.
pub type Cut = Vec<VertexId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GadgetKind {
    Fan,
    MirrorFan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GadgetKey {
    pub kind: GadgetKind,
    pub low: VertexId,
    pub mid: VertexId,
    pub high: VertexId,
}

impl GadgetKey {
    pub fn fan(low: VertexId, mid: VertexId, high: VertexId) -> Self {
        Self { kind: GadgetKind::Fan, low, mid, high }
    }

    pub fn mirror(low: VertexId, mid: VertexId, high: VertexId) -> Self {
        Self { kind: GadgetKind::MirrorFan, low, mid, high }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gadget {
    #[serde(flatten)]
    pub key: GadgetKey,
    /// Front boundary, low to high.
    pub alpha: Vec<VertexId>,
    /// Back boundary, low to high.
    pub beta: Vec<VertexId>,
    /// Inner edges, directed as T2.
    pub gamma: Vec<Edge>,
    /// False when α passes through vS or vN.
    pub usable: bool,
}

fn path_edges(p: &[VertexId]) -> Vec<Edge> {
    p.windows(2).map(|w| (w[0], w[1])).collect()
}

impl Gadget {
    pub fn alpha_edges(&self) -> Vec<Edge> {
        path_edges(&self.alpha)
    }

    pub fn beta_edges(&self) -> Vec<Edge> {
        path_edges(&self.beta)
    }

    pub fn is_fan(&self) -> bool {
        self.key.kind == GadgetKind::Fan
    }

    fn first_beta(&self) -> Edge {
        (self.beta[0], self.beta[1])
    }

    fn last_beta(&self) -> Edge {
        let k = self.beta.len();
        (self.beta[k - 2], self.beta[k - 1])
    }

    fn first_alpha(&self) -> Edge {
        (self.alpha[0], self.alpha[1])
    }

    fn last_alpha(&self) -> Edge {
        let k = self.alpha.len();
        (self.alpha[k - 2], self.alpha[k - 1])
    }

    /// Position of a directed edge in α.
    pub fn alpha_position(&self, e: Edge) -> Option<usize> {
        self.alpha.windows(2).position(|w| (w[0], w[1]) == e)
    }

    /// Labels contributed by this gadget: α and β upward in T1, γ in T2.
    /// Frame edges are skipped.
    pub fn labels(&self, g: &PlaneGraph) -> Vec<(EdgeSet, VertexId, VertexId)> {
        let mut out = Vec::new();
        for (a, b) in self.alpha_edges().into_iter().chain(self.beta_edges()) {
            if !g.is_exterior_edge(a, b) {
                out.push((EdgeSet::T1, a, b));
            }
        }
        out.extend(self.gamma.iter().map(|&(a, b)| (EdgeSet::T2, a, b)));
        out
    }
}

fn chord_free_path(g: &PlaneGraph, p: &[VertexId]) -> bool {
    if p.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
        return false;
    }
    for i in 0..p.len() {
        for j in i + 2..p.len() {
            if g.has_edge(p[i], p[j]) {
                return false;
            }
        }
    }
    true
}

fn make(g: &PlaneGraph, key: GadgetKey) -> Option<Gadget> {
    let GadgetKey { kind, low, mid, high } = key;
    if low == high || !g.has_edge(mid, low) || !g.has_edge(mid, high) || g.has_edge(low, high) {
        return None;
    }
    let between = match kind {
        GadgetKind::Fan => g.cw_between(mid, low, high),
        GadgetKind::MirrorFan => g.ccw_between(mid, low, high),
    };
    if between.is_empty() || (kind == GadgetKind::MirrorFan && between.len() < 2) {
        return None;
    }
    let mut path = vec![low];
    path.extend(&between);
    path.push(high);
    if !chord_free_path(g, &path) {
        return None;
    }
    let three = vec![low, mid, high];
    let (alpha, beta, gamma) = match kind {
        GadgetKind::Fan => (path, three, between.iter().map(|&v| (mid, v)).collect()),
        GadgetKind::MirrorFan => (three, path, between.iter().map(|&v| (v, mid)).collect()),
    };
    let corners = g.corners();
    let usable = !alpha[1..alpha.len() - 1]
        .iter()
        .any(|&v| corners.is_some_and(|c| v == c.south || v == c.north));
    Some(Gadget { key, alpha, beta, gamma, usable })
}

/// Every gadget of `g`, sorted by key.
#[derive(Debug, Clone)]
pub struct GadgetSet {
    pub gadgets: Vec<Gadget>,
    index: HashMap<GadgetKey, GadgetId>,
    /// Gadgets whose α contains a given directed edge.
    alpha_owners: HashMap<Edge, Vec<GadgetId>>,
    /// Gadgets whose β contains a given directed edge.
    beta_owners: HashMap<Edge, Vec<GadgetId>>,
}

impl GadgetSet {
    pub fn get(&self, key: GadgetKey) -> Option<GadgetId> {
        self.index.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.gadgets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gadgets.is_empty()
    }

    pub fn with_alpha_edge(&self, e: Edge) -> &[GadgetId] {
        self.alpha_owners.get(&e).map_or(&[], Vec::as_slice)
    }

    pub fn with_beta_edge(&self, e: Edge) -> &[GadgetId] {
        self.beta_owners.get(&e).map_or(&[], Vec::as_slice)
    }
}

pub fn enumerate_gadgets(g: &PlaneGraph) -> GadgetSet {
    let mut gadgets = Vec::new();
    for mid in 0..g.vertex_count() {
        for &low in g.neighbors(mid) {
            for &high in g.neighbors(mid) {
                for kind in [GadgetKind::Fan, GadgetKind::MirrorFan] {
                    if let Some(gad) = make(g, GadgetKey { kind, low, mid, high }) {
                        gadgets.push(gad);
                    }
                }
            }
        }
    }
    gadgets.sort_by_key(|x: &Gadget| x.key);
    let index = gadgets.iter().enumerate().map(|(i, x)| (x.key, i)).collect();
    let mut alpha_owners: HashMap<Edge, Vec<GadgetId>> = HashMap::new();
    let mut beta_owners: HashMap<Edge, Vec<GadgetId>> = HashMap::new();
    for (i, x) in gadgets.iter().enumerate() {
        for e in x.alpha_edges() {
            alpha_owners.entry(e).or_default().push(i);
        }
        for e in x.beta_edges() {
            beta_owners.entry(e).or_default().push(i);
        }
    }
    GadgetSet { gadgets, index, alpha_owners, beta_owners }
}

/// Σ 2·deg(v)·(deg(v) − 3) over all vertices.
pub fn gadget_count_bound(g: &PlaneGraph) -> usize {
    (0..g.vertex_count()).map(|v| 2 * g.degree(v) * g.degree(v).saturating_sub(3)).sum()
}

/// The starting gadget F(vS, vE, vN).
pub fn initial_key(g: &PlaneGraph) -> Result<GadgetKey> {
    let c = g.require_corners()?;
    Ok(GadgetKey::fan(c.south, c.east, c.north))
}

/// The gadget whose front boundary is vS → vW → vN.
pub fn terminal_key(g: &PlaneGraph) -> Result<GadgetKey> {
    let c = g.require_corners()?;
    if g.degree(c.west) == 3 {
        let u = *g.neighbors(c.west).iter().find(|&&x| !g.is_corner(x)).unwrap();
        Ok(GadgetKey::fan(c.south, u, c.north))
    } else {
        Ok(GadgetKey::mirror(c.south, c.west, c.north))
    }
}

fn is_subpath(inner: &[VertexId], outer: &[VertexId]) -> Option<usize> {
    outer.windows(inner.len()).position(|w| w == inner)
}

/// Replaces β(g) on the cut by α(g).
pub fn stitch(cut: &[VertexId], gad: &Gadget) -> Result<Cut> {
    let unsuitable = |reason: &str| Error::Unsuitable { gadget: format!("{:?}", gad.key), reason: reason.into() };
    let pos = is_subpath(&gad.beta, cut).ok_or_else(|| unsuitable("back boundary is not on the cut"))?;
    let inner = &gad.alpha[1..gad.alpha.len() - 1];
    if inner.iter().any(|v| cut.contains(v)) {
        return Err(unsuitable("front boundary meets the cut"));
    }
    let mut out = cut[..pos].to_vec();
    out.extend(&gad.alpha);
    out.extend(&cut[pos + gad.beta.len()..]);
    Ok(out)
}

/// Side-length classes of an open face: 1 means exactly one edge, 2 means
/// two or more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OpenFaceKind {
    pub lower: u8,
    pub upper: u8,
}

impl OpenFaceKind {
    pub fn from_lengths(lower: usize, upper: usize) -> Self {
        Self { lower: lower.min(2) as u8, upper: upper.min(2) as u8 }
    }

    /// Both sides already longer than one edge: the face can no longer
    /// close with a two-edge side.
    pub fn is_violation(&self) -> bool {
        self.lower == 2 && self.upper == 2
    }
}

/// Kind of the open face of the α edge at `position`, for a provider
/// whose front boundary has `alpha_len` edges.
pub fn classify_open_face(kind: GadgetKind, position: usize, alpha_len: usize) -> OpenFaceKind {
    let (lower, upper) = if position == 0 {
        (1, 2)
    } else if position + 1 == alpha_len {
        (2, 1)
    } else {
        (1, 1)
    };
    debug_assert!(kind == GadgetKind::Fan || position == 0 || position + 1 == alpha_len);
    OpenFaceKind { lower, upper }
}

pub fn is_forbidden_pair(g: &Gadget, other: &Gadget) -> bool {
    g.first_beta() == other.last_alpha() || g.last_beta() == other.first_alpha()
}

fn edges_within(inner: &[VertexId], outer: &[VertexId]) -> bool {
    let set: HashSet<Edge> = path_edges(outer).into_iter().collect();
    path_edges(inner).iter().all(|e| set.contains(e))
}

pub fn is_g_pair(low: &Gadget, high: &Gadget) -> bool {
    edges_within(&low.beta, &high.alpha)
}

pub fn is_m_triple(lower: &Gadget, mid: &Gadget, upper: &Gadget) -> bool {
    mid.key.kind == GadgetKind::MirrorFan
        && lower.alpha_position(mid.first_beta()).is_some()
        && upper.alpha_position(mid.last_beta()).is_some()
        && !is_forbidden_pair(mid, lower)
        && !is_forbidden_pair(mid, upper)
}

/// Where a cut edge came from and the exact side lengths of its open face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CutEdge {
    pub provider: GadgetId,
    pub position: usize,
    pub lower: usize,
    pub upper: usize,
}

/// A partial labeling given explicitly by its cut, the gadgets stitched so
/// far, and the exact lengths of every open face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitState {
    pub cut: Cut,
    pub edges: Vec<CutEdge>,
    pub used: BTreeSet<GadgetId>,
    /// Side lengths of every face closed so far that lacks a two-edge side.
    pub broken: Vec<(usize, usize)>,
}

impl ExplicitState {
    /// The state right after stitching F(vS, vE, vN) onto vS → vE → vN.
    pub fn initial(g: &PlaneGraph, set: &GadgetSet) -> Result<Self> {
        let c = g.require_corners()?;
        let id = set
            .get(initial_key(g)?)
            .ok_or_else(|| Error::Reconstruction("F(vS, vE, vN) is not a gadget".into()))?;
        let start = ExplicitState {
            cut: vec![c.south, c.east, c.north],
            edges: vec![
                CutEdge { provider: usize::MAX, position: 0, lower: 1, upper: 0 },
                CutEdge { provider: usize::MAX, position: 1, lower: 0, upper: 1 },
            ],
            used: BTreeSet::new(),
            broken: Vec::new(),
        };
        start.apply(g, set, id)
    }

    pub fn support(&self) -> BTreeSet<GadgetId> {
        self.edges.iter().map(|e| e.provider).filter(|&p| p != usize::MAX).collect()
    }

    pub fn is_partial_slant(&self) -> bool {
        self.broken.is_empty() && self.edges.iter().all(|e| e.lower.min(e.upper) <= 1)
    }

    pub fn is_complete(&self, g: &PlaneGraph) -> bool {
        let c = g.corners().unwrap();
        self.cut == [c.south, c.west, c.north]
    }

    pub fn suitable(&self, gad: &Gadget) -> bool {
        gad.usable && stitch(&self.cut, gad).is_ok()
    }

    /// Stitches gadget `id`, tracking open-face lengths. Faces of G2 that
    /// close are recorded in `broken` when neither side has two edges.
    pub fn apply(&self, g: &PlaneGraph, set: &GadgetSet, id: GadgetId) -> Result<Self> {
        let gad = &set.gadgets[id];
        let cut = stitch(&self.cut, gad)?;
        let pos = is_subpath(&gad.beta, &self.cut).unwrap();
        let k = gad.beta.len() - 1;
        let old = &self.edges[pos..pos + k];
        let m = gad.alpha.len() - 1;
        let mut broken = self.broken.clone();
        let mut close = |lower: usize, upper: usize| {
            if lower != 2 && upper != 2 {
                broken.push((lower, upper));
            }
        };
        let mut fresh = Vec::with_capacity(m);
        for i in 0..m {
            let (lower, upper) = match (gad.key.kind, i) {
                (GadgetKind::Fan, 0) => (old[0].lower, old[0].upper + 1),
                (GadgetKind::Fan, i) if i + 1 == m => (old[1].lower + 1, old[1].upper),
                (GadgetKind::Fan, _) => (1, 1),
                (GadgetKind::MirrorFan, 0) => (old[0].lower, old[0].upper + 1),
                (GadgetKind::MirrorFan, _) => (old[k - 1].lower + 1, old[k - 1].upper),
            };
            let (a, b) = (gad.alpha[i], gad.alpha[i + 1]);
            if g.is_exterior_edge(a, b) {
                // a frame edge belongs to G2 as well and closes the face
                close(lower + 1, upper + 1);
            }
            fresh.push(CutEdge { provider: id, position: i, lower, upper });
        }
        if gad.key.kind == GadgetKind::MirrorFan {
            for e in &old[1..k - 1] {
                close(e.lower + 1, e.upper + 1);
            }
        }
        let mut edges = self.edges[..pos].to_vec();
        edges.extend(fresh);
        edges.extend_from_slice(&self.edges[pos + k..]);
        let mut used = self.used.clone();
        used.insert(id);
        Ok(ExplicitState { cut, edges, used, broken })
    }

    /// The labeling assembled from the stitched gadgets.
    pub fn rel(&self, g: &PlaneGraph, set: &GadgetSet) -> Result<Rel> {
        assemble_rel(g, set, self.used.iter().copied())
    }
}

/// Union of the labels of the given gadgets.
pub fn assemble_rel(g: &PlaneGraph, set: &GadgetSet, ids: impl IntoIterator<Item = GadgetId>) -> Result<Rel> {
    let mut rel = Rel::new();
    for id in ids {
        for (s, a, b) in set.gadgets[id].labels(g) {
            rel.insert(s, a, b)?;
        }
    }
    Ok(rel)
}

/// Validity of stitching `gad` by the pair/triple criterion: a G-pair with
/// a supporting gadget, or an M-triple between two supporting gadgets.
pub fn check_valid_extension(state: &ExplicitState, set: &GadgetSet, id: GadgetId) -> Result<bool> {
    let gad = &set.gadgets[id];
    if stitch(&state.cut, gad).is_err() {
        return Err(Error::Unsuitable { gadget: format!("{:?}", gad.key), reason: "not stitchable".into() });
    }
    let support = state.support();
    let pair = support.iter().any(|&r| is_g_pair(gad, &set.gadgets[r]));
    let triple = gad.key.kind == GadgetKind::MirrorFan
        && support.iter().any(|&b| {
            support.iter().any(|&u| is_m_triple(&set.gadgets[b], gad, &set.gadgets[u]))
        });
    Ok(pair || triple)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::validate_proper_triangular;

    #[test]
    fn w1_gadgets() {
        let g = fixtures::w1();
        let c = g.corners().unwrap();
        let set = enumerate_gadgets(&g);
        let g0 = set.get(initial_key(&g).unwrap()).unwrap();
        assert_eq!(set.gadgets[g0].alpha, vec![c.south, 0, c.north]);
        // a mirror-fan around u with one inner edge is a fan
        assert!(set.get(GadgetKey::mirror(c.south, 0, c.north)).is_none());
        let gt = set.get(terminal_key(&g).unwrap()).unwrap();
        assert_eq!(set.gadgets[gt].key, GadgetKey::fan(c.south, 0, c.north));
        assert_eq!(set.gadgets[gt].alpha, vec![c.south, c.west, c.north]);
        assert!(is_g_pair(&set.gadgets[gt], &set.gadgets[g0]));
        assert!(!is_g_pair(&set.gadgets[g0], &set.gadgets[g0]));
        assert!(set.len() <= gadget_count_bound(&g));
    }

    #[test]
    fn w1_explicit_run() {
        let g = fixtures::w1();
        let set = enumerate_gadgets(&g);
        let s = ExplicitState::initial(&g, &set).unwrap();
        let gt = set.get(terminal_key(&g).unwrap()).unwrap();
        assert!(check_valid_extension(&s, &set, gt).unwrap());
        let done = s.apply(&g, &set, gt).unwrap();
        assert!(done.is_complete(&g));
        assert!(done.is_partial_slant());
        assert_eq!(done.rel(&g, &set).unwrap(), fixtures::w1_rel());
    }

    #[test]
    fn stitch_errors() {
        let g = fixtures::w1();
        let c = g.corners().unwrap();
        let set = enumerate_gadgets(&g);
        let gt = &set.gadgets[set.get(terminal_key(&g).unwrap()).unwrap()];
        assert!(stitch(&[c.south, c.east, c.north], gt).is_err());
        assert_eq!(stitch(&[c.south, 0, c.north], gt).unwrap(), vec![c.south, c.west, c.north]);
    }

    #[test]
    fn open_face_classes() {
        assert_eq!(classify_open_face(GadgetKind::Fan, 1, 3), OpenFaceKind { lower: 1, upper: 1 });
        assert_eq!(classify_open_face(GadgetKind::MirrorFan, 0, 2), OpenFaceKind { lower: 1, upper: 2 });
        assert_eq!(classify_open_face(GadgetKind::Fan, 2, 3), OpenFaceKind { lower: 2, upper: 1 });
        assert!(OpenFaceKind::from_lengths(3, 2).is_violation());
    }

    #[test]
    fn p5_gadget_paths_are_chord_free() {
        let g = fixtures::p5();
        assert!(validate_proper_triangular(&g).passed());
        let set = enumerate_gadgets(&g);
        for gad in &set.gadgets {
            let path = if gad.is_fan() { &gad.alpha } else { &gad.beta };
            for i in 0..path.len() {
                for j in i + 1..path.len() {
                    assert_eq!(g.has_edge(path[i], path[j]), j == i + 1, "{:?}", gad.key);
                }
            }
            assert!(!g.has_edge(gad.key.low, gad.key.high));
        }
        assert!(set.len() <= gadget_count_bound(&g));
    }
}
