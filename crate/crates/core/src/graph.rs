//! Plane graphs given by a rotation system.
//!
//! Every vertex stores its neighbors in counterclockwise order. Faces are
//! traced with the face on the left of each dart, so interior faces come out
//! counterclockwise and the exterior face clockwise.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;

/// The four exterior vertices of an extended graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Corners {
    #[serde(rename = "N")]
    pub north: VertexId,
    #[serde(rename = "W")]
    pub west: VertexId,
    #[serde(rename = "S")]
    pub south: VertexId,
    #[serde(rename = "E")]
    pub east: VertexId,
}

impl Corners {
    /// Corners in counterclockwise order: N, W, S, E.
    pub fn ccw(&self) -> [VertexId; 4] {
        [self.north, self.west, self.south, self.east]
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.ccw().contains(&v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneGraph {
    rotation: Vec<Vec<VertexId>>,
    sorted: Vec<Vec<VertexId>>,
    corners: Option<Corners>,
    labels: Vec<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub boundary: Vec<VertexId>,
    pub is_exterior: bool,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    corners: Option<Corners>,
}

#[derive(Serialize, Deserialize)]
struct VertexDoc {
    id: VertexId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    neighbors_ccw: Vec<VertexId>,
}

impl PlaneGraph {
    /// Builds a graph from a ccw rotation system, checking symmetry and
    /// duplicate neighbors. The rotation is kept exactly as given.
    pub fn new(rotation: Vec<Vec<VertexId>>, corners: Option<Corners>) -> Result<Self> {
        let n = rotation.len();
        let mut sorted = Vec::with_capacity(n);
        for (v, nbrs) in rotation.iter().enumerate() {
            let mut s = nbrs.clone();
            s.sort_unstable();
            for w in s.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::DuplicateNeighbor { vertex: v, neighbor: w[0] });
                }
            }
            for &u in nbrs {
                if u >= n {
                    return Err(Error::VertexId { count: n, found: u });
                }
                if u == v {
                    return Err(Error::SelfLoop(v));
                }
            }
            sorted.push(s);
        }
        for (v, nbrs) in rotation.iter().enumerate() {
            for &u in nbrs {
                if sorted[u].binary_search(&v).is_err() {
                    return Err(Error::AsymmetricAdjacency { from: v, to: u });
                }
            }
        }
        if let Some(c) = corners {
            let ids = c.ccw();
            if ids.iter().any(|&x| x >= n) {
                return Err(Error::VertexId { count: n, found: *ids.iter().max().unwrap() });
            }
            let set: BTreeSet<_> = ids.iter().collect();
            if set.len() != 4 {
                return Err(Error::CornersNotDistinct);
            }
        }
        Ok(Self { rotation, sorted, corners, labels: vec![None; n] })
    }

    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Self {
        assert_eq!(labels.len(), self.vertex_count());
        self.labels = labels;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text)?;
        let n = doc.vertices.len();
        let mut rotation = vec![None; n];
        let mut labels = vec![None; n];
        for vd in doc.vertices {
            if vd.id >= n {
                return Err(Error::VertexId { count: n, found: vd.id });
            }
            if rotation[vd.id].is_some() {
                return Err(Error::VertexId { count: n, found: vd.id });
            }
            rotation[vd.id] = Some(vd.neighbors_ccw);
            labels[vd.id] = vd.label;
        }
        let rotation: Vec<Vec<VertexId>> = rotation.into_iter().map(|r| r.unwrap_or_default()).collect();
        let corners = doc.corners.ok_or(Error::MissingCorners)?;
        Ok(Self::new(rotation, Some(corners))?.with_labels(labels))
    }

    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            vertices: (0..self.vertex_count())
                .map(|v| VertexDoc {
                    id: v,
                    label: self.labels[v].clone(),
                    neighbors_ccw: self.rotation[v].clone(),
                })
                .collect(),
            corners: self.corners,
        };
        serde_json::to_string_pretty(&doc).expect("graph serializes")
    }

    pub fn vertex_count(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_count(&self) -> usize {
        self.rotation.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn corners(&self) -> Option<Corners> {
        self.corners
    }

    pub fn require_corners(&self) -> Result<Corners> {
        self.corners.ok_or(Error::MissingCorners)
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels[v].as_deref()
    }

    /// Label if present, otherwise the numeric id.
    pub fn name(&self, v: VertexId) -> String {
        self.labels[v].clone().unwrap_or_else(|| v.to_string())
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.rotation[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.sorted[u].binary_search(&v).is_ok()
    }

    /// Undirected edges with `u < v`, in increasing order.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.vertex_count() {
            for &v in &self.sorted[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn position(&self, v: VertexId, u: VertexId) -> usize {
        self.rotation[v]
            .iter()
            .position(|&x| x == u)
            .unwrap_or_else(|| panic!("{u} is not a neighbor of {v}"))
    }

    /// Neighbor of `v` following `u` in ccw order.
    pub fn next_ccw(&self, v: VertexId, u: VertexId) -> VertexId {
        let r = &self.rotation[v];
        r[(self.position(v, u) + 1) % r.len()]
    }

    /// Neighbor of `v` following `u` in cw order.
    pub fn next_cw(&self, v: VertexId, u: VertexId) -> VertexId {
        let r = &self.rotation[v];
        r[(self.position(v, u) + r.len() - 1) % r.len()]
    }

    /// Neighbors of `v` strictly between `from` and `to`, walking ccw.
    pub fn ccw_between(&self, v: VertexId, from: VertexId, to: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut x = self.next_ccw(v, from);
        while x != to {
            if x == from {
                break;
            }
            out.push(x);
            x = self.next_ccw(v, x);
        }
        out
    }

    /// Neighbors of `v` strictly between `from` and `to`, walking cw.
    pub fn cw_between(&self, v: VertexId, from: VertexId, to: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut x = self.next_cw(v, from);
        while x != to {
            if x == from {
                break;
            }
            out.push(x);
            x = self.next_cw(v, x);
        }
        out
    }

    pub fn is_corner(&self, v: VertexId) -> bool {
        self.corners.is_some_and(|c| c.contains(v))
    }

    /// One of the four frame edges N-W, W-S, S-E, E-N.
    pub fn is_exterior_edge(&self, u: VertexId, v: VertexId) -> bool {
        let Some(c) = self.corners else { return false };
        let ring = c.ccw();
        (0..4).any(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % 4]);
            (a, b) == (u, v) || (b, a) == (u, v)
        })
    }

    pub fn interior_edges(&self) -> Vec<(VertexId, VertexId)> {
        self.edges()
            .into_iter()
            .filter(|&(u, v)| !self.is_exterior_edge(u, v))
            .collect()
    }

    pub fn interior_vertices(&self) -> Vec<VertexId> {
        (0..self.vertex_count()).filter(|&v| !self.is_corner(v)).collect()
    }

    /// Traces every face of the rotation system. The exterior face is the
    /// one containing all four corners (or, without corners, the longest
    /// face traced clockwise).
    pub fn compute_faces(&self) -> Result<Vec<Face>> {
        let boundaries = self.trace_faces();
        let v = self.vertex_count() as i64;
        let e = self.edge_count() as i64;
        let f = boundaries.len() as i64;
        if v - e + f != 2 {
            return Err(Error::NotPlanar(v - e + f));
        }
        let exterior = match self.corners {
            Some(c) => boundaries.iter().position(|b| c.ccw().iter().all(|x| b.contains(x))),
            None => self.exterior_index(&boundaries),
        };
        Ok(boundaries
            .into_iter()
            .enumerate()
            .map(|(i, boundary)| Face { boundary, is_exterior: Some(i) == exterior })
            .collect())
    }

    fn trace_faces(&self) -> Vec<Vec<VertexId>> {
        let mut seen: HashSet<(VertexId, VertexId)> = HashSet::new();
        let mut faces = Vec::new();
        for u in 0..self.vertex_count() {
            for &v in &self.rotation[u] {
                if seen.contains(&(u, v)) {
                    continue;
                }
                let mut boundary = Vec::new();
                let (mut a, mut b) = (u, v);
                while seen.insert((a, b)) {
                    boundary.push(a);
                    let c = self.next_cw(b, a);
                    a = b;
                    b = c;
                }
                faces.push(boundary);
            }
        }
        faces
    }

    /// Without corners: the face with negative signed orientation cannot be
    /// detected combinatorially, so pick the longest face as a heuristic.
    fn exterior_index(&self, faces: &[Vec<VertexId>]) -> Option<usize> {
        faces.iter().enumerate().max_by_key(|(_, f)| f.len()).map(|(i, _)| i)
    }

    /// Exterior face boundary in clockwise order.
    pub fn exterior_boundary(&self) -> Result<Vec<VertexId>> {
        let faces = self.compute_faces()?;
        faces
            .into_iter()
            .find(|f| f.is_exterior)
            .map(|f| f.boundary)
            .ok_or_else(|| Error::NotProperTriangular("no exterior face".into()))
    }
}

/// One reason a graph fails to be proper triangular.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    MissingCorners,
    NotPlanar { euler: i64 },
    CornersNotOnExterior,
    NonTriangularFace { boundary: Vec<VertexId> },
    ExteriorNotQuadrangle { length: usize },
    SeparatingTriangle { triangle: [VertexId; 3] },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_proper_triangular(g: &PlaneGraph) -> ValidationReport {
    let mut violations = Vec::new();
    let Some(corners) = g.corners() else {
        return ValidationReport { violations: vec![Violation::MissingCorners] };
    };
    let faces = match g.compute_faces() {
        Ok(f) => f,
        Err(Error::NotPlanar(euler)) => {
            return ValidationReport { violations: vec![Violation::NotPlanar { euler }] }
        }
        Err(_) => unreachable!(),
    };
    match faces.iter().find(|f| f.is_exterior) {
        None => violations.push(Violation::CornersNotOnExterior),
        Some(f) => {
            if f.boundary.len() != 4 {
                violations.push(Violation::ExteriorNotQuadrangle { length: f.boundary.len() });
            } else {
                // clockwise traversal of a ccw N,W,S,E ring
                let ring = corners.ccw();
                let start = f.boundary.iter().position(|&x| x == ring[0]).unwrap();
                let cw: Vec<_> = (0..4).map(|i| f.boundary[(start + i) % 4]).collect();
                if cw != [ring[0], ring[3], ring[2], ring[1]] {
                    violations.push(Violation::CornersNotOnExterior);
                }
            }
        }
    }
    for f in faces.iter().filter(|f| !f.is_exterior) {
        if f.boundary.len() != 3 {
            violations.push(Violation::NonTriangularFace { boundary: f.boundary.clone() });
        }
    }
    for t in find_separating_triangles(g) {
        violations.push(Violation::SeparatingTriangle { triangle: t });
    }
    ValidationReport { violations }
}

/// All 3-cycles that are not face boundaries, as sorted triples.
pub fn find_separating_triangles(g: &PlaneGraph) -> Vec<[VertexId; 3]> {
    let face_set: HashSet<[VertexId; 3]> = g
        .trace_faces()
        .into_iter()
        .filter(|b| b.len() == 3)
        .map(|b| {
            let mut t = [b[0], b[1], b[2]];
            t.sort_unstable();
            t
        })
        .collect();
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        for &w in &g.sorted[v] {
            if w > v && g.has_edge(u, w) {
                let t = [u, v, w];
                if !face_set.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Adds the four frame vertices around `g`. `a, b, c, d` are the boundary
/// vertices that become the southwest, northwest, northeast and southeast
/// corners; they must appear on the exterior face in clockwise order.
pub fn extend_graph(
    g: &PlaneGraph,
    a: VertexId,
    b: VertexId,
    c: VertexId,
    d: VertexId,
) -> Result<PlaneGraph> {
    let ids = [a, b, c, d];
    if ids.iter().collect::<BTreeSet<_>>().len() != 4 {
        return Err(Error::NotOnExterior(ids.to_vec()));
    }
    let boundary = {
        let faces = PlaneGraph { corners: None, ..g.clone() }.compute_faces()?;
        faces.into_iter().find(|f| f.is_exterior).map(|f| f.boundary).unwrap_or_default()
    };
    let m = boundary.len();
    let pos = |x: VertexId| boundary.iter().position(|&y| y == x);
    let Some(pa) = pos(a) else { return Err(Error::NotOnExterior(ids.to_vec())) };
    let rotated: Vec<VertexId> = (0..m).map(|i| boundary[(pa + i) % m]).collect();
    let idx = |x: VertexId| rotated.iter().position(|&y| y == x);
    let (Some(ib), Some(ic), Some(id)) = (idx(b), idx(c), idx(d)) else {
        return Err(Error::NotOnExterior(ids.to_vec()));
    };
    if !(ib < ic && ic < id) {
        return Err(Error::NotOnExterior(ids.to_vec()));
    }

    let n = g.vertex_count();
    let (vw, vn, ve, vs) = (n, n + 1, n + 2, n + 3);
    let span = |from: usize, to: usize| -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut i = from;
        loop {
            out.push(rotated[i % m]);
            if i % m == to % m {
                break;
            }
            i += 1;
        }
        out
    };
    let west = span(0, ib);
    let north = span(ib, ic);
    let east = span(ic, id);
    let south = span(id, m);

    let mut rotation: Vec<Vec<VertexId>> = g.rotation.clone();
    // New neighbors go into the exterior wedge of each boundary vertex,
    // right after its clockwise successor on the boundary.
    for i in 0..m {
        let x = rotated[i];
        let succ = rotated[(i + 1) % m];
        let mut added = Vec::new();
        let in_west = west.contains(&x);
        let in_north = north.contains(&x);
        let in_east = east.contains(&x);
        let in_south = south.contains(&x);
        // ccw order inside the exterior wedge
        if x == a {
            added.extend([vw, vs]);
        } else if x == b {
            added.extend([vn, vw]);
        } else if x == c {
            added.extend([ve, vn]);
        } else if x == d {
            added.extend([vs, ve]);
        } else if in_west {
            added.push(vw);
        } else if in_north {
            added.push(vn);
        } else if in_east {
            added.push(ve);
        } else if in_south {
            added.push(vs);
        }
        let r = &mut rotation[x];
        let at = if r.is_empty() {
            0
        } else {
            r.iter().position(|&y| y == succ).map(|p| p + 1).unwrap_or(r.len())
        };
        for (k, v) in added.into_iter().enumerate() {
            r.insert(at + k, v);
        }
    }
    let mut rw = vec![vn, vs];
    rw.extend(&west);
    let mut rn = vec![ve, vw];
    rn.extend(&north);
    let mut re = vec![vs, vn];
    re.extend(&east);
    let mut rs = vec![vw, ve];
    rs.extend(&south);
    rotation.extend([rw, rn, re, rs]);

    let mut labels = g.labels.clone();
    labels.extend(["vW", "vN", "vE", "vS"].map(|s| Some(s.to_string())));
    let corners = Corners { north: vn, west: vw, south: vs, east: ve };
    Ok(PlaneGraph::new(rotation, Some(corners))?.with_labels(labels))
}
