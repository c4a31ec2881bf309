//! Pockets of connections that meet a path in pieces, and the auxiliary
//! graphs on which they are checked.
//!
//! A pocket is the region between a stretch `L(a, b)` of the path and the
//! stretch of the connection's front boundary between the same two
//! vertices, when the two stretches share nothing else. The auxiliary
//! graph keeps the pocket, the faces of the connection's gadgets and a
//! frame: the east corner is the middle vertex of the outer fan (or a new
//! vertex fanned to the east side), the west corner a new vertex fanned to
//! the path `α(Λ)(a', a) + L(a, b) + α(Λ)(b, b')`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::connection::{front_boundary, Connection};
use crate::error::{Error, Result};
use super::{run_on_gadgets, RunOptions};
use crate::gadget::{enumerate_gadgets, terminal_key, GadgetId, GadgetKey, GadgetKind, GadgetSet};
use crate::graph::{validate_proper_triangular, Corners, PlaneGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pocket {
    pub connection: Connection,
    pub a: VertexId,
    pub b: VertexId,
    /// `L(a, b)`.
    pub along_path: Vec<VertexId>,
    /// `α(Λ)(a, b)`.
    pub along_front: Vec<VertexId>,
    /// Inner faces of the pocket, counterclockwise.
    pub faces: Vec<Vec<VertexId>>,
    /// Vertices of the closed pocket.
    pub vertices: BTreeSet<VertexId>,
}

type DartFaces = (Vec<Vec<VertexId>>, HashMap<(VertexId, VertexId), usize>);

/// Counterclockwise boundary of every inner face, keyed by its darts.
fn dart_faces(g: &PlaneGraph) -> Result<DartFaces> {
    let faces: Vec<Vec<VertexId>> = g.compute_faces()?.into_iter().map(|f| if f.is_exterior { Vec::new() } else { f.boundary }).collect();
    let mut darts = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        for k in 0..f.len() {
            darts.insert((f[k], f[(k + 1) % f.len()]), i);
        }
    }
    Ok((faces, darts))
}

/// Faces to the east of a south-to-north path `west` and to the west of a
/// south-to-north path `east` sharing both ends. None if the region is
/// not closed off by the two paths.
fn enclosed_faces(g: &PlaneGraph, west: &[VertexId], east: &[VertexId]) -> Result<Option<Vec<Vec<VertexId>>>> {
    let (faces, darts) = dart_faces(g)?;
    let mut wall: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut seeds = Vec::new();
    for w in west.windows(2) {
        wall.insert((w[0].min(w[1]), w[0].max(w[1])));
        seeds.push(darts.get(&(w[1], w[0])));
    }
    for w in east.windows(2) {
        wall.insert((w[0].min(w[1]), w[0].max(w[1])));
        seeds.push(darts.get(&(w[0], w[1])));
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        let Some(&f) = s else { return Ok(None) };
        if faces[f].is_empty() {
            return Ok(None);
        }
        if seen.insert(f) {
            queue.push_back(f);
        }
    }
    while let Some(f) = queue.pop_front() {
        let b = &faces[f];
        for k in 0..b.len() {
            let (x, y) = (b[k], b[(k + 1) % b.len()]);
            if wall.contains(&(x.min(y), x.max(y))) {
                continue;
            }
            let Some(&h) = darts.get(&(y, x)) else { return Ok(None) };
            if faces[h].is_empty() {
                return Ok(None);
            }
            if seen.insert(h) {
                queue.push_back(h);
            }
        }
    }
    Ok(Some(seen.into_iter().map(|f| faces[f].clone()).collect()))
}

/// Every pocket of `conn` on `l`, ordered along `l`. Stretches where the
/// front boundary comes back to `l` lower than it left are not pockets
/// and are skipped.
pub fn find_pockets(g: &PlaneGraph, set: &GadgetSet, conn: &Connection, l: &[VertexId]) -> Result<Vec<Pocket>> {
    let fb = front_boundary(set, conn);
    let pos = |v: VertexId| l.iter().position(|&x| x == v);
    let hits: Vec<(usize, usize)> =
        fb.vertices.iter().enumerate().filter_map(|(i, &v)| pos(v).map(|p| (i, p))).collect();
    let mut out = Vec::new();
    for w in hits.windows(2) {
        let ((i, p), (j, q)) = (w[0], w[1]);
        if q <= p || (j == i + 1 && q == p + 1) {
            continue;
        }
        let along_path = l[p..=q].to_vec();
        let along_front = fb.vertices[i..=j].to_vec();
        let Some(faces) = enclosed_faces(g, &along_path, &along_front)? else { continue };
        let vertices = faces.iter().flatten().copied().collect();
        out.push(Pocket { connection: *conn, a: l[p], b: l[q], along_path, along_front, faces, vertices });
    }
    Ok(out)
}

/// A connection in the auxiliary graph that holds before the recursive
/// run starts, by gadget key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum Seed {
    GPair { left: GadgetKey, right: GadgetKey },
    MTriple { lower: GadgetKey, middle: GadgetKey, upper: GadgetKey },
}

#[derive(Debug, Clone)]
pub struct Auxiliary {
    pub graph: PlaneGraph,
    /// Original vertex of each auxiliary vertex; None for added vertices.
    pub original: Vec<Option<VertexId>>,
    /// Connections holding from the start, in auxiliary vertex ids.
    pub seeded: Vec<Seed>,
    /// Auxiliary ids of the closed pocket's vertices.
    pub inside: BTreeSet<VertexId>,
}

fn gadget_faces(g: &PlaneGraph, set: &GadgetSet, id: usize) -> Vec<Vec<VertexId>> {
    let gad = &set.gadgets[id];
    let m = gad.key.mid;
    let rim = if gad.is_fan() { &gad.alpha } else { &gad.beta };
    rim.windows(2).map(|w| oriented(g, [m, w[0], w[1]])).collect()
}

/// The triangle on `t` as a counterclockwise cycle of `g`.
fn oriented(g: &PlaneGraph, t: [VertexId; 3]) -> Vec<VertexId> {
    // the face left of a dart is counterclockwise, and the third vertex of
    // the triangle left of x->y is the clockwise successor of x around y
    if g.next_cw(t[1], t[0]) == t[2] {
        t.to_vec()
    } else {
        vec![t[0], t[2], t[1]]
    }
}

/// Rotation system from counterclockwise face cycles.
fn rotation_from_faces(n: usize, cycles: &[Vec<VertexId>]) -> Option<Vec<Vec<VertexId>>> {
    let mut next: Vec<BTreeMap<VertexId, VertexId>> = vec![BTreeMap::new(); n];
    for c in cycles {
        let k = c.len();
        for i in 0..k {
            let (prev, v, succ) = (c[(i + k - 1) % k], c[i], c[(i + 1) % k]);
            if next[v].insert(succ, prev).is_some() {
                return None;
            }
        }
    }
    let mut rotation = Vec::with_capacity(n);
    for map in next {
        let &start = map.keys().next()?;
        let mut order = vec![start];
        let mut cur = map[&start];
        while cur != start {
            order.push(cur);
            cur = *map.get(&cur)?;
            if order.len() > map.len() {
                return None;
            }
        }
        if order.len() != map.len() {
            return None;
        }
        rotation.push(order);
    }
    Some(rotation)
}

fn unsuitable(p: &Pocket, reason: &str) -> Error {
    Error::BadPocket(format!("{:?} ({}, {}): {reason}", p.connection, p.a, p.b))
}

/// Start of `needle` as a contiguous run inside `hay`.
fn sub_at(hay: &[VertexId], needle: &[VertexId]) -> Option<usize> {
    hay.windows(needle.len()).position(|w| w == needle)
}

/// Builds the auxiliary graph of a pocket.
pub fn build_auxiliary_graph(g: &PlaneGraph, set: &GadgetSet, p: &Pocket) -> Result<Auxiliary> {
    let fb = front_boundary(set, &p.connection);
    let at = |v: VertexId| fb.vertices.iter().position(|&x| x == v).unwrap();
    let (ia, ib) = (at(p.a), at(p.b));
    let mut west = fb.vertices[..=ia].to_vec();
    west.extend(&p.along_path[1..]);
    west.extend(&fb.vertices[ib + 1..]);
    let (a0, b0) = (west[0], *west.last().unwrap());
    let mut cycles: Vec<Vec<VertexId>> = p.faces.clone();
    let mut east: Vec<VertexId>;
    let mut east_corner = None;
    let mut seeds = Vec::new();
    let key = |id: usize| set.gadgets[id].key;
    match p.connection {
        Connection::GPair { left, right } => {
            cycles.extend(gadget_faces(g, set, left));
            cycles.extend(gadget_faces(g, set, right));
            east = set.gadgets[right].beta.clone();
            if set.gadgets[right].is_fan() {
                east_corner = Some(set.gadgets[right].key.mid);
            } else {
                seeds.push(Seed::GPair { left: key(right), right: key(right) });
            }
            seeds.push(Seed::GPair { left: key(left), right: key(right) });
        }
        Connection::MTriple { lower, middle, upper } => {
            if lower == upper {
                return Err(unsuitable(p, "outer gadgets coincide"));
            }
            let (gb, go, gu) = (&set.gadgets[lower], &set.gadgets[middle], &set.gadgets[upper]);
            let d = *gb.alpha.last().unwrap();
            let a2 = gu.alpha[0];
            let (Some(pe), Some(pe2)) =
                (gb.alpha.iter().position(|&x| x == go.key.low), gu.alpha.iter().position(|&x| x == go.key.high))
            else {
                return Err(unsuitable(p, "middle gadget does not sit on the outer ones"));
            };
            cycles.extend(gadget_faces(g, set, lower));
            cycles.extend(gadget_faces(g, set, upper));
            let mut back = gb.alpha[pe..].to_vec();
            if let Some(i) = sub_at(&gu.alpha, &gb.beta) {
                // the lower gadget rests on the upper one
                let at_d = i + gb.beta.len() - 1;
                if at_d >= pe2 {
                    return Err(unsuitable(p, "middle gadget ends below the lower one"));
                }
                back.extend(&gu.alpha[at_d + 1..=pe2]);
                east = gu.beta.clone();
                seeds.push(Seed::GPair { left: key(upper), right: key(upper) });
                seeds.push(Seed::GPair { left: key(lower), right: key(upper) });
            } else if let Some(i) = sub_at(&gb.alpha, &gu.beta) {
                // the upper gadget rests on the lower one
                if i < pe {
                    return Err(unsuitable(p, "middle gadget starts above the upper one"));
                }
                back.truncate(i - pe + 1);
                back.extend(&gu.alpha[1..=pe2]);
                east = gb.beta.clone();
                seeds.push(Seed::GPair { left: key(lower), right: key(lower) });
                seeds.push(Seed::GPair { left: key(upper), right: key(lower) });
            } else {
                if d != a2 {
                    back.extend(&gu.alpha[..=pe2]);
                } else {
                    back.extend(&gu.alpha[1..=pe2]);
                }
                east = gb.beta.clone();
                if d != a2 {
                    east.extend(&gu.beta);
                } else {
                    east.extend(&gu.beta[1..]);
                }
                seeds.push(Seed::GPair { left: key(lower), right: key(lower) });
                seeds.push(Seed::GPair { left: key(upper), right: key(upper) });
            }
            for w in back.windows(2) {
                cycles.push(vec![go.key.mid, w[0], w[1]]);
            }
            seeds.push(Seed::MTriple { lower: key(lower), middle: key(middle), upper: key(upper) });
        }
    }
    if east[0] != a0 || *east.last().unwrap() != b0 {
        return Err(unsuitable(p, "sides do not share their ends"));
    }
    // renumber: region vertices first, then the added corners
    let mut verts: BTreeSet<VertexId> = cycles.iter().flatten().copied().collect();
    verts.extend(&west);
    verts.extend(&east);
    let mut original: Vec<Option<VertexId>> = verts.iter().map(|&v| Some(v)).collect();
    let id: HashMap<VertexId, VertexId> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let d_new = original.len();
    original.push(None);
    let c_new = match east_corner {
        Some(c) => id[&c],
        None => {
            original.push(None);
            d_new + 1
        }
    };
    let mut cycles: Vec<Vec<VertexId>> = cycles.iter().map(|c| c.iter().map(|v| id[v]).collect()).collect();
    let west: Vec<VertexId> = west.iter().map(|v| id[v]).collect();
    east = east.iter().map(|v| id[v]).collect();
    for w in west.windows(2) {
        cycles.push(vec![d_new, w[0], w[1]]);
    }
    if east_corner.is_none() {
        for w in east.windows(2) {
            cycles.push(vec![c_new, w[1], w[0]]);
        }
    }
    let (south, north) = (west[0], *west.last().unwrap());
    cycles.push(vec![south, d_new, north, c_new]);
    // drop repeated faces (the same triangle reached twice)
    let mut seen = BTreeSet::new();
    cycles.retain(|c| {
        let mut k = c.clone();
        k.sort_unstable();
        seen.insert(k)
    });
    let n = original.len();
    let rotation = rotation_from_faces(n, &cycles).ok_or_else(|| unsuitable(p, "faces do not form a surface"))?;
    let corners = Corners { west: d_new, north, east: c_new, south };
    let graph = PlaneGraph::new(rotation, Some(corners)).map_err(|e| unsuitable(p, &e.to_string()))?;
    let report = validate_proper_triangular(&graph);
    if !report.passed() {
        return Err(unsuitable(p, &format!("auxiliary graph is not proper triangular: {:?}", report.violations)));
    }
    let map_key = |k: GadgetKey| -> Option<GadgetKey> {
        let low = *id.get(&k.low)?;
        let mid = *id.get(&k.mid)?;
        let high = *id.get(&k.high)?;
        Some(GadgetKey { kind: k.kind, low, mid, high })
    };
    let g0 = GadgetKey { kind: GadgetKind::Fan, low: south, mid: c_new, high: north };
    let mut seeded = Vec::new();
    for s in seeds {
        seeded.push(match s {
            // a self-pair marks a gadget resting on the new east fan
            Seed::GPair { left, right } if left == right => {
                Seed::GPair { left: map_key(left).ok_or_else(|| unsuitable(p, "seed"))?, right: g0 }
            }
            Seed::GPair { left, right } => Seed::GPair {
                left: map_key(left).ok_or_else(|| unsuitable(p, "seed"))?,
                right: map_key(right).ok_or_else(|| unsuitable(p, "seed"))?,
            },
            Seed::MTriple { lower, middle, upper } => Seed::MTriple {
                lower: map_key(lower).ok_or_else(|| unsuitable(p, "seed"))?,
                middle: map_key(middle).ok_or_else(|| unsuitable(p, "seed"))?,
                upper: map_key(upper).ok_or_else(|| unsuitable(p, "seed"))?,
            },
        });
    }
    let inside = p.vertices.iter().map(|v| id[v]).collect();
    Ok(Auxiliary { graph, original, seeded, inside })
}

/// What happened to one pocket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PocketRecord {
    pub connection: Connection,
    pub a: VertexId,
    pub b: VertexId,
    pub depth: usize,
    pub usable: bool,
    /// Why the auxiliary graph could not be built, if it could not.
    pub error: Option<String>,
}

/// Usable or bad, per connection and path, with memoized pocket results.
#[derive(Debug, Default)]
pub struct Classifier {
    pub depth: usize,
    pub max_depth: usize,
    /// Nested pockets must have fewer faces than the one enclosing them.
    pub face_budget: usize,
    memo: HashMap<(Connection, VertexId, VertexId), bool>,
    /// Seeded connections, whose orientation is fixed from outside.
    pub trusted: BTreeSet<Connection>,
    pub records: Vec<PocketRecord>,
}

impl Classifier {
    pub fn new(depth: usize, max_depth: usize) -> Self {
        Classifier { depth, max_depth, face_budget: usize::MAX, ..Default::default() }
    }

    /// Whether one pocket's auxiliary graph admits a slant REL using only
    /// gadgets inside the pocket.
    pub fn pocket_usable(&mut self, g: &PlaneGraph, set: &GadgetSet, p: &Pocket) -> Result<bool> {
        let key = (p.connection, p.a, p.b);
        if let Some(&u) = self.memo.get(&key) {
            return Ok(u);
        }
        if self.depth >= self.max_depth {
            return Err(Error::DepthExceeded(self.depth));
        }
        let (usable, error) = match build_auxiliary_graph(g, set, p) {
            _ if p.faces.len() >= self.face_budget => (false, Some("pocket does not shrink".to_string())),
            Ok(aux) => (solve_auxiliary(&aux, self.depth + 1, self.max_depth, p.faces.len())?, None),
            Err(Error::BadPocket(e)) => (false, Some(e)),
            Err(e) => return Err(e),
        };
        self.memo.insert(key, usable);
        self.records.push(PocketRecord { connection: p.connection, a: p.a, b: p.b, depth: self.depth, usable, error });
        Ok(usable)
    }

    /// Usable iff every pocket of `conn` on `l` is.
    pub fn classify_connection(&mut self, g: &PlaneGraph, set: &GadgetSet, conn: &Connection, l: &[VertexId]) -> Result<bool> {
        if self.trusted.contains(conn) {
            return Ok(true);
        }
        for p in find_pockets(g, set, conn, l)? {
            if !self.pocket_usable(g, set, &p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Runs face growing on an auxiliary graph, seeded with its connections
/// and restricted to gadgets inside the pocket.
pub fn solve_auxiliary(aux: &Auxiliary, depth: usize, max_depth: usize, face_budget: usize) -> Result<bool> {
    let g = &aux.graph;
    let set = enumerate_gadgets(g);
    let id = |k: GadgetKey| set.get(k);
    let mut seeds = Vec::new();
    for s in &aux.seeded {
        let c = match *s {
            Seed::GPair { left, right } => id(left).zip(id(right)).map(|(left, right)| Connection::GPair { left, right }),
            Seed::MTriple { lower, middle, upper } => match (id(lower), id(middle), id(upper)) {
                (Some(lower), Some(middle), Some(upper)) => Some(Connection::MTriple { lower, middle, upper }),
                _ => None,
            },
        };
        match c {
            Some(c) => seeds.push(c),
            None => return Ok(false),
        }
    }
    let terminal = set.get(terminal_key(g)?);
    let allowed: BTreeSet<GadgetId> = (0..set.len())
        .filter(|&i| {
            let h = &set.gadgets[i];
            Some(i) == terminal || h.alpha.iter().chain(&h.beta).all(|v| aux.inside.contains(v))
        })
        .collect();
    let opts = RunOptions { seeds, allowed: Some(allowed), depth, max_depth, face_budget, prune_bad: true };
    Ok(run_on_gadgets(g, set, opts)?.has_slant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growing::{on_path, run_face_growing};
    use crate::oracle::random_instance;

    /// Every pocket met on back boundaries of mirror-fans.
    fn pockets_of(n: usize, seed: u64) -> (PlaneGraph, GadgetSet, Vec<(Vec<VertexId>, Pocket)>) {
        let g = random_instance(n, seed);
        let out = run_face_growing(&g).unwrap();
        let mut found = Vec::new();
        for gad in &out.gadgets.gadgets {
            if gad.key.kind != GadgetKind::MirrorFan {
                continue;
            }
            for c in &out.connections {
                for p in find_pockets(&g, &out.gadgets, c, &gad.beta).unwrap() {
                    found.push((gad.beta.clone(), p));
                }
            }
        }
        (g, out.gadgets, found)
    }

    #[test]
    fn contiguous_connection_has_no_pockets() {
        let g = random_instance(5, 0);
        let out = run_face_growing(&g).unwrap();
        for &id in &out.admitted {
            let l = &out.gadgets.gadgets[id].beta;
            for c in &out.connections {
                if on_path(&out.gadgets, c, l).is_some_and(|o| o.contiguous) {
                    assert!(find_pockets(&g, &out.gadgets, c, l).unwrap().is_empty());
                }
            }
        }
    }

    #[test]
    fn pair_pocket_builds_a_proper_auxiliary_graph() {
        let (g, set, found) = pockets_of(4, 3);
        let (l, p) = found.iter().find(|(_, p)| matches!(p.connection, Connection::GPair { .. })).unwrap();
        // the front boundary leaves the path once and comes back once
        assert_eq!(find_pockets(&g, &set, &p.connection, l).unwrap().len(), 1);
        let inner: BTreeSet<VertexId> = p.along_path.iter().chain(&p.along_front).copied().collect();
        assert_eq!(p.along_path.iter().filter(|v| p.along_front.contains(v)).count(), 2);
        assert!(inner.is_subset(&p.vertices));
        let aux = build_auxiliary_graph(&g, &set, p).unwrap();
        assert!(validate_proper_triangular(&aux.graph).passed());
        assert_eq!(aux.original.iter().filter(|o| o.is_none()).count(), 1);
    }

    #[test]
    fn triple_pocket_rewrites_the_middle_gadget() {
        let (g, set, found) = pockets_of(6, 1);
        let (_, p) = found.iter().find(|(_, p)| matches!(p.connection, Connection::MTriple { .. })).unwrap();
        let Connection::MTriple { lower, middle, upper } = p.connection else { unreachable!() };
        let aux = build_auxiliary_graph(&g, &set, p).unwrap();
        assert!(validate_proper_triangular(&aux.graph).passed());
        // the middle gadget keeps its corners but gets a new back boundary
        let k = set.gadgets[middle].key;
        let at = |v: VertexId| aux.original.iter().position(|&o| o == Some(v)).unwrap();
        let aux_set = enumerate_gadgets(&aux.graph);
        let rewritten = [GadgetKind::MirrorFan, GadgetKind::Fan]
            .into_iter()
            .find_map(|kind| aux_set.get(GadgetKey { kind, low: at(k.low), mid: at(k.mid), high: at(k.high) }))
            .unwrap();
        let back: Vec<VertexId> = aux_set.gadgets[rewritten].beta.iter().map(|&v| aux.original[v].unwrap()).collect();
        // it runs along the fronts of the two outer gadgets
        assert_eq!((back[0], *back.last().unwrap()), (k.low, k.high));
        let fronts: BTreeSet<VertexId> = set.gadgets[lower].alpha.iter().chain(&set.gadgets[upper].alpha).copied().collect();
        assert!(back.iter().all(|v| fronts.contains(v)));
        assert!(aux.seeded.iter().any(|s| matches!(s, Seed::MTriple { .. })));
    }

    #[test]
    fn pockets_of_one_connection_are_disjoint_intervals() {
        for (n, seed) in [(4, 3), (6, 1), (7, 8), (8, 5)] {
            let (_, _, found) = pockets_of(n, seed);
            for (l, p) in &found {
                for (l2, q) in &found {
                    if l != l2 || p.connection != q.connection || p == q {
                        continue;
                    }
                    let pos = |v: VertexId| l.iter().position(|&x| x == v).unwrap();
                    assert!(pos(p.b) <= pos(q.a) || pos(q.b) <= pos(p.a));
                }
                assert!(p.along_path.len() <= l.len());
            }
        }
    }

    #[test]
    fn recursion_terminates_on_a_sweep() {
        for n in 1..=8 {
            for seed in 0..10 {
                let g = random_instance(n, seed);
                let out = run_face_growing(&g).unwrap();
                for r in &out.pockets {
                    assert!(r.depth < g.vertex_count());
                }
            }
        }
    }

    #[test]
    fn classifier_memoizes() {
        let (g, set, found) = pockets_of(4, 3);
        let (_, p) = &found[0];
        let mut c = Classifier::new(0, g.vertex_count());
        let first = c.pocket_usable(&g, &set, p).unwrap();
        assert_eq!(c.records.len(), 1);
        assert_eq!(c.pocket_usable(&g, &set, p).unwrap(), first);
        assert_eq!(c.records.len(), 1);
    }
}
