//! Rectangular layouts: construction from a labeling, maximal segments,
//! the geometric area-universality test and rendering.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Corners, PlaneGraph, VertexId};
use crate::rel::{oriented_subgraph, validate_rel, Rel, Which};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// One rectangle per vertex, indexed by vertex id, inside `bounds`
/// (`[x0, y0, x1, y1]`).
#[derive(Debug, Clone, PartialEq)]
pub struct RectLayout {
    pub bounds: [f64; 4],
    pub rects: Vec<Rect>,
}

#[derive(Serialize, Deserialize)]
struct LayoutDoc {
    bounds: [f64; 4],
    rects: Vec<RectDoc>,
}

#[derive(Serialize, Deserialize)]
struct RectDoc {
    v: VertexId,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl RectLayout {
    pub fn rect(&self, v: VertexId) -> Rect {
        self.rects[v]
    }

    pub fn to_json(&self) -> String {
        let doc = LayoutDoc {
            bounds: self.bounds,
            rects: self
                .rects
                .iter()
                .enumerate()
                .map(|(v, r)| RectDoc { v, x0: r.x0, y0: r.y0, x1: r.x1, y1: r.y1 })
                .collect(),
        };
        serde_json::to_string(&doc).expect("layout serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LayoutDoc = serde_json::from_str(text)?;
        let n = doc.rects.len();
        let mut rects = vec![None; n];
        for r in doc.rects {
            if r.v >= n || rects[r.v].is_some() {
                return Err(Error::BadLayout(format!("bad or repeated vertex id {}", r.v)));
            }
            rects[r.v] = Some(Rect::new(r.x0, r.y0, r.x1, r.y1));
        }
        Ok(Self { bounds: doc.bounds, rects: rects.into_iter().map(Option::unwrap).collect() })
    }

    /// Pairs of rectangles sharing a boundary piece of positive length.
    pub fn contacts(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for u in 0..self.rects.len() {
            for v in u + 1..self.rects.len() {
                if contact(&self.rects[u], &self.rects[v]).is_some() {
                    out.push((u, v));
                }
            }
        }
        out
    }
}

/// Midpoint of the shared boundary of two rectangles, if it has positive
/// length.
fn contact(a: &Rect, b: &Rect) -> Option<(f64, f64)> {
    let xo = (a.x0.max(b.x0), a.x1.min(b.x1));
    let yo = (a.y0.max(b.y0), a.y1.min(b.y1));
    if (a.x1 == b.x0 || b.x1 == a.x0) && yo.1 > yo.0 {
        let x = if a.x1 == b.x0 { a.x1 } else { a.x0 };
        return Some((x, (yo.0 + yo.1) / 2.0));
    }
    if (a.y1 == b.y0 || b.y1 == a.y0) && xo.1 > xo.0 {
        let y = if a.y1 == b.y0 { a.y1 } else { a.y0 };
        return Some(((xo.0 + xo.1) / 2.0, y));
    }
    None
}

/// Checks the tiling invariants and that rectangle contacts are exactly
/// the edges of `g`.
pub fn check_layout(g: &PlaneGraph, l: &RectLayout) -> Result<()> {
    let n = g.vertex_count();
    if l.rects.len() != n {
        return Err(Error::BadLayout(format!("{} rectangles for {} vertices", l.rects.len(), n)));
    }
    let [bx0, by0, bx1, by1] = l.bounds;
    let mut total = 0.0;
    for (v, r) in l.rects.iter().enumerate() {
        if !(r.width() > 0.0 && r.height() > 0.0) {
            return Err(Error::BadLayout(format!("rectangle {v} is degenerate")));
        }
        if r.x0 < bx0 || r.y0 < by0 || r.x1 > bx1 || r.y1 > by1 {
            return Err(Error::BadLayout(format!("rectangle {v} leaves the bounds")));
        }
        total += r.area();
    }
    let bound_area = (bx1 - bx0) * (by1 - by0);
    if (total - bound_area).abs() > 1e-9 * bound_area {
        return Err(Error::BadLayout(format!("areas sum to {total}, bounds have {bound_area}")));
    }
    for u in 0..n {
        for v in u + 1..n {
            let (a, b) = (&l.rects[u], &l.rects[v]);
            if a.x0.max(b.x0) < a.x1.min(b.x1) && a.y0.max(b.y0) < a.y1.min(b.y1) {
                return Err(Error::BadLayout(format!("rectangles {u} and {v} overlap")));
            }
        }
    }
    let mut corners: HashMap<(u64, u64), usize> = HashMap::new();
    for r in &l.rects {
        for p in [(r.x0, r.y0), (r.x0, r.y1), (r.x1, r.y0), (r.x1, r.y1)] {
            *corners.entry((p.0.to_bits(), p.1.to_bits())).or_default() += 1;
        }
    }
    if let Some((p, _)) = corners.iter().find(|(_, &c)| c >= 4) {
        return Err(Error::BadLayout(format!(
            "four rectangles meet at ({}, {})",
            f64::from_bits(p.0),
            f64::from_bits(p.1)
        )));
    }
    let got: BTreeSet<_> = l.contacts().into_iter().collect();
    let want: BTreeSet<_> = g.edges().into_iter().collect();
    if got != want {
        let diff: Vec<_> = got.symmetric_difference(&want).collect();
        return Err(Error::BadLayout(format!("contacts differ from edges at {diff:?}")));
    }
    Ok(())
}

/// The dual plane graph of a layout. Each rectangle's neighbors are listed
/// counterclockwise starting from the bottom-left corner.
pub fn dual_graph(l: &RectLayout, corners: Corners) -> Result<PlaneGraph> {
    let n = l.rects.len();
    let mut rotation = Vec::with_capacity(n);
    for u in 0..n {
        let r = l.rects[u];
        let (w, h) = (r.width(), r.height());
        let mut around: Vec<(f64, VertexId)> = Vec::new();
        for v in 0..n {
            if v == u {
                continue;
            }
            let Some((x, y)) = contact(&r, &l.rects[v]) else { continue };
            let t = if y == r.y0 {
                x - r.x0
            } else if x == r.x1 {
                w + (y - r.y0)
            } else if y == r.y1 {
                w + h + (r.x1 - x)
            } else {
                2.0 * w + h + (r.y1 - y)
            };
            around.push((t, v));
        }
        around.sort_by(|a, b| a.0.total_cmp(&b.0));
        rotation.push(around.into_iter().map(|(_, v)| v).collect());
    }
    PlaneGraph::new(rotation, Some(corners))
}

/// Per-vertex dual-face indices bounding each rectangle, plus the integer
/// ranks of those faces.
#[derive(Debug, Clone)]
pub(crate) struct Skeleton {
    pub x_lo: Vec<usize>,
    pub x_hi: Vec<usize>,
    pub y_lo: Vec<usize>,
    pub y_hi: Vec<usize>,
    pub x_rank: Vec<usize>,
    pub y_rank: Vec<usize>,
    /// Dual edges (lower node, higher node) for x and for y.
    pub x_edges: Vec<(usize, usize)>,
    pub y_edges: Vec<(usize, usize)>,
}

struct Axis {
    lo: Vec<usize>,
    hi: Vec<usize>,
    rank: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

/// Builds one axis. For G1 the dual runs west to east; for G2 it runs
/// south to north. The outer face splits into node `outer` (rank 0) and a
/// fresh last node.
fn axis(g: &PlaneGraph, r: &Rel, which: Which) -> Result<Axis> {
    let c = g.require_corners()?;
    let sub = oriented_subgraph(g, r, which)?;
    let far = sub.faces.len();
    let node_count = far + 1;
    let low = |e: (VertexId, VertexId)| sub.left_of[&e];
    let high = |e: (VertexId, VertexId)| {
        let f = sub.right_of[&e];
        if f == sub.outer {
            far
        } else {
            f
        }
    };
    let edges: Vec<(usize, usize)> = sub.edges.iter().map(|&e| (low(e), high(e))).collect();
    let mut indeg = vec![0usize; node_count];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    for &(a, b) in &edges {
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut rank = vec![0usize; node_count];
    let mut stack: Vec<usize> = (0..node_count).filter(|&i| indeg[i] == 0).collect();
    let mut done = 0;
    while let Some(a) = stack.pop() {
        done += 1;
        for &b in &out[a] {
            rank[b] = rank[b].max(rank[a] + 1);
            indeg[b] -= 1;
            if indeg[b] == 0 {
                stack.push(b);
            }
        }
    }
    if done != node_count {
        return Err(Error::InvalidRel(format!("dual of {which:?} has a cycle")));
    }
    let n = g.vertex_count();
    let mut lo = vec![usize::MAX; n];
    let mut hi = vec![0usize; n];
    let mut lo_rank = vec![usize::MAX; n];
    let mut hi_rank = vec![0usize; n];
    for &(u, v) in &sub.edges {
        let (a, b) = (low((u, v)), high((u, v)));
        for x in [u, v] {
            if rank[a] < lo_rank[x] {
                lo_rank[x] = rank[a];
                lo[x] = a;
            }
            if rank[b] >= hi_rank[x] {
                hi_rank[x] = rank[b];
                hi[x] = b;
            }
        }
    }
    if which == Which::G1 {
        // the south and north strips span only between the west and east strips
        for (strip, west_edge, east_edge) in
            [(c.south, (c.south, c.west), (c.south, c.east)), (c.north, (c.west, c.north), (c.east, c.north))]
        {
            lo[strip] = high(west_edge);
            hi[strip] = low(east_edge);
        }
    }
    Ok(Axis { lo, hi, rank, edges })
}

pub(crate) fn skeleton(g: &PlaneGraph, r: &Rel) -> Result<Skeleton> {
    let report = validate_rel(g, r);
    if !report.passed() {
        return Err(Error::InvalidRel(format!("{:?}", report.violations)));
    }
    let x = axis(g, r, Which::G1)?;
    let y = axis(g, r, Which::G2)?;
    Ok(Skeleton {
        x_lo: x.lo,
        x_hi: x.hi,
        y_lo: y.lo,
        y_hi: y.hi,
        x_rank: x.rank,
        y_rank: y.rank,
        x_edges: x.edges,
        y_edges: y.edges,
    })
}

impl Skeleton {
    pub fn build(&self, xs: &[f64], ys: &[f64]) -> RectLayout {
        let rects = (0..self.x_lo.len())
            .map(|v| Rect::new(xs[self.x_lo[v]], ys[self.y_lo[v]], xs[self.x_hi[v]], ys[self.y_hi[v]]))
            .collect();
        let x_max = xs.iter().copied().fold(f64::MIN, f64::max);
        let y_max = ys.iter().copied().fold(f64::MIN, f64::max);
        RectLayout { bounds: [0.0, 0.0, x_max, y_max], rects }
    }
}

/// Integer layout whose coordinates are longest-path ranks in the duals of
/// G1 (x) and G2 (y).
pub fn rel_to_layout(g: &PlaneGraph, r: &Rel) -> Result<RectLayout> {
    let s = skeleton(g, r)?;
    let xs: Vec<f64> = s.x_rank.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = s.y_rank.iter().map(|&k| k as f64).collect();
    Ok(s.build(&xs, &ys))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximalSegment {
    pub orientation: Orientation,
    pub coord: f64,
    pub lo: f64,
    pub hi: f64,
    /// Rectangles to the left of (or below) the segment.
    pub before: Vec<VertexId>,
    /// Rectangles to the right of (or above) the segment.
    pub after: Vec<VertexId>,
}

impl MaximalSegment {
    /// Whether some incident rectangle has this exact segment as a side.
    pub fn is_full_side(&self, l: &RectLayout) -> bool {
        let span = |r: &Rect| match self.orientation {
            Orientation::Vertical => (r.y0, r.y1),
            Orientation::Horizontal => (r.x0, r.x1),
        };
        self.before.iter().chain(&self.after).any(|&v| span(&l.rects[v]) == (self.lo, self.hi))
    }
}

/// All maximal segments in the interior of the bounding rectangle.
pub fn maximal_segments(l: &RectLayout) -> Vec<MaximalSegment> {
    let [bx0, by0, bx1, by1] = l.bounds;
    let mut out = Vec::new();
    for orientation in [Orientation::Vertical, Orientation::Horizontal] {
        // (coord, lo, hi, vertex, rectangle lies after the line)
        let mut sides: Vec<(f64, f64, f64, VertexId, bool)> = Vec::new();
        for (v, r) in l.rects.iter().enumerate() {
            match orientation {
                Orientation::Vertical => {
                    sides.push((r.x0, r.y0, r.y1, v, true));
                    sides.push((r.x1, r.y0, r.y1, v, false));
                }
                Orientation::Horizontal => {
                    sides.push((r.y0, r.x0, r.x1, v, true));
                    sides.push((r.y1, r.x0, r.x1, v, false));
                }
            }
        }
        let (outer_lo, outer_hi) = match orientation {
            Orientation::Vertical => (bx0, bx1),
            Orientation::Horizontal => (by0, by1),
        };
        sides.retain(|s| s.0 != outer_lo && s.0 != outer_hi);
        sides.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut i = 0;
        while i < sides.len() {
            let (coord, lo, mut hi) = (sides[i].0, sides[i].1, sides[i].2);
            let mut seg = MaximalSegment { orientation, coord, lo, hi, before: Vec::new(), after: Vec::new() };
            while i < sides.len() && sides[i].0 == coord && sides[i].1 <= hi {
                hi = hi.max(sides[i].2);
                let (_, _, _, v, after) = sides[i];
                if after {
                    seg.after.push(v);
                } else {
                    seg.before.push(v);
                }
                i += 1;
            }
            seg.hi = hi;
            out.push(seg);
        }
    }
    out
}

/// A maximal segment that is not a full side of any rectangle, if any.
pub fn non_universal_segment(l: &RectLayout) -> Option<MaximalSegment> {
    maximal_segments(l).into_iter().find(|s| !s.is_full_side(l))
}

pub fn is_area_universal_geometric(l: &RectLayout) -> bool {
    non_universal_segment(l).is_none()
}

/// SVG drawing scaled into a `width` x `height` canvas, y pointing up.
pub fn render_svg(l: &RectLayout, g: &PlaneGraph, width: f64, height: f64) -> String {
    let [bx0, by0, bx1, by1] = l.bounds;
    let sx = width / (bx1 - bx0);
    let sy = height / (by1 - by0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    for (v, r) in l.rects.iter().enumerate() {
        let fill = if g.is_corner(v) { "#dddddd" } else { "#9ecae1" };
        let (x, y) = ((r.x0 - bx0) * sx, (by1 - r.y1) * sy);
        let (w, h) = (r.width() * sx, r.height() * sy);
        let _ = writeln!(
            s,
            r#"  <rect id="v{v}" x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="{fill}" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.3}" y="{:.3}" text-anchor="middle" dominant-baseline="middle" font-size="12">{}</text>"#,
            x + w / 2.0,
            y + h / 2.0,
            g.name(v)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rel::{derive_rel_from_layout, is_slant};

    #[test]
    fn w1_layout_matches_hand_ranks() {
        let (g, r) = (fixtures::w1(), fixtures::w1_rel());
        let l = rel_to_layout(&g, &r).unwrap();
        let c = g.corners().unwrap();
        let u = g.interior_vertices()[0];
        assert_eq!(l.bounds, [0.0, 0.0, 3.0, 3.0]);
        assert_eq!(l.rect(u), Rect::new(1.0, 1.0, 2.0, 2.0));
        assert_eq!(l.rect(c.west), Rect::new(0.0, 0.0, 1.0, 3.0));
        assert_eq!(l.rect(c.east), Rect::new(2.0, 0.0, 3.0, 3.0));
        assert_eq!(l.rect(c.south), Rect::new(1.0, 0.0, 2.0, 1.0));
        assert_eq!(l.rect(c.north), Rect::new(1.0, 2.0, 2.0, 3.0));
        check_layout(&g, &l).unwrap();
        assert_eq!(maximal_segments(&l).len(), 4);
        assert!(is_area_universal_geometric(&l));
    }

    #[test]
    fn h2_layout_has_five_segments() {
        let (g, r) = (fixtures::h2(), fixtures::h2_rel());
        let l = rel_to_layout(&g, &r).unwrap();
        check_layout(&g, &l).unwrap();
        let segs = maximal_segments(&l);
        assert_eq!(segs.len(), 5);
        let vertical = segs.iter().filter(|s| s.orientation == Orientation::Vertical).count();
        assert_eq!(vertical, 3);
        let divider = segs
            .iter()
            .find(|s| s.orientation == Orientation::Vertical && s.before == [0] && s.after == [1]);
        assert!(divider.is_some());
    }

    #[test]
    fn pinwheel_is_area_universal() {
        let (g, r) = (fixtures::p5(), fixtures::p5_rel());
        assert_eq!(is_slant(&g, &r).unwrap(), None);
        let l = rel_to_layout(&g, &r).unwrap();
        check_layout(&g, &l).unwrap();
        let segs = maximal_segments(&l);
        assert_eq!(segs.len(), 8);
        let arms = segs.iter().filter(|s| s.before.iter().chain(&s.after).all(|&v| !g.is_corner(v))).count();
        assert_eq!(arms, 4);
        assert!(is_area_universal_geometric(&l));
        assert_eq!(derive_rel_from_layout(&g, &l).unwrap(), r);
    }

    #[test]
    fn segment_counts_match_dual_faces() {
        for (g, r) in [
            (fixtures::w1(), fixtures::w1_rel()),
            (fixtures::h2(), fixtures::h2_rel()),
            (fixtures::p5(), fixtures::p5_rel()),
        ] {
            let l = rel_to_layout(&g, &r).unwrap();
            let segs = maximal_segments(&l);
            for (which, o) in [(Which::G1, Orientation::Vertical), (Which::G2, Orientation::Horizontal)] {
                let faces = oriented_subgraph(&g, &r, which).unwrap().faces.len() - 1;
                assert_eq!(segs.iter().filter(|s| s.orientation == o).count(), faces);
            }
        }
    }

    #[test]
    fn stacked_pairs_give_non_universal_segment() {
        let (g, l) = fixtures::stacked_pairs();
        check_layout(&g, &l).unwrap();
        let s = non_universal_segment(&l).expect("the middle line is not a side");
        assert_eq!(s.orientation, Orientation::Vertical);
        assert_eq!((s.lo, s.hi), (1.0, 4.0));
        assert_eq!(s.before.len(), 2);
        assert_eq!(s.after.len(), 2);
    }

    #[test]
    fn json_roundtrip_and_svg() {
        let (g, r) = (fixtures::p5(), fixtures::p5_rel());
        let mut l = rel_to_layout(&g, &r).unwrap();
        l.rects[0].x1 = 0.1 + 0.2;
        assert_eq!(RectLayout::from_json(&l.to_json()).unwrap(), l);
        let svg = render_svg(&rel_to_layout(&fixtures::w1(), &fixtures::w1_rel()).unwrap(), &fixtures::w1(), 300.0, 300.0);
        assert_eq!(svg.matches("<rect").count(), 5);
        assert!(svg.contains(">vN<"));
    }

    #[test]
    fn dual_of_constructed_layout_is_the_graph() {
        for (g, r) in [(fixtures::h2(), fixtures::h2_rel()), (fixtures::p5(), fixtures::p5_rel())] {
            let l = rel_to_layout(&g, &r).unwrap();
            let d = dual_graph(&l, g.corners().unwrap()).unwrap();
            assert!(fixtures::same_embedding(&d, &g));
        }
    }
}
