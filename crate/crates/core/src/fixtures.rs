//! Small named instances used by tests, benchmarks and the command line.
//!
//! Interior vertices come first; the frame follows as vW, vN, vE, vS.

use crate::graph::{Corners, PlaneGraph, VertexId};
use crate::layout::{dual_graph, Rect, RectLayout};
use crate::rel::{derive_rel_from_layout, EdgeSet, Rel};

/// Lays out interior rectangles (inside `[0, w] x [0, h]`) within a frame
/// of four strips and returns the dual graph with the framed layout.
pub fn framed(interior: &[(&str, [f64; 4])], w: f64, h: f64) -> (PlaneGraph, RectLayout) {
    let n = interior.len();
    let mut rects: Vec<Rect> = interior
        .iter()
        .map(|(_, [x0, y0, x1, y1])| Rect::new(x0 + 1.0, y0 + 1.0, x1 + 1.0, y1 + 1.0))
        .collect();
    rects.push(Rect::new(0.0, 0.0, 1.0, h + 2.0));
    rects.push(Rect::new(1.0, h + 1.0, w + 1.0, h + 2.0));
    rects.push(Rect::new(w + 1.0, 0.0, w + 2.0, h + 2.0));
    rects.push(Rect::new(1.0, 0.0, w + 1.0, 1.0));
    let layout = RectLayout { bounds: [0.0, 0.0, w + 2.0, h + 2.0], rects };
    let corners = Corners { west: n, north: n + 1, east: n + 2, south: n + 3 };
    let labels = interior
        .iter()
        .map(|(s, _)| Some(s.to_string()))
        .chain(["vW", "vN", "vE", "vS"].map(|s| Some(s.to_string())))
        .collect();
    let g = dual_graph(&layout, corners).expect("fixture layout is valid").with_labels(labels);
    (g, layout)
}

/// One interior vertex inside the frame.
pub fn w1() -> PlaneGraph {
    let rotation = vec![vec![3, 2, 1, 4], vec![2, 4, 0], vec![3, 1, 0], vec![4, 2, 0], vec![1, 3, 0]];
    let corners = Corners { north: 2, west: 1, south: 4, east: 3 };
    PlaneGraph::new(rotation, Some(corners))
        .expect("w1 is well formed")
        .with_labels(["u", "vW", "vN", "vE", "vS"].map(|s| Some(s.to_string())).to_vec())
}

/// The only labeling of `w1`.
pub fn w1_rel() -> Rel {
    let (u, w, n, e, s) = (0, 1, 2, 3, 4);
    let mut r = Rel::new();
    r.insert(EdgeSet::T1, s, u).unwrap();
    r.insert(EdgeSet::T1, u, n).unwrap();
    r.insert(EdgeSet::T2, e, u).unwrap();
    r.insert(EdgeSet::T2, u, w).unwrap();
    r
}

fn h2_parts() -> (PlaneGraph, RectLayout) {
    framed(&[("w", [0.0, 0.0, 1.0, 1.0]), ("e", [1.0, 0.0, 2.0, 1.0])], 2.0, 1.0)
}

/// Two interior vertices side by side.
pub fn h2() -> PlaneGraph {
    h2_parts().0
}

pub fn h2_rel() -> Rel {
    let (g, l) = h2_parts();
    derive_rel_from_layout(&g, &l).unwrap()
}

fn p5_parts() -> (PlaneGraph, RectLayout) {
    framed(
        &[
            ("a", [0.0, 0.0, 2.0, 1.0]),
            ("b", [2.0, 0.0, 3.0, 2.0]),
            ("c", [1.0, 2.0, 3.0, 3.0]),
            ("d", [0.0, 1.0, 1.0, 3.0]),
            ("x", [1.0, 1.0, 2.0, 2.0]),
        ],
        3.0,
        3.0,
    )
}

/// Pinwheel: four arms around a central square.
pub fn p5() -> PlaneGraph {
    p5_parts().0
}

/// The labeling read off the pinwheel layout.
pub fn p5_rel() -> Rel {
    let (g, l) = p5_parts();
    derive_rel_from_layout(&g, &l).unwrap()
}

/// Two stacked pairs whose shared vertical line is not a side of any
/// rectangle.
pub fn stacked_pairs() -> (PlaneGraph, RectLayout) {
    framed(
        &[
            ("l1", [0.0, 0.0, 1.0, 1.0]),
            ("l2", [0.0, 1.0, 1.0, 3.0]),
            ("r1", [1.0, 0.0, 2.0, 2.0]),
            ("r2", [1.0, 2.0, 2.0, 3.0]),
        ],
        2.0,
        3.0,
    )
}

/// The smallest instance without a slant labeling that the random
/// generator produces (four interior vertices, seed 3): two columns split
/// at different heights.
pub fn no_slant() -> PlaneGraph {
    let rotation = vec![
        vec![7, 1, 2, 3, 4],
        vec![7, 6, 2, 0],
        vec![1, 6, 5, 3, 0],
        vec![0, 2, 5, 4],
        vec![7, 0, 3, 5],
        vec![3, 2, 6, 4],
        vec![5, 2, 1, 7],
        vec![6, 1, 0, 4],
    ];
    let corners = Corners { north: 5, west: 4, south: 7, east: 6 };
    PlaneGraph::new(rotation, Some(corners))
        .expect("no_slant is well formed")
        .with_labels(["v0", "v1", "v2", "v3", "vW", "vN", "vE", "vS"].map(|s| Some(s.to_string())).to_vec())
}

/// Same corners and the same rotation at every vertex up to cyclic shift.
pub fn same_embedding(a: &PlaneGraph, b: &PlaneGraph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.corners() != b.corners() {
        return false;
    }
    (0..a.vertex_count()).all(|v: VertexId| {
        let (x, y) = (a.neighbors(v), b.neighbors(v));
        x.len() == y.len()
            && (x.is_empty() || (0..y.len()).any(|s| (0..x.len()).all(|i| x[i] == y[(i + s) % y.len()])))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_proper_triangular;
    use crate::layout::check_layout;

    #[test]
    fn w1_by_hand_equals_w1_from_layout() {
        let (g, l) = framed(&[("u", [0.0, 0.0, 1.0, 1.0])], 1.0, 1.0);
        assert!(same_embedding(&g, &w1()));
        check_layout(&w1(), &l).unwrap();
        assert_eq!(derive_rel_from_layout(&g, &l).unwrap(), w1_rel());
    }

    #[test]
    fn fixture_layouts_are_valid() {
        for (g, l) in [h2_parts(), p5_parts(), stacked_pairs()] {
            check_layout(&g, &l).unwrap();
            assert!(validate_proper_triangular(&g).passed());
        }
    }

    #[test]
    fn no_slant_is_the_frozen_generator_instance() {
        assert_eq!(no_slant(), crate::oracle::random_instance(4, 3));
        assert!(validate_proper_triangular(&no_slant()).passed());
    }
}
