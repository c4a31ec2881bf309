//! Area realization for slant labelings.
//!
//! The unknowns are the coordinates of the maximal segments (one per dual
//! node of G1 and G2, minus the west and south sides which stay at 0).
//! Each step takes the minimum-norm Newton correction of the relative area
//! residuals and halves it until every rectangle and every contact keeps
//! positive length and the residual drops.

use crate::error::{Error, Result};
use crate::graph::PlaneGraph;
use crate::layout::{skeleton, RectLayout, Skeleton};
use crate::rel::{is_slant, Rel};

pub const MAX_ITERATIONS: usize = 10_000;
pub const TOLERANCE: f64 = 1e-6;
pub const DAMPING: f64 = 0.5;

/// Per-vertex target areas, indexed by vertex id.
pub type AreaAssignment = Vec<f64>;

#[derive(Debug, Clone)]
pub struct Realization {
    pub layout: RectLayout,
    pub iterations: usize,
    /// Largest relative area error over all rectangles.
    pub residual: f64,
}

struct Problem<'a> {
    s: &'a Skeleton,
    areas: &'a [f64],
    nx: usize,
}

impl Problem<'_> {
    fn split<'b>(&self, z: &'b [f64]) -> (&'b [f64], &'b [f64]) {
        z.split_at(self.nx)
    }

    fn feasible(&self, z: &[f64]) -> bool {
        let (xs, ys) = self.split(z);
        self.s.x_edges.iter().all(|&(a, b)| xs[b] > xs[a]) && self.s.y_edges.iter().all(|&(a, b)| ys[b] > ys[a])
    }

    fn residuals(&self, z: &[f64]) -> Vec<f64> {
        let (xs, ys) = self.split(z);
        (0..self.areas.len())
            .map(|v| {
                let w = xs[self.s.x_hi[v]] - xs[self.s.x_lo[v]];
                let h = ys[self.s.y_hi[v]] - ys[self.s.y_lo[v]];
                w * h / self.areas[v] - 1.0
            })
            .collect()
    }

    /// Rows of the Jacobian as sparse (column, value) lists.
    fn jacobian(&self, z: &[f64]) -> Vec<Vec<(usize, f64)>> {
        let (xs, ys) = self.split(z);
        (0..self.areas.len())
            .map(|v| {
                let (xl, xh) = (self.s.x_lo[v], self.s.x_hi[v]);
                let (yl, yh) = (self.s.y_lo[v], self.s.y_hi[v]);
                let w = xs[xh] - xs[xl];
                let h = ys[yh] - ys[yl];
                let a = self.areas[v];
                let mut row = vec![(xh, h / a), (xl, -h / a), (self.nx + yh, w / a), (self.nx + yl, -w / a)];
                // the west and south coordinates are pinned at zero
                row.retain(|&(c, _)| c != self.pinned_x() && c != self.nx + self.pinned_y());
                row
            })
            .collect()
    }

    fn pinned_x(&self) -> usize {
        self.s.x_rank.iter().position(|&r| r == 0).unwrap()
    }

    fn pinned_y(&self) -> usize {
        self.s.y_rank.iter().position(|&r| r == 0).unwrap()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `m y = b` for a small dense symmetric positive semidefinite `m`
/// by Gaussian elimination with partial pivoting.
fn solve_dense(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                let (top, bottom) = m.split_at_mut(row);
                for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * y;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut y = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * y[k]).sum();
        y[row] = (b[row] - s) / m[row][row];
    }
    Some(y)
}

/// Realizes `areas` with the combinatorial layout of the slant labeling `r`.
pub fn realize_areas(g: &PlaneGraph, r: &Rel, areas: &[f64]) -> Result<Realization> {
    if areas.len() != g.vertex_count() {
        return Err(Error::BadAreas(format!("{} areas for {} vertices", areas.len(), g.vertex_count())));
    }
    if let Some(v) = areas.iter().position(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::BadAreas(format!("vertex {v} has area {}", areas[v])));
    }
    let s = skeleton(g, r)?;
    if is_slant(g, r)?.is_some() {
        return Err(Error::NotSlant);
    }
    let nx = s.x_rank.len();
    let p = Problem { s: &s, areas, nx };
    // start from the rank layout scaled to the total area
    let total: f64 = areas.iter().sum();
    let w0 = *s.x_rank.iter().max().unwrap() as f64;
    let h0 = *s.y_rank.iter().max().unwrap() as f64;
    let scale = (total / (w0 * h0)).sqrt();
    let mut z: Vec<f64> = s.x_rank.iter().chain(&s.y_rank).map(|&k| k as f64 * scale).collect();
    let mut f = p.residuals(&z);
    let mut res = max_abs(&f);
    let mut iterations = 0;
    // aim well below the tolerance so that reported errors have headroom
    let target = TOLERANCE * 1e-3;
    while res > target && iterations < MAX_ITERATIONS {
        iterations += 1;
        let jac = p.jacobian(&z);
        let n = jac.len();
        let mut dense_cols = vec![0.0; z.len()];
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                for &(c, x) in &jac[i] {
                    dense_cols[c] = x;
                }
                let dot: f64 = jac[j].iter().map(|&(c, y)| dense_cols[c] * y).sum();
                for &(c, _) in &jac[i] {
                    dense_cols[c] = 0.0;
                }
                m[i][j] = dot;
                m[j][i] = dot;
            }
        }
        let trace: f64 = (0..n).map(|i| m[i][i]).sum();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += 1e-14 * trace / n as f64;
        }
        let Some(y) = solve_dense(m, f.iter().map(|x| -x).collect()) else { break };
        let mut step = vec![0.0; z.len()];
        for (i, row) in jac.iter().enumerate() {
            for &(c, x) in row {
                step[c] += x * y[i];
            }
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<f64> = z.iter().zip(&step).map(|(a, d)| a + t * d).collect();
            if p.feasible(&cand) {
                let fc = p.residuals(&cand);
                let rc = max_abs(&fc);
                if rc < res {
                    z = cand;
                    f = fc;
                    res = rc;
                    accepted = true;
                    break;
                }
            }
            t *= DAMPING;
        }
        if !accepted {
            break;
        }
    }
    if res > TOLERANCE {
        return Err(Error::NoConvergence { iterations, residual: res });
    }
    let (xs, ys) = p.split(&z);
    Ok(Realization { layout: s.build(xs, ys), iterations, residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::layout::{check_layout, rel_to_layout};
    use crate::rel::derive_rel_from_layout;

    fn rel_err(l: &RectLayout, areas: &[f64]) -> f64 {
        l.rects.iter().zip(areas).map(|(r, a)| (r.area() / a - 1.0).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn current_areas_are_a_fixed_point() {
        let (g, r) = (fixtures::p5(), fixtures::p5_rel());
        let l = rel_to_layout(&g, &r).unwrap();
        let areas: Vec<f64> = l.rects.iter().map(|x| x.area()).collect();
        let out = realize_areas(&g, &r, &areas).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.layout, l);
    }

    #[test]
    fn w1_center_gets_area_four() {
        let (g, r) = (fixtures::w1(), fixtures::w1_rel());
        let mut areas = vec![1.0; 5];
        areas[0] = 4.0;
        let out = realize_areas(&g, &r, &areas).unwrap();
        assert!((out.layout.rect(0).area() - 4.0).abs() <= 4e-6);
        assert!(rel_err(&out.layout, &areas) <= TOLERANCE);
        let total: f64 = areas.iter().sum();
        let [x0, y0, x1, y1] = out.layout.bounds;
        assert!(((x1 - x0) * (y1 - y0) - total).abs() <= 1e-6 * total);
        check_layout(&g, &out.layout).unwrap();
        assert_eq!(derive_rel_from_layout(&g, &out.layout).unwrap(), r);
    }

    #[test]
    fn skewed_pinwheel_areas() {
        let (g, r) = (fixtures::p5(), fixtures::p5_rel());
        let areas = vec![10.0, 0.5, 3.0, 1.0, 0.2, 2.0, 7.0, 1.0, 0.3];
        let out = realize_areas(&g, &r, &areas).unwrap();
        assert!(rel_err(&out.layout, &areas) <= TOLERANCE);
        assert_eq!(derive_rel_from_layout(&g, &out.layout).unwrap(), r);
    }

    #[test]
    fn rejects_bad_input() {
        let (g, r) = (fixtures::w1(), fixtures::w1_rel());
        assert!(matches!(realize_areas(&g, &r, &[1.0; 4]), Err(Error::BadAreas(_))));
        assert!(matches!(realize_areas(&g, &r, &[1.0, 1.0, 0.0, 1.0, 1.0]), Err(Error::BadAreas(_))));
    }
}
