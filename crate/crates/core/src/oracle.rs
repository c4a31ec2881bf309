//! Ground truth for small instances.
//!
//! Two independent procedures: a constraint search over edge labels, and
//! an exhaustive search over explicit cuts that stitches gadgets and tracks
//! the exact side lengths of every open face.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixtures::framed;
use crate::gadget::{enumerate_gadgets, is_forbidden_pair, ExplicitState, GadgetKey, GadgetSet, OpenFaceKind};
use crate::graph::{PlaneGraph, VertexId};
use crate::layout::RectLayout;
use crate::rel::{block_class, block_pattern_feasible, is_slant, validate_rel, EdgeSet, Labeled, Rel};

pub const DEFAULT_CAP: usize = 8;

fn check_cap(g: &PlaneGraph, cap: usize) -> Result<()> {
    let count = g.interior_vertices().len();
    if count > cap {
        return Err(Error::CapExceeded { count, cap });
    }
    Ok(())
}

/// Calls `visit` on every regular edge labeling until it returns false.
pub fn for_each_rel(g: &PlaneGraph, cap: usize, mut visit: impl FnMut(&Rel) -> bool) -> Result<()> {
    check_cap(g, cap)?;
    let c = g.require_corners()?;
    // order edges by distance of their nearer endpoint from vS
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut queue = VecDeque::from([c.south]);
    dist[c.south] = 0;
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    let mut edges = g.interior_edges();
    edges.sort_by_key(|&(u, v)| (dist[u].min(dist[v]), dist[u].max(dist[v]), u, v));
    let index: HashMap<(VertexId, VertexId), usize> =
        edges.iter().enumerate().flat_map(|(i, &(u, v))| [((u, v), i), ((v, u), i)]).collect();
    let forced = |u: VertexId, v: VertexId| -> Option<Vec<Labeled>> {
        let rule = |corner: VertexId, other: VertexId| -> Option<Labeled> {
            if corner == c.north {
                Some(Labeled { set: EdgeSet::T1, tail: other, head: corner })
            } else if corner == c.west {
                Some(Labeled { set: EdgeSet::T2, tail: other, head: corner })
            } else if corner == c.south {
                Some(Labeled { set: EdgeSet::T1, tail: corner, head: other })
            } else if corner == c.east {
                Some(Labeled { set: EdgeSet::T2, tail: corner, head: other })
            } else {
                None
            }
        };
        match (rule(u, v), rule(v, u)) {
            (Some(a), Some(b)) if a != b => Some(vec![]),
            (Some(a), _) | (_, Some(a)) => Some(vec![a]),
            _ => None,
        }
    };
    let choices: Vec<Vec<Labeled>> = edges
        .iter()
        .map(|&(u, v)| {
            forced(u, v).unwrap_or_else(|| {
                vec![
                    Labeled { set: EdgeSet::T1, tail: u, head: v },
                    Labeled { set: EdgeSet::T1, tail: v, head: u },
                    Labeled { set: EdgeSet::T2, tail: u, head: v },
                    Labeled { set: EdgeSet::T2, tail: v, head: u },
                ]
            })
        })
        .collect();
    let mut labels: Vec<Option<Labeled>> = vec![None; edges.len()];
    let feasible_at = |labels: &[Option<Labeled>], v: VertexId| -> bool {
        if g.is_corner(v) {
            return true;
        }
        let seq: Vec<Option<u8>> = g
            .neighbors(v)
            .iter()
            .map(|&u| index.get(&(v, u)).and_then(|&i| labels[i]).map(|l| block_class(l, v)))
            .collect();
        block_pattern_feasible(&seq)
    };
    fn rec(
        i: usize,
        labels: &mut Vec<Option<Labeled>>,
        edges: &[(VertexId, VertexId)],
        choices: &[Vec<Labeled>],
        feasible_at: &dyn Fn(&[Option<Labeled>], VertexId) -> bool,
        visit: &mut dyn FnMut(&[Option<Labeled>]) -> bool,
    ) -> bool {
        if i == edges.len() {
            return visit(labels);
        }
        let (u, v) = edges[i];
        for &lab in &choices[i] {
            labels[i] = Some(lab);
            if feasible_at(labels, u) && feasible_at(labels, v) && !rec(i + 1, labels, edges, choices, feasible_at, visit)
            {
                labels[i] = None;
                return false;
            }
        }
        labels[i] = None;
        true
    }
    let mut leaf = |labels: &[Option<Labeled>]| -> bool {
        let mut rel = Rel::new();
        for l in labels.iter().flatten() {
            rel.insert(l.set, l.tail, l.head).expect("each edge labeled once");
        }
        debug_assert!(validate_rel(g, &rel).passed());
        visit(&rel)
    };
    rec(0, &mut labels, &edges, &choices, &feasible_at, &mut leaf);
    Ok(())
}

/// Every regular edge labeling, sorted.
pub fn enumerate_all_rels(g: &PlaneGraph, cap: usize) -> Result<Vec<Rel>> {
    let mut out = Vec::new();
    for_each_rel(g, cap, |r| {
        out.push(r.clone());
        true
    })?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// At most `limit` labelings, in search order.
pub fn enumerate_rels_limited(g: &PlaneGraph, cap: usize, limit: usize) -> Result<Vec<Rel>> {
    let mut out = Vec::new();
    for_each_rel(g, cap, |r| {
        out.push(r.clone());
        out.len() < limit
    })?;
    Ok(out)
}

/// Whether some labeling is slant; stops at the first witness.
pub fn has_slant_rel_bruteforce(g: &PlaneGraph, cap: usize) -> Result<bool> {
    let mut found = false;
    let mut err = None;
    for_each_rel(g, cap, |r| match is_slant(g, r) {
        Ok(None) => {
            found = true;
            false
        }
        Ok(Some(_)) => true,
        Err(e) => {
            err = Some(e);
            false
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

/// Every partial slant state reachable from the initial cut by stitching
/// gadgets one at a time, in discovery order.
pub fn reachable_states(g: &PlaneGraph, set: &GadgetSet, cap: usize) -> Result<Vec<ExplicitState>> {
    check_cap(g, cap)?;
    let start = ExplicitState::initial(g, set)?;
    let mut seen: HashSet<BTreeSet<usize>> = HashSet::from([start.used.clone()]);
    let mut out = Vec::new();
    let mut stack = vec![start];
    while let Some(s) = stack.pop() {
        for id in stitchable(&s, set) {
            let next = s.apply(g, set, id)?;
            if next.is_partial_slant() && seen.insert(next.used.clone()) {
                stack.push(next);
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Usable gadgets whose back boundary lies on the cut and whose front
/// boundary avoids it, in key order.
pub fn stitchable(s: &ExplicitState, set: &GadgetSet) -> Vec<usize> {
    let mut out: Vec<usize> = s
        .cut
        .windows(2)
        .flat_map(|w| set.with_beta_edge((w[0], w[1])).iter().copied())
        .filter(|&id| s.suitable(&set.gadgets[id]))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Slant labelings found by the explicit-cut search, sorted and
/// deduplicated.
pub fn enumerate_slant_rels_exhaustive(g: &PlaneGraph, cap: usize) -> Result<Vec<Rel>> {
    let set = enumerate_gadgets(g);
    let mut out: Vec<Rel> = Vec::new();
    for s in reachable_states(g, &set, cap)? {
        if s.is_complete(g) {
            out.push(s.rel(g, &set)?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// One forced stitch of a gadget forming a forbidden pair with the
/// provider of the first or last edge of its back boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultCase {
    pub cut: Vec<VertexId>,
    pub gadget: GadgetKey,
    pub provider: GadgetKey,
    /// Kind of the open face on the new front-boundary edge next to the
    /// forbidden coincidence.
    pub kind: OpenFaceKind,
}

/// Forces every forbidden-pair stitch available from the given states.
pub fn forbidden_pair_replay(g: &PlaneGraph, set: &GadgetSet, states: &[ExplicitState]) -> Result<Vec<FaultCase>> {
    let mut out = Vec::new();
    for s in states {
        for id in stitchable(s, set) {
            let gad = &set.gadgets[id];
            let pos = s.cut.windows(gad.beta.len()).position(|w| w == gad.beta.as_slice()).unwrap();
            let k = gad.beta.len() - 1;
            let (first, last) = (s.edges[pos], s.edges[pos + k - 1]);
            let next = s.apply(g, set, id)?;
            let m = gad.alpha.len() - 1;
            for (cut_edge, new_index) in [(first, 0), (last, m - 1)] {
                if cut_edge.provider == usize::MAX {
                    continue;
                }
                let provider = &set.gadgets[cut_edge.provider];
                let coincide = if new_index == 0 {
                    (gad.beta[0], gad.beta[1]) == (provider.alpha[provider.alpha.len() - 2], provider.alpha[provider.alpha.len() - 1])
                } else {
                    (gad.beta[k - 1], gad.beta[k]) == (provider.alpha[0], provider.alpha[1])
                };
                if coincide && is_forbidden_pair(gad, provider) {
                    let e = next.edges[pos + new_index];
                    out.push(FaultCase {
                        cut: s.cut.clone(),
                        gadget: gad.key,
                        provider: provider.key,
                        kind: OpenFaceKind::from_lengths(e.lower, e.upper),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// A random rectangle partition with `interior_n` rectangles inside a
/// frame, and its dual graph. Splits use fresh integer coordinates so that
/// no four rectangles meet.
pub fn random_layout_instance(interior_n: usize, seed: u64) -> (PlaneGraph, RectLayout) {
    assert!(interior_n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const SIZE: i64 = 1 << 30;
    let mut rects: Vec<[i64; 4]> = vec![[0, 0, SIZE, SIZE]];
    let mut used_x: HashSet<i64> = HashSet::from([0, SIZE]);
    let mut used_y: HashSet<i64> = HashSet::from([0, SIZE]);
    let fresh = |rng: &mut ChaCha8Rng, lo: i64, hi: i64, used: &mut HashSet<i64>| -> i64 {
        loop {
            let c = rng.gen_range(lo + (hi - lo) / 5..=hi - (hi - lo) / 5);
            if used.insert(c) {
                return c;
            }
        }
    };
    while rects.len() < interior_n {
        let i = rng.gen_range(0..rects.len());
        let [x0, y0, x1, y1] = rects[i];
        if interior_n - rects.len() >= 4 && rng.gen_bool(0.2) {
            // pinwheel: four arms around a center
            let mut xs = [fresh(&mut rng, x0, x1, &mut used_x), fresh(&mut rng, x0, x1, &mut used_x)];
            let mut ys = [fresh(&mut rng, y0, y1, &mut used_y), fresh(&mut rng, y0, y1, &mut used_y)];
            xs.sort();
            ys.sort();
            let ([a, b], [c, d]) = (xs, ys);
            let arms = if rng.gen_bool(0.5) {
                [[x0, y0, b, c], [b, y0, x1, d], [a, d, x1, y1], [x0, c, a, y1], [a, c, b, d]]
            } else {
                [[x0, y0, a, d], [a, y0, x1, c], [b, c, x1, y1], [x0, d, b, y1], [a, c, b, d]]
            };
            rects[i] = arms[0];
            rects.extend_from_slice(&arms[1..]);
        } else if rng.gen_bool(0.5) {
            let x = fresh(&mut rng, x0, x1, &mut used_x);
            rects[i] = [x0, y0, x, y1];
            rects.push([x, y0, x1, y1]);
        } else {
            let y = fresh(&mut rng, y0, y1, &mut used_y);
            rects[i] = [x0, y0, x1, y];
            rects.push([x0, y, x1, y1]);
        }
    }
    let names: Vec<String> = (0..rects.len()).map(|i| format!("v{i}")).collect();
    let interior: Vec<(&str, [f64; 4])> = names
        .iter()
        .zip(&rects)
        .map(|(s, r)| (s.as_str(), r.map(|x| x as f64)))
        .collect();
    framed(&interior, SIZE as f64, SIZE as f64)
}

pub fn random_instance(interior_n: usize, seed: u64) -> PlaneGraph {
    random_layout_instance(interior_n, seed).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gadget::check_valid_extension;
    use crate::graph::validate_proper_triangular;

    #[test]
    fn rel_counts_on_fixtures() {
        assert_eq!(enumerate_all_rels(&fixtures::w1(), DEFAULT_CAP).unwrap(), vec![fixtures::w1_rel()]);
        assert_eq!(enumerate_all_rels(&fixtures::h2(), DEFAULT_CAP).unwrap(), vec![fixtures::h2_rel()]);
        let p5 = enumerate_all_rels(&fixtures::p5(), DEFAULT_CAP).unwrap();
        assert!(p5.contains(&fixtures::p5_rel()));
        for r in &p5 {
            assert!(validate_rel(&fixtures::p5(), r).passed());
        }
    }

    #[test]
    fn oracles_agree_on_fixtures() {
        for g in [fixtures::w1(), fixtures::h2(), fixtures::p5()] {
            let all = enumerate_all_rels(&g, DEFAULT_CAP).unwrap();
            let slant: Vec<Rel> = all.into_iter().filter(|r| is_slant(&g, r).unwrap().is_none()).collect();
            assert_eq!(enumerate_slant_rels_exhaustive(&g, DEFAULT_CAP).unwrap(), slant);
            assert!(has_slant_rel_bruteforce(&g, DEFAULT_CAP).unwrap());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = random_instance(9, 1);
        assert!(matches!(enumerate_all_rels(&g, 8), Err(Error::CapExceeded { count: 9, cap: 8 })));
    }

    #[test]
    fn generator_is_deterministic_and_valid() {
        for seed in 0..40 {
            let n = 1 + (seed as usize % 8);
            let g = random_instance(n, seed);
            assert_eq!(g, random_instance(n, seed));
            assert_eq!(g.interior_vertices().len(), n);
            assert!(validate_proper_triangular(&g).passed(), "seed {seed}");
        }
        assert!(fixtures::same_embedding(&random_instance(1, 7), &fixtures::w1()));
    }

    #[test]
    fn validity_matches_explicit_lengths() {
        for seed in 0..30 {
            let g = random_instance(1 + seed as usize % 6, seed);
            let set = enumerate_gadgets(&g);
            for s in reachable_states(&g, &set, DEFAULT_CAP).unwrap() {
                for id in stitchable(&s, &set) {
                    let explicit = s.apply(&g, &set, id).unwrap().is_partial_slant();
                    assert_eq!(check_valid_extension(&s, &set, id).unwrap(), explicit, "seed {seed}");
                }
            }
        }
    }
}
