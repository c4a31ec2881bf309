//! Face growing: admit gadgets through G-pairs and feasible M-triples
//! until nothing changes, then read off the answer.

pub mod backbone;
pub mod connection;
pub mod implied;
pub mod pocket;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::Result;
use crate::gadget::{enumerate_gadgets, initial_key, is_g_pair, terminal_key, GadgetId, GadgetKey, GadgetKind, GadgetSet};
use crate::graph::{validate_proper_triangular, PlaneGraph};
use crate::Error;

pub use backbone::{build_backbone_graph, consistent_triples, triples_from_backbone, BackboneGraph};
pub use implied::{consistent_union, gadget_labels, implied_labels, Implied, LabelMap};
pub use connection::{front_boundary, on_path, Connection, FrontBoundary, OnPath};
pub use backbone::{covers, junctions, BackboneNode};
pub use pocket::{build_auxiliary_graph, find_pockets, Auxiliary, Classifier, Pocket, PocketRecord, Seed};

/// One step of the growing loop: a gadget and the connections that
/// admitted it in that step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Admission {
    pub iteration: usize,
    pub gadget: GadgetKey,
    pub connections: Vec<Connection>,
}

#[derive(Debug, Clone)]
pub struct GrowingOutcome {
    pub has_slant: bool,
    pub gadgets: GadgetSet,
    pub initial: GadgetId,
    pub terminal: GadgetId,
    /// Admitted gadgets.
    pub admitted: BTreeSet<GadgetId>,
    /// Admitted connections.
    pub connections: BTreeSet<Connection>,
    pub trace: Vec<Admission>,
    pub iterations: usize,
    /// Pockets met while building backbone graphs.
    pub pockets: Vec<PocketRecord>,
}

/// Settings for one run of the growing loop.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Connections that hold from the start; their gadgets count as admitted.
    pub seeds: Vec<Connection>,
    /// Only these gadgets may be admitted, when set.
    pub allowed: Option<BTreeSet<GadgetId>>,
    /// Nesting level of auxiliary graphs, 0 for the input graph.
    pub depth: usize,
    pub max_depth: usize,
    /// Face count of the enclosing pocket; 0 means unbounded.
    pub face_budget: usize,
    /// Drop connections classified bad from backbone graphs. Off by
    /// default: classification is then only recorded.
    pub prune_bad: bool,
}

impl GrowingOutcome {
    /// Upper bound on loop iterations: every iteration stores at least one
    /// new connection, and there are at most N^2 pairs and N^3 triples.
    pub fn iteration_bound(&self) -> usize {
        let n = self.gadgets.len();
        n * n + n * n * n
    }
}

/// G-pairs `(id, right)` with `right` already admitted and able to
/// coexist with `id`.
pub fn candidate_g_pairs(
    g: &PlaneGraph,
    set: &GadgetSet,
    own: &[LabelMap],
    implied: &Implied,
    id: GadgetId,
) -> Vec<Connection> {
    let gad = &set.gadgets[id];
    let Some(&(a, b)) = gad.beta_edges().first() else { return Vec::new() };
    set.with_alpha_edge((a, b))
        .iter()
        .filter(|r| is_g_pair(gad, &set.gadgets[**r]))
        .filter(|r| match implied.get(r) {
            Some(Some(m)) => consistent_union(g, [m, &own[id]]).is_some(),
            _ => false,
        })
        .map(|&right| Connection::GPair { left: id, right })
        .collect()
}

/// M-triples around mirror-fan `id` certified by a backbone of its back
/// boundary whose gadgets can coexist.
#[allow(clippy::too_many_arguments)]
pub fn feasible_m_triples(
    g: &PlaneGraph,
    set: &GadgetSet,
    own: &[LabelMap],
    implied: &Implied,
    connections: &BTreeSet<Connection>,
    classifier: &mut Classifier,
    prune_bad: bool,
    id: GadgetId,
) -> Result<BTreeSet<Connection>> {
    let gad = &set.gadgets[id];
    debug_assert_eq!(gad.key.kind, GadgetKind::MirrorFan);
    let l = &gad.beta;
    // bad fractional connections do not take part in backbones
    let mut usable = BTreeMap::new();
    for c in connections {
        if on_path(set, c, l).is_some_and(|o| !o.contiguous) {
            usable.insert(*c, classifier.classify_connection(g, set, c, l)?);
        }
    }
    let bb = build_backbone_graph(set, connections, l, |n| !prune_bad || usable.get(&n.connection).copied().unwrap_or(true));
    let node_labels = |n: &BackboneNode| {
        let maps: Option<Vec<&LabelMap>> =
            n.connection.gadgets().iter().map(|h| implied.get(h).and_then(|m| m.as_ref())).collect();
        consistent_union(g, maps?)
    };
    Ok(consistent_triples(set, &bb, id, own[id].clone(), node_labels, |a, b| consistent_union(g, [a, b])))
}

/// Runs face growing on a validated graph.
pub fn run_face_growing(g: &PlaneGraph) -> Result<GrowingOutcome> {
    let report = validate_proper_triangular(g);
    if !report.passed() {
        return Err(Error::NotProperTriangular(serde_json::to_string(&report.violations).unwrap_or_default()));
    }
    let opts = RunOptions { max_depth: g.vertex_count(), ..Default::default() };
    run_on_gadgets(g, enumerate_gadgets(g), opts)
}

/// The growing loop proper.
pub fn run_on_gadgets(g: &PlaneGraph, gadgets: GadgetSet, opts: RunOptions) -> Result<GrowingOutcome> {
    let initial = gadgets.get(initial_key(g)?).ok_or_else(|| Error::Reconstruction("no initial gadget".into()))?;
    let terminal = gadgets.get(terminal_key(g)?).ok_or_else(|| Error::Reconstruction("no terminal gadget".into()))?;
    let mut admitted = BTreeSet::from([initial]);
    let mut connections = BTreeSet::new();
    for c in &opts.seeds {
        admitted.extend(c.gadgets());
        connections.insert(*c);
    }
    let mut classifier = Classifier::new(opts.depth, opts.max_depth);
    classifier.trusted.extend(opts.seeds.iter().copied());
    if opts.face_budget > 0 {
        classifier.face_budget = opts.face_budget;
    }
    let mut trace = Vec::new();
    let mut iterations = 0;
    let own: Vec<LabelMap> = (0..gadgets.len()).map(|id| gadget_labels(g, &gadgets, id)).collect();
    let mut implied = implied_labels(g, initial, &own, &admitted, &connections);
    loop {
        let mut changed = false;
        for id in 0..gadgets.len() {
            let gad = &gadgets.gadgets[id];
            if !gad.usable || opts.allowed.as_ref().is_some_and(|a| !a.contains(&id)) {
                continue;
            }
            let mut fresh: Vec<Connection> = candidate_g_pairs(g, &gadgets, &own, &implied, id)
                .into_iter()
                .filter(|c| !connections.contains(c))
                .collect();
            if gad.key.kind == GadgetKind::MirrorFan {
                let triples = feasible_m_triples(g, &gadgets, &own, &implied, &connections, &mut classifier, opts.prune_bad, id)?;
                fresh.extend(triples.into_iter().filter(|c| !connections.contains(c)));
            }
            if fresh.is_empty() {
                continue;
            }
            iterations += 1;
            admitted.insert(id);
            connections.extend(fresh.iter().copied());
            implied = implied_labels(g, initial, &own, &admitted, &connections);
            trace.push(Admission { iteration: iterations, gadget: gad.key, connections: fresh });
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Ok(GrowingOutcome {
        has_slant: matches!(implied.get(&terminal), Some(Some(_))),
        gadgets,
        initial,
        terminal,
        admitted,
        connections,
        trace,
        iterations,
        pockets: classifier.records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gadget::is_m_triple;
    use crate::oracle::random_instance;

    #[test]
    fn fixtures_decide_as_expected() {
        assert!(run_face_growing(&fixtures::w1()).unwrap().has_slant);
        assert!(run_face_growing(&fixtures::h2()).unwrap().has_slant);
        assert!(run_face_growing(&fixtures::p5()).unwrap().has_slant);
        assert!(!run_face_growing(&fixtures::no_slant()).unwrap().has_slant);
    }

    #[test]
    fn first_pairs_on_w1_pair_with_g0() {
        let g = fixtures::w1();
        let set = enumerate_gadgets(&g);
        let g0 = set.get(initial_key(&g).unwrap()).unwrap();
        let gt = set.get(terminal_key(&g).unwrap()).unwrap();
        let own: Vec<LabelMap> = (0..set.len()).map(|id| gadget_labels(&g, &set, id)).collect();
        let implied = implied_labels(&g, g0, &own, &BTreeSet::from([g0]), &BTreeSet::new());
        let mut found = Vec::new();
        for id in 0..set.len() {
            found.extend(candidate_g_pairs(&g, &set, &own, &implied, id));
        }
        // independent enumeration: every usable gadget whose back boundary
        // lies on the front of g0
        let expected: Vec<Connection> = (0..set.len())
            .filter(|&id| is_g_pair(&set.gadgets[id], &set.gadgets[g0]))
            .map(|id| Connection::GPair { left: id, right: g0 })
            .collect();
        assert_eq!(found, expected);
        assert_eq!(found, vec![Connection::GPair { left: gt, right: g0 }]);
    }

    #[test]
    fn unsupported_gadget_has_no_pairs() {
        let g = fixtures::p5();
        let set = enumerate_gadgets(&g);
        let g0 = set.get(initial_key(&g).unwrap()).unwrap();
        let gt = set.get(terminal_key(&g).unwrap()).unwrap();
        let own: Vec<LabelMap> = (0..set.len()).map(|id| gadget_labels(&g, &set, id)).collect();
        let implied = implied_labels(&g, g0, &own, &BTreeSet::from([g0]), &BTreeSet::new());
        // the terminal gadget's back boundary is far from vE on P5
        assert!(candidate_g_pairs(&g, &set, &own, &implied, gt).is_empty());
    }

    #[test]
    fn stores_are_closed_after_the_run() {
        for (n, seed) in [(3, 1), (5, 2), (6, 4), (7, 0)] {
            let g = random_instance(n, seed);
            let out = run_face_growing(&g).unwrap();
            let own: Vec<LabelMap> = (0..out.gadgets.len()).map(|id| gadget_labels(&g, &out.gadgets, id)).collect();
            let implied = implied_labels(&g, out.initial, &own, &out.admitted, &out.connections);
            let mut classifier = Classifier::new(0, g.vertex_count());
            for id in 0..out.gadgets.len() {
                if !out.gadgets.gadgets[id].usable {
                    continue;
                }
                for c in candidate_g_pairs(&g, &out.gadgets, &own, &implied, id) {
                    assert!(out.connections.contains(&c));
                }
                if out.gadgets.gadgets[id].key.kind == GadgetKind::MirrorFan {
                    let t = feasible_m_triples(&g, &out.gadgets, &own, &implied, &out.connections, &mut classifier, false, id)
                        .unwrap();
                    assert!(t.is_subset(&out.connections));
                }
            }
        }
    }

    #[test]
    fn iterations_stay_within_bound_and_triples_check_out() {
        for n in 1..=8 {
            for seed in 0..6 {
                let g = random_instance(n, seed);
                let out = run_face_growing(&g).unwrap();
                assert!(out.iterations <= out.iteration_bound());
                assert_eq!(out.iterations, out.trace.len());
                assert!(out.admitted.contains(&out.initial));
                for c in &out.connections {
                    if let Connection::MTriple { lower, middle, upper } = *c {
                        let s = &out.gadgets.gadgets;
                        assert!(is_m_triple(&s[lower], &s[middle], &s[upper]));
                    }
                    for h in c.gadgets() {
                        assert!(out.admitted.contains(&h));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_records_each_admission_once_per_step() {
        let out = run_face_growing(&fixtures::p5()).unwrap();
        for (i, a) in out.trace.iter().enumerate() {
            assert_eq!(a.iteration, i + 1);
            assert!(!a.connections.is_empty());
            assert!(a.connections.iter().all(|c| out.gadgets.gadgets[c.admitted()].key == a.gadget));
        }
    }

    #[test]
    fn invalid_graph_is_rejected() {
        let g = fixtures::w1();
        let bad = PlaneGraph::new((0..g.vertex_count()).map(|v| g.neighbors(v).to_vec()).collect(), None).unwrap();
        assert!(matches!(run_face_growing(&bad), Err(Error::NotProperTriangular(_))));
    }
}
