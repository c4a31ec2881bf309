use proptest::prelude::*;
use slantrel::backtrack::{reconstruct_slant_rel, PathPolicy};
use slantrel::cartogram::realize_areas;
use slantrel::gadget::{enumerate_gadgets, gadget_count_bound, is_g_pair, is_m_triple, GadgetKind};
use slantrel::growing::{build_backbone_graph, run_face_growing, Connection};
use slantrel::layout::{is_area_universal_geometric, rel_to_layout};
use slantrel::oracle::{enumerate_rels_limited, has_slant_rel_bruteforce, random_instance};
use slantrel::rel::{derive_rel_from_layout, is_slant, validate_rel, Rel};
use slantrel::graph::validate_proper_triangular;
use slantrel::PlaneGraph;

fn instance() -> impl Strategy<Value = PlaneGraph> {
    (1usize..=7, 0u64..10_000).prop_map(|(n, seed)| random_instance(n, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_graphs_are_proper_triangular(g in instance()) {
        prop_assert!(validate_proper_triangular(&g).passed());
        prop_assert_eq!(g.edge_count(), 3 * g.vertex_count() - 7);
        let back = PlaneGraph::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), g.to_json());
    }

    #[test]
    fn gadget_boundaries_share_their_ends(g in instance()) {
        let set = enumerate_gadgets(&g);
        prop_assert!(set.len() <= gadget_count_bound(&g));
        for gad in &set.gadgets {
            prop_assert_eq!(gad.alpha[0], gad.beta[0]);
            prop_assert_eq!(gad.alpha.last(), gad.beta.last());
        }
    }

    #[test]
    fn decision_matches_exhaustive_search(g in instance()) {
        let out = run_face_growing(&g).unwrap();
        prop_assert_eq!(out.has_slant, has_slant_rel_bruteforce(&g, 8).unwrap());
        prop_assert!(out.iterations <= out.iteration_bound());
    }

    #[test]
    fn stored_connections_are_well_formed(g in instance()) {
        let out = run_face_growing(&g).unwrap();
        let set = &out.gadgets.gadgets;
        for c in &out.connections {
            match *c {
                Connection::GPair { left, right } => {
                    prop_assert!(is_g_pair(&set[left], &set[right]));
                    prop_assert!(out.admitted.contains(&left) && out.admitted.contains(&right));
                }
                Connection::MTriple { lower, middle, upper } => {
                    prop_assert!(is_m_triple(&set[lower], &set[middle], &set[upper]));
                    prop_assert_eq!(set[middle].key.kind, GadgetKind::MirrorFan);
                }
            }
        }
        for gad in set.iter().filter(|x| x.key.kind == GadgetKind::MirrorFan) {
            let bb = build_backbone_graph(&out.gadgets, &out.connections, &gad.beta, |_| true);
            prop_assert!(bb.is_acyclic());
        }
    }

    #[test]
    fn positive_runs_reconstruct_to_slant_labelings(g in instance(), last in any::<bool>()) {
        let out = run_face_growing(&g).unwrap();
        prop_assume!(out.has_slant);
        let policy = if last { PathPolicy::Last } else { PathPolicy::First };
        let r = reconstruct_slant_rel(&g, &out, policy).unwrap();
        prop_assert!(validate_rel(&g, &r).passed());
        prop_assert!(is_slant(&g, &r).unwrap().is_none());
        prop_assert_eq!(Rel::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn layouts_read_back_and_match_slantness(g in instance()) {
        for r in enumerate_rels_limited(&g, 8, 40).unwrap() {
            let l = rel_to_layout(&g, &r).unwrap();
            prop_assert_eq!(derive_rel_from_layout(&g, &l).unwrap(), r.clone());
            prop_assert_eq!(is_slant(&g, &r).unwrap().is_none(), is_area_universal_geometric(&l));
        }
    }

    #[test]
    fn cartograms_hit_their_targets(g in instance(), weights in prop::collection::vec(0.2f64..5.0, 11)) {
        let out = run_face_growing(&g).unwrap();
        prop_assume!(out.has_slant);
        let r = reconstruct_slant_rel(&g, &out, PathPolicy::First).unwrap();
        let areas: Vec<f64> = (0..g.vertex_count()).map(|v| weights[v % weights.len()]).collect();
        let real = realize_areas(&g, &r, &areas).unwrap();
        for v in g.interior_vertices() {
            let err = (real.layout.rect(v).area() - areas[v]).abs() / areas[v];
            prop_assert!(err <= 1e-6, "vertex {} off by {}", v, err);
        }
        prop_assert_eq!(derive_rel_from_layout(&g, &real.layout).unwrap(), r);
    }
}
