//! Labels every reachable state containing a gadget must carry.
//!
//! A gadget admitted through connection Λ sits in a state that also holds
//! Λ's other gadgets, so its implied labels are its own labels plus, over
//! all connections admitting it, the labels common to every such
//! connection's partners. The least fixpoint of this rule only ever
//! contains labels forced in every reachable state, so rejecting a
//! connection whose implied labels conflict never loses a real one.

use std::collections::{BTreeMap, BTreeSet};

use super::connection::Connection;
use crate::gadget::{GadgetId, GadgetSet};
use crate::graph::{PlaneGraph, VertexId};
use crate::rel::{block_class, block_pattern_feasible, Labeled};

/// Labels keyed by the sorted edge.
pub type LabelMap = BTreeMap<(VertexId, VertexId), Labeled>;

pub fn gadget_labels(g: &PlaneGraph, set: &GadgetSet, id: GadgetId) -> LabelMap {
    set.gadgets[id]
        .labels(g)
        .into_iter()
        .map(|(s, a, b)| ((a.min(b), a.max(b)), Labeled { set: s, tail: a, head: b }))
        .collect()
}

/// Adds `other` into `acc`; false on a conflicting label.
pub fn merge(acc: &mut LabelMap, other: &LabelMap) -> bool {
    for (k, l) in other {
        match acc.get(k) {
            Some(x) if x != l => return false,
            Some(_) => {}
            None => {
                acc.insert(*k, *l);
            }
        }
    }
    true
}

fn intersect(a: &LabelMap, b: &LabelMap) -> LabelMap {
    a.iter().filter(|(k, l)| b.get(k) == Some(l)).map(|(k, l)| (*k, *l)).collect()
}

/// Whether the labels can still extend to a regular edge labeling around
/// every interior vertex they touch.
pub fn locally_consistent(g: &PlaneGraph, labels: &LabelMap) -> bool {
    let touched: BTreeSet<VertexId> = labels.keys().flat_map(|&(a, b)| [a, b]).collect();
    touched.into_iter().filter(|&v| !g.is_corner(v)).all(|v| {
        let seq: Vec<Option<u8>> = g
            .neighbors(v)
            .iter()
            .map(|&u| labels.get(&(u.min(v), u.max(v))).map(|&l| block_class(l, v)))
            .collect();
        block_pattern_feasible(&seq)
    })
}

/// Merges the maps and checks the result.
pub fn consistent_union<'a>(g: &PlaneGraph, maps: impl IntoIterator<Item = &'a LabelMap>) -> Option<LabelMap> {
    let mut acc = LabelMap::new();
    for m in maps {
        if !merge(&mut acc, m) {
            return None;
        }
    }
    locally_consistent(g, &acc).then_some(acc)
}

/// Implied labels of admitted gadgets; `None` marks a gadget no
/// reachable state can contain.
pub type Implied = BTreeMap<GadgetId, Option<LabelMap>>;

/// Least fixpoint of the implied-label rule over the stored connections.
pub fn implied_labels(
    g: &PlaneGraph,
    initial: GadgetId,
    own: &[LabelMap],
    admitted: &BTreeSet<GadgetId>,
    connections: &BTreeSet<Connection>,
) -> Implied {
    let mut implied: Implied = admitted.iter().map(|&h| (h, Some(own[h].clone()))).collect();
    loop {
        let mut changed = false;
        for &h in admitted {
            if h == initial {
                continue;
            }
            let Some(current) = implied[&h].clone() else { continue };
            let mut common: Option<LabelMap> = None;
            let mut any = false;
            for c in connections.iter().filter(|c| c.admitted() == h) {
                let partners: Vec<GadgetId> = c.gadgets().into_iter().filter(|&p| p != h).collect();
                let maps: Option<Vec<&LabelMap>> =
                    partners.iter().map(|p| implied.get(p).and_then(|m| m.as_ref())).collect();
                // a connection through an impossible gadget is never real
                let Some(maps) = maps else { continue };
                let Some(u) = consistent_union(g, maps.into_iter().chain([&own[h]])) else { continue };
                any = true;
                common = Some(match common {
                    None => u,
                    Some(x) => intersect(&x, &u),
                });
            }
            let next = match (any, common) {
                (true, Some(x)) => consistent_union(g, [&own[h], &x]),
                _ => None,
            };
            match next {
                None => {
                    implied.insert(h, None);
                    changed = true;
                }
                Some(n) if n.len() > current.len() => {
                    implied.insert(h, Some(n));
                    changed = true;
                }
                Some(_) => {}
            }
        }
        if !changed {
            return implied;
        }
    }
}
