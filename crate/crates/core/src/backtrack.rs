//! Reading a slant REL back out of the stores of a successful run.
//!
//! The walk goes west to east. It starts from the front boundary of the
//! terminal gadget and repeatedly takes a pending gadget whose front lies
//! on the current cut, labels it, and replaces its front by its back. The
//! gadget then hands over to the partner of one of its stored G-pairs or,
//! for a mirror-fan, to the gadgets along a backbone of its back boundary.
//! Choices that lead to conflicting labels are undone.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::{GadgetId, GadgetKind, GadgetSet};
use crate::graph::{PlaneGraph, VertexId};
use crate::growing::{build_backbone_graph, Connection, GrowingOutcome};
use crate::rel::{is_slant, validate_rel, Rel};

/// Which backbone path or partner to try first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathPolicy {
    #[default]
    First,
    Last,
}

#[derive(Debug, Clone)]
pub struct ReconstructionState {
    /// Current cut, south to north.
    pub cut: Vec<VertexId>,
    pub rel: Rel,
    /// Gadgets still to be processed.
    pub pending: BTreeSet<GadgetId>,
    pub done: BTreeSet<GadgetId>,
}

/// Where each edge of `l` is covered by the fronts of `ids`.
fn fronts_on(set: &GadgetSet, ids: impl IntoIterator<Item = GadgetId>, l: &[VertexId]) -> Vec<Option<GadgetId>> {
    let mut cover = vec![None; l.len().saturating_sub(1)];
    for id in ids {
        let a = &set.gadgets[id].alpha;
        for (k, w) in l.windows(2).enumerate() {
            if a.windows(2).any(|x| x == w) {
                cover[k] = Some(id);
            }
        }
    }
    cover
}

struct Search<'a> {
    g: &'a PlaneGraph,
    out: &'a GrowingOutcome,
    policy: PathPolicy,
    failed: HashSet<(Vec<VertexId>, BTreeSet<GadgetId>, BTreeSet<GadgetId>)>,
    steps: usize,
}

impl Search<'_> {
    /// Ways to cover the back boundary of `id` with stored connections.
    fn supports(&self, id: GadgetId) -> Vec<Vec<GadgetId>> {
        let set = &self.out.gadgets;
        let gad = &set.gadgets[id];
        let mut options: Vec<Vec<GadgetId>> = Vec::new();
        if id == self.out.initial {
            return vec![Vec::new()];
        }
        for c in &self.out.connections {
            if let Connection::GPair { left, right } = *c {
                if left == id {
                    options.push(vec![right]);
                }
            }
        }
        if gad.key.kind == GadgetKind::MirrorFan {
            let bb = build_backbone_graph(set, &self.out.connections, &gad.beta, |_| true);
            let mut seen = BTreeSet::new();
            for path in bb.all_paths() {
                let chain = bb.decode(&path);
                let triple = Connection::MTriple { lower: chain[0], middle: id, upper: *chain.last().unwrap() };
                if self.out.connections.contains(&triple) && seen.insert(chain.clone()) {
                    options.push(chain);
                }
            }
        }
        if self.policy == PathPolicy::Last {
            options.reverse();
        }
        options
    }

    fn run(&mut self, st: ReconstructionState) -> Result<Option<Rel>> {
        self.steps += 1;
        let set = &self.out.gadgets;
        if st.pending.is_empty() {
            let c = self.g.require_corners()?;
            if st.cut != [c.south, c.east, c.north] {
                return Ok(None);
            }
            let ok = validate_rel(self.g, &st.rel).passed() && is_slant(self.g, &st.rel)?.is_none();
            return Ok(ok.then_some(st.rel));
        }
        let key = (st.cut.clone(), st.pending.clone(), st.done.clone());
        if self.failed.contains(&key) {
            return Ok(None);
        }
        // a minimal gadget: its front lies on the cut
        let Some(id) = st.pending.iter().copied().find(|&p| {
            let a = &set.gadgets[p].alpha;
            st.cut.windows(a.len()).any(|w| w == a.as_slice())
        }) else {
            self.failed.insert(key);
            return Ok(None);
        };
        let gad = &set.gadgets[id];
        let mut rel = st.rel.clone();
        for (s, a, b) in gad.labels(self.g) {
            if rel.insert(s, a, b).is_err() {
                self.failed.insert(key);
                return Ok(None);
            }
        }
        let cut = splice_back(&st.cut, &gad.alpha, &gad.beta);
        let mut pending = st.pending.clone();
        pending.remove(&id);
        let mut done = st.done.clone();
        done.insert(id);
        let claimed = fronts_on(set, pending.iter().copied(), &gad.beta);
        for chain in self.supports(id) {
            if chain.iter().any(|x| done.contains(x)) {
                continue;
            }
            // pending gadgets already covering part of the back boundary
            // must be the ones chosen there
            let mine = fronts_on(set, chain.iter().copied(), &gad.beta);
            if id != self.out.initial && mine.iter().any(Option::is_none) {
                continue;
            }
            if claimed.iter().zip(&mine).any(|(c, m)| c.is_some() && c != m) {
                continue;
            }
            let mut next = pending.clone();
            next.extend(chain.iter().copied());
            let child = ReconstructionState { cut: cut.clone(), rel: rel.clone(), pending: next, done: done.clone() };
            if let Some(r) = self.run(child)? {
                return Ok(Some(r));
            }
        }
        self.failed.insert(key);
        Ok(None)
    }
}

/// Replaces the stretch `alpha` of `cut` by `beta`.
fn splice_back(cut: &[VertexId], alpha: &[VertexId], beta: &[VertexId]) -> Vec<VertexId> {
    let i = cut.windows(alpha.len()).position(|w| w == alpha).expect("front on the cut");
    let mut out = cut[..i].to_vec();
    out.extend(beta);
    out.extend_from_slice(&cut[i + alpha.len()..]);
    out
}

/// Reconstructs a slant REL from a run that reported one.
pub fn reconstruct_slant_rel(g: &PlaneGraph, out: &GrowingOutcome, policy: PathPolicy) -> Result<Rel> {
    if !out.has_slant {
        return Err(Error::Reconstruction("the run found no slant REL".into()));
    }
    let gt = &out.gadgets.gadgets[out.terminal];
    let c = g.require_corners()?;
    let start = ReconstructionState {
        cut: vec![c.south, c.west, c.north],
        rel: Rel::new(),
        pending: BTreeSet::from([out.terminal]),
        done: BTreeSet::new(),
    };
    debug_assert_eq!(gt.alpha, start.cut);
    let mut search = Search { g, out, policy, failed: HashSet::new(), steps: 0 };
    search
        .run(start)?
        .ok_or_else(|| Error::Reconstruction(format!("no minimal gadget sequence after {} steps", search.steps)))
}
