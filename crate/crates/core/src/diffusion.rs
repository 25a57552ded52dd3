//! Live-edge realizations, forward propagation, full-adoption feedback and
//! Monte Carlo spread estimation.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, NodeSet};
use crate::rng::{domain, mix2, unit_f64};

/// One sampled world: every edge is independently live with its probability.
///
/// The seeded form derives each edge's status lazily as a pure function of
/// `(master seed, edge id)`, so no bit array is materialized; the explicit
/// form pins an arbitrary live/blocked vector (used by fixtures).
#[derive(Clone, Debug)]
pub struct Realization {
    edge_count: usize,
    repr: Repr,
}

#[derive(Clone, Debug)]
enum Repr {
    Seeded(u64),
    Explicit(Arc<[bool]>),
}

impl Realization {
    /// Master seed of a sampled realization, if any.
    pub fn master_seed(&self) -> Option<u64> {
        match self.repr {
            Repr::Seeded(s) => Some(s),
            Repr::Explicit(_) => None,
        }
    }

    /// Pins an explicit live/blocked bit per edge of `g`.
    pub fn from_live_edges(g: &Graph, live: Vec<bool>) -> Result<Realization> {
        if live.len() != g.edge_count() {
            return Err(Error::Input(format!(
                "live vector has {} entries, graph has {} edges",
                live.len(),
                g.edge_count()
            )));
        }
        Ok(Realization {
            edge_count: g.edge_count(),
            repr: Repr::Explicit(live.into()),
        })
    }

    /// Status of edge `e` in this world.
    #[inline]
    pub fn is_live(&self, g: &Graph, e: EdgeId) -> bool {
        debug_assert_eq!(
            self.edge_count,
            g.edge_count(),
            "realization/graph mismatch"
        );
        match &self.repr {
            Repr::Seeded(seed) => {
                unit_f64(mix2(mix2(*seed, domain::EDGE_FLIP), e as u64)) < g.edge_prob(e)
            }
            Repr::Explicit(bits) => bits[e as usize],
        }
    }

    /// Materializes the per-edge status vector (tests and debugging).
    pub fn materialize(&self, g: &Graph) -> Vec<bool> {
        (0..g.edge_count() as EdgeId)
            .map(|e| self.is_live(g, e))
            .collect()
    }
}

/// Samples a realization of `g`. Identical `(graph, seed)` always yields
/// identical edge statuses, regardless of how it is later traversed.
pub fn sample_realization(g: &Graph, seed: u64) -> Realization {
    Realization {
        edge_count: g.edge_count(),
        repr: Repr::Seeded(seed),
    }
}

/// Everything revealed by seeding one batch under full-adoption feedback:
/// the downstream cascade plus the status of every out-edge of every
/// activated node.
#[derive(Clone, Debug)]
pub struct Feedback {
    pub activated: NodeSet,
    /// `(edge id, live)` for each out-edge of each activated node, listed in
    /// ascending node order then edge order.
    pub revealed_edges: Vec<(EdgeId, bool)>,
}

fn check_seeds(g: &Graph, seeds: &NodeSet) -> Result<()> {
    for v in seeds.iter() {
        if v as usize >= g.node_count() || !g.is_alive(v) {
            return Err(Error::Input(format!("seed {v} is not an alive node")));
        }
    }
    Ok(())
}

fn bfs_live(g: &Graph, phi: &Realization, seeds: &NodeSet) -> NodeSet {
    let mut visited = g.node_set();
    let mut queue: Vec<u32> = Vec::with_capacity(seeds.len());
    for v in seeds.iter() {
        visited.insert(v);
        queue.push(v);
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for (v, _, e) in g.out_edges(u) {
            if g.is_alive(v) && !visited.contains(v) && phi.is_live(g, e) {
                visited.insert(v);
                queue.push(v);
            }
        }
    }
    visited
}

/// All alive nodes reachable from `seeds` over live edges (seeds included).
pub fn propagate(g: &Graph, phi: &Realization, seeds: &NodeSet) -> Result<NodeSet> {
    check_seeds(g, seeds)?;
    Ok(bfs_live(g, phi, seeds))
}

/// Runs one batch and reports full-adoption feedback.
pub fn observe_feedback(g: &Graph, phi: &Realization, seeds: &NodeSet) -> Result<Feedback> {
    let activated = propagate(g, phi, seeds)?;
    let mut revealed_edges = Vec::new();
    for u in activated.iter() {
        for (_, _, e) in g.out_edges(u) {
            revealed_edges.push((e, phi.is_live(g, e)));
        }
    }
    Ok(Feedback {
        activated,
        revealed_edges,
    })
}

/// Mean realized spread of `seeds` over `sims` independent realizations.
///
/// Per-simulation realization seeds derive from `(seed, simulation index)`,
/// and per-world counts are summed as integers, so the result is identical
/// no matter how the simulations are split across threads.
pub fn monte_carlo_spread(g: &Graph, seeds: &NodeSet, sims: usize, seed: u64) -> Result<f64> {
    if sims == 0 {
        return Err(Error::Input("sims must be at least 1".into()));
    }
    check_seeds(g, seeds)?;
    let base = mix2(seed, domain::MONTE_CARLO);
    let total: u64 = (0..sims as u64)
        .into_par_iter()
        .map(|i| {
            let phi = sample_realization(g, mix2(base, i));
            bfs_live(g, &phi, seeds).len() as u64
        })
        .sum();
    Ok(total as f64 / sims as f64)
}
