//! Greedy maximum coverage over an RR pool, with the running upper bound on
//! the optimum's coverage that the selectors' stop tests need.
//!
//! All bookkeeping is in integer set counts; fractions are derived at the
//! end, so the sandwich property can be asserted exactly.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeSet};
use crate::rrset::RrCollection;

/// Outcome of one greedy max-coverage run.
#[derive(Clone, Debug)]
pub struct MaxCoverResult {
    pub seeds: NodeSet,
    /// Sets covered by `seeds`.
    pub covered: u64,
    /// Numerator of the smallest upper bound observed (denominator `total`).
    pub upper_count: u64,
    /// Pool size the counts are fractions of.
    pub total: u64,
    /// `covered / total`.
    pub f_coverage: f64,
    /// `upper_count / total`: an upper bound on the coverage fraction of the
    /// best size-`b` set. May exceed 1.
    pub f_upper: f64,
}

/// Marginal coverage counts of every node w.r.t. a covered-set mask.
fn marginal_counts(c: &RrCollection, covered: &[bool]) -> Vec<u64> {
    let mut gains = vec![0u64; c.node_count()];
    for (sid, set) in c.sets().iter().enumerate() {
        if !covered[sid] {
            for &v in set {
                gains[v as usize] += 1;
            }
        }
    }
    gains
}

/// Sum of the `b` largest marginal gains among eligible nodes.
fn top_b_gain_sum(c: &RrCollection, gains: &[u64], b: usize) -> u64 {
    let mut eligible_gains: Vec<u64> = c.eligible().iter().map(|&v| gains[v as usize]).collect();
    eligible_gains.sort_unstable_by(|a, b| b.cmp(a));
    eligible_gains.iter().take(b).sum()
}

fn upper_count_given(c: &RrCollection, covered_count: u64, gains: &[u64], b: usize) -> u64 {
    covered_count + top_b_gain_sum(c, gains, b)
}

/// Upper bound on the best size-`b` coverage fraction given the partial
/// solution `s`: `F(S) + Σ` of the `b` largest singleton marginal gains.
pub fn upper_bound_given_set(c: &RrCollection, s: &NodeSet, b: usize) -> f64 {
    let covered = c.covered_mask(s);
    let covered_count = covered.iter().filter(|&&x| x).count() as u64;
    let gains = marginal_counts(c, &covered);
    let num = upper_count_given(c, covered_count, &gains, b);
    num as f64 / c.total().max(1) as f64
}

/// Greedy max coverage: `b` steps of best-marginal selection with ties going
/// to the smallest node id, lazily evaluated. Also returns the minimum of
/// the upper bound over all `b + 1` partial solutions (the empty one
/// included). Zero-gain steps pick the smallest-id unused eligible node, so
/// exactly `b` nodes are always returned.
pub fn max_cover(c: &RrCollection, b: usize) -> Result<MaxCoverResult> {
    if b == 0 {
        return Err(Error::Input("cover size b must be at least 1".into()));
    }
    if b > c.eligible().len() {
        return Err(Error::Input(format!(
            "cover size {b} exceeds the {} eligible nodes",
            c.eligible().len()
        )));
    }
    if c.total() == 0 {
        return Err(Error::State(
            "cannot run max cover on an empty RR pool".into(),
        ));
    }

    let total = c.total() as u64;
    let mut covered = vec![false; c.total()];
    let mut gains = marginal_counts(c, &covered);
    let mut upper_count = upper_count_given(c, 0, &gains, b);

    // Lazy greedy: entries are (gain at push time, id). Marginal gains only
    // shrink, so whenever the popped entry's stored gain is still current it
    // is the true maximum; ordering by Reverse(id) makes equal-gain pops
    // come out smallest id first, same as a naive scan.
    let mut heap: BinaryHeap<(u64, Reverse<NodeId>)> = c
        .eligible()
        .iter()
        .map(|&v| (gains[v as usize], Reverse(v)))
        .collect();

    let mut seeds = NodeSet::new(c.node_count());
    let mut covered_count = 0u64;
    for _ in 0..b {
        let pick = loop {
            let (stored, Reverse(v)) = heap.pop().expect("b <= eligible nodes");
            let current = gains[v as usize];
            if stored == current {
                break v;
            }
            heap.push((current, Reverse(v)));
        };

        seeds.insert(pick);
        covered_count += gains[pick as usize];
        for &sid in c.sets_containing(pick) {
            if !covered[sid as usize] {
                covered[sid as usize] = true;
                for &v in &c.sets()[sid as usize] {
                    gains[v as usize] -= 1;
                }
            }
        }
        debug_assert_eq!(gains[pick as usize], 0);

        upper_count = upper_count.min(upper_count_given(c, covered_count, &gains, b));
    }

    Ok(MaxCoverResult {
        seeds,
        covered: covered_count,
        upper_count,
        total,
        f_coverage: covered_count as f64 / total as f64,
        f_upper: upper_count as f64 / total as f64,
    })
}
