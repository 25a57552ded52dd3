//! Exact, exponential-time reference computations on tiny graphs.
//!
//! These enumerate all `2^m` live-edge outcomes and are used to validate the
//! sampling-based estimators and the selectors' approximation properties.
//! They do not scale and are not meant to.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};

/// Largest edge count accepted for exhaustive enumeration.
pub const MAX_ORACLE_EDGES: usize = 24;

fn check_capacity(g: &Graph) -> Result<()> {
    if g.edge_count() > MAX_ORACLE_EDGES {
        return Err(Error::Capacity(format!(
            "exact enumeration over 2^{} outcomes refused (limit 2^{MAX_ORACLE_EDGES})",
            g.edge_count()
        )));
    }
    Ok(())
}

fn reach_count(
    g: &Graph,
    mask: u64,
    seeds: &NodeSet,
    visited: &mut Vec<bool>,
    queue: &mut Vec<u32>,
) -> usize {
    visited.clear();
    visited.resize(g.node_count(), false);
    queue.clear();
    for v in seeds.iter() {
        visited[v as usize] = true;
        queue.push(v);
    }
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for (v, _, e) in g.out_edges(u) {
            if mask & (1 << e) != 0 && g.is_alive(v) && !visited[v as usize] {
                visited[v as usize] = true;
                queue.push(v);
            }
        }
    }
    queue.len()
}

/// Expected spread of `seeds`, exactly: the probability-weighted sum of
/// reachability counts over every live-edge outcome. Summation runs in
/// binary counting order over edge ids, so the result is bit-stable.
pub fn exact_spread(g: &Graph, seeds: &NodeSet) -> Result<f64> {
    check_capacity(g)?;
    for v in seeds.iter() {
        if v as usize >= g.node_count() || !g.is_alive(v) {
            return Err(Error::Input(format!("seed {v} is not an alive node")));
        }
    }
    if seeds.is_empty() {
        return Ok(0.0);
    }
    let m = g.edge_count();
    let probs: Vec<f64> = (0..m as u32).map(|e| g.edge_prob(e)).collect();
    let mut visited = Vec::new();
    let mut queue = Vec::new();
    let mut total = 0.0f64;
    for mask in 0..(1u64 << m) {
        let mut pr = 1.0f64;
        for (e, &p) in probs.iter().enumerate() {
            pr *= if mask & (1 << e) != 0 { p } else { 1.0 - p };
        }
        if pr == 0.0 {
            continue;
        }
        total += pr * reach_count(g, mask, seeds, &mut visited, &mut queue) as f64;
    }
    Ok(total)
}

/// Exhaustive optimum: the size-`b` seed set of alive nodes with the largest
/// exact expected spread. Ties go to the lexicographically smallest set
/// (subsets are enumerated in lexicographic order and only strict
/// improvements replace the incumbent).
pub fn exact_opt(g: &Graph, b: usize) -> Result<(NodeSet, f64)> {
    check_capacity(g)?;
    let alive = g.alive_ids();
    if b == 0 || b > alive.len() {
        return Err(Error::Input(format!(
            "subset size {b} outside [1, {}]",
            alive.len()
        )));
    }

    let mut best: Option<(NodeSet, f64)> = None;
    let mut picks: Vec<usize> = (0..b).collect();
    loop {
        let subset: Vec<u32> = picks.iter().map(|&i| alive[i]).collect();
        let set = NodeSet::from_nodes(g.node_count(), &subset);
        let value = exact_spread(g, &set)?;
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((set, value));
        }

        // Next lexicographic combination of indices into `alive`.
        let mut i = b;
        loop {
            if i == 0 {
                return Ok(best.unwrap());
            }
            i -= 1;
            if picks[i] != i + alive.len() - b {
                break;
            }
        }
        picks[i] += 1;
        for j in i + 1..b {
            picks[j] = picks[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::monte_carlo_spread;
    use crate::graph::Graph;

    #[test]
    fn isolated_seed_spreads_to_itself() {
        let g = Graph::from_edges(3, &[(1, 2, 0.7)]).unwrap();
        let v = exact_spread(&g, &NodeSet::from_nodes(3, &[0])).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn single_edge_closed_form() {
        let g = Graph::from_edges(2, &[(0, 1, 0.5)]).unwrap();
        let v = exact_spread(&g, &NodeSet::from_nodes(2, &[0])).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
    }

    #[test]
    fn triangle_matches_monte_carlo() {
        let g = Graph::from_edges(
            3,
            &[
                (0, 1, 0.5),
                (1, 2, 0.5),
                (2, 0, 0.5),
                (1, 0, 0.5),
                (2, 1, 0.5),
                (0, 2, 0.5),
            ],
        )
        .unwrap();
        let seeds = NodeSet::from_nodes(3, &[0]);
        let exact = exact_spread(&g, &seeds).unwrap();
        let sims = 1_000_000;
        let mc = monte_carlo_spread(&g, &seeds, sims, 77).unwrap();
        // Per-world spread is in [1, 3]; sd of the mean is below 1/sqrt(sims).
        let se = 1.0 / (sims as f64).sqrt();
        assert!((mc - exact).abs() <= 3.0 * se, "mc {mc} vs exact {exact}");
    }

    #[test]
    fn capacity_guard_trips() {
        let edges: Vec<_> = (0..25u32).map(|i| (i, i + 1, 0.5)).collect();
        let g = Graph::from_edges(26, &edges).unwrap();
        assert!(matches!(
            exact_spread(&g, &NodeSet::from_nodes(26, &[0])),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn opt_saturates_at_all_nodes() {
        let g = Graph::from_edges(4, &[(0, 1, 0.2), (2, 3, 0.9)]).unwrap();
        let (set, value) = exact_opt(&g, 4).unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(value, 4.0);
    }

    #[test]
    fn opt_finds_star_center() {
        let g =
            Graph::from_edges(5, &[(2, 0, 1.0), (2, 1, 1.0), (2, 3, 1.0), (2, 4, 1.0)]).unwrap();
        let (set, value) = exact_opt(&g, 1).unwrap();
        assert_eq!(set.to_vec(), vec![2]);
        assert_eq!(value, 5.0);
    }

    #[test]
    fn opt_single_matches_best_singleton() {
        let g = fixture();
        let (_, opt1) = exact_opt(&g, 1).unwrap();
        let best = (0..g.node_count() as u32)
            .map(|v| exact_spread(&g, &NodeSet::from_nodes(g.node_count(), &[v])).unwrap())
            .fold(f64::MIN, f64::max);
        assert_eq!(opt1, best);
    }

    fn fixture() -> Graph {
        Graph::from_edges(
            6,
            &[
                (0, 1, 0.6),
                (0, 2, 0.3),
                (1, 3, 0.8),
                (2, 3, 0.4),
                (3, 4, 0.5),
                (4, 5, 0.9),
                (5, 0, 0.2),
                (2, 5, 0.7),
            ],
        )
        .unwrap()
    }

    /// f(S) = exact_spread(S) is monotone and submodular; checked over every
    /// pair S ⊆ T on the 6-node fixture.
    #[test]
    fn spread_is_monotone_submodular_on_fixture() {
        let g = fixture();
        let n = g.node_count();
        let mut f = vec![0.0f64; 1 << n];
        for bits in 0..(1u32 << n) {
            let members: Vec<u32> = (0..n as u32).filter(|&v| bits & (1 << v) != 0).collect();
            f[bits as usize] = exact_spread(&g, &NodeSet::from_nodes(n, &members)).unwrap();
            assert!(f[bits as usize] >= members.len() as f64 - 1e-12);
            assert!(f[bits as usize] <= n as f64 + 1e-12);
        }
        for t in 0..(1u32 << n) {
            // Enumerate subsets s of t.
            let mut s = t;
            loop {
                for v in 0..n as u32 {
                    if t & (1 << v) == 0 {
                        let gain_s = f[(s | 1 << v) as usize] - f[s as usize];
                        let gain_t = f[(t | 1 << v) as usize] - f[t as usize];
                        assert!(
                            gain_s >= gain_t - 1e-9,
                            "submodularity violated at s={s:b} t={t:b} v={v}"
                        );
                    }
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & t;
            }
        }
    }
}
