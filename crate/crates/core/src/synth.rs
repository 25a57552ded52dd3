//! Deterministic synthetic graphs for tests, verification and benchmarks.

use crate::graph::{assign_wc_probabilities, Graph, NodeId};
use crate::rng::{bounded, domain, mix2, unit_f64, SeedStream};

/// Undirected preferential-attachment edge list: nodes arrive one at a time
/// and attach `edges_per_node` links to existing nodes chosen proportionally
/// to degree (by sampling a repeated-endpoint list), without replacement per
/// step.
pub fn preferential_attachment(
    n: usize,
    edges_per_node: usize,
    seed: u64,
) -> Vec<(NodeId, NodeId)> {
    assert!(edges_per_node >= 1);
    assert!(n > edges_per_node);
    let stream = SeedStream::new(seed, domain::SYNTH);
    let mut counter = 0u64;
    let mut draw = |limit: u64| {
        let v = bounded(stream.seed_at(counter), limit);
        counter += 1;
        v
    };

    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(n * edges_per_node);
    // Each endpoint appears in `targets` once per incident edge, so a
    // uniform draw from it is a degree-proportional draw over nodes.
    let mut targets: Vec<NodeId> = Vec::with_capacity(2 * n * edges_per_node);

    let seed_nodes = edges_per_node + 1;
    for v in 1..seed_nodes {
        edges.push((v as NodeId, (v - 1) as NodeId));
        targets.push(v as NodeId);
        targets.push((v - 1) as NodeId);
    }
    for v in seed_nodes..n {
        let mut chosen: Vec<NodeId> = Vec::with_capacity(edges_per_node);
        while chosen.len() < edges_per_node {
            let t = targets[draw(targets.len() as u64) as usize];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            edges.push((v as NodeId, t));
            targets.push(v as NodeId);
            targets.push(t);
        }
    }
    edges
}

/// Preferential-attachment graph as used by the experiments: undirected
/// edges doubled into arcs, weighted-cascade probabilities.
pub fn pa_graph_wc(n: usize, edges_per_node: usize, seed: u64) -> Graph {
    let mut arcs = Vec::new();
    for (u, v) in preferential_attachment(n, edges_per_node, seed) {
        arcs.push((u, v, 0.0));
        arcs.push((v, u, 0.0));
    }
    let g = Graph::from_edges(n, &arcs).expect("generated arcs are valid");
    assign_wc_probabilities(&g)
}

/// Small random directed fixture: `m` distinct non-loop edges with
/// probabilities in `[0.1, 0.9]`. Sized for the exact oracles.
pub fn random_fixture(n: usize, m: usize, seed: u64) -> Graph {
    assert!(n >= 2);
    assert!(m <= n * (n - 1), "at most one edge per ordered pair");
    let stream = SeedStream::new(seed, domain::SYNTH);
    let mut counter = 0u64;
    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(m);
    while edges.len() < m {
        let bits = stream.seed_at(counter);
        counter += 1;
        let u = bounded(bits, n as u64) as NodeId;
        let v = bounded(mix2(bits, 1), n as u64) as NodeId;
        if u == v || edges.iter().any(|&(a, b, _)| a == u && b == v) {
            continue;
        }
        let p = 0.1 + 0.8 * unit_f64(mix2(bits, 2));
        edges.push((u, v, p));
    }
    Graph::from_edges(n, &edges).expect("generated edges are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pa_has_expected_shape() {
        let n = 500;
        let g = pa_graph_wc(n, 2, 42);
        assert_eq!(g.node_count(), n);
        // 2 seed edges + 2 per arriving node, doubled into arcs.
        let undirected = 2 + (n - 3) * 2;
        assert_eq!(g.edge_count(), 2 * undirected);
        // Weighted cascade: incoming probabilities of each node sum to 1.
        for v in 0..n as u32 {
            if g.in_degree(v) > 0 {
                let total: f64 = g.in_edges(v).map(|(_, p, _)| p).sum();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
        // Deterministic.
        let h = pa_graph_wc(n, 2, 42);
        assert_eq!(
            (0..g.edge_count() as u32)
                .map(|e| g.edge_endpoints(e))
                .collect::<Vec<_>>(),
            (0..h.edge_count() as u32)
                .map(|e| h.edge_endpoints(e))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn fixtures_are_distinct_edges_in_range() {
        let g = random_fixture(8, 12, 7);
        assert_eq!(g.node_count(), 8);
        assert_eq!(g.edge_count(), 12);
        let mut seen = std::collections::HashSet::new();
        for e in 0..12u32 {
            let (u, v) = g.edge_endpoints(e);
            assert_ne!(u, v);
            assert!(seen.insert((u, v)));
            let p = g.edge_prob(e);
            assert!((0.1..=0.9).contains(&p));
        }
    }
}
