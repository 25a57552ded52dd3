//! End-to-end walkthrough on a six-node fixture with a pinned realization:
//! the full-adoption feedback story, residual composition, and the
//! adaptive-vs-one-shot comparison, all checked against exact oracles.

use infmax_core::{
    exact_opt, exact_spread, monte_carlo_spread, observe_feedback, propagate, residual_subgraph,
    sample_realization, synth::random_fixture, Graph, NodeSet, Realization,
};

/// v1..v6 as ids 0..5. Edges: v1→v2, v1→v3, v1→v4, v4→v5, v4→v6, v3→v6.
fn six_node_graph() -> Graph {
    Graph::from_edges(
        6,
        &[
            (0, 1, 0.8),
            (0, 2, 0.3),
            (0, 3, 0.8),
            (3, 4, 0.8),
            (3, 5, 0.3),
            (2, 5, 0.8),
        ],
    )
    .unwrap()
}

/// The pinned world: v1→v2, v1→v4, v4→v5, v3→v6 live; v1→v3, v4→v6 blocked.
fn pinned_world(g: &Graph) -> Realization {
    let mut live = vec![false; g.edge_count()];
    for (u, v) in [(0u32, 1u32), (0, 3), (3, 4), (2, 5)] {
        live[g.edge_id(u, v).unwrap() as usize] = true;
    }
    Realization::from_live_edges(g, live).unwrap()
}

#[test]
fn first_batch_cascade_and_revealed_edges() {
    let g = six_node_graph();
    let phi = pinned_world(&g);
    let seeds = NodeSet::from_nodes(6, &[0]);

    let reached = propagate(&g, &phi, &seeds).unwrap();
    assert_eq!(reached.to_vec(), vec![0, 1, 3, 4]);

    let fb = observe_feedback(&g, &phi, &seeds).unwrap();
    assert_eq!(fb.activated.to_vec(), vec![0, 1, 3, 4]);
    // Every out-edge of an activated node is revealed, including the failed
    // attempts on v3 and v6.
    assert_eq!(fb.revealed_edges.len(), 5);
    let status_of = |u, v| {
        let e = g.edge_id(u, v).unwrap();
        fb.revealed_edges
            .iter()
            .find(|&&(id, _)| id == e)
            .map(|&(_, live)| live)
    };
    assert_eq!(status_of(0, 2), Some(false), "v1 -> v3 revealed blocked");
    assert_eq!(status_of(3, 5), Some(false), "v4 -> v6 revealed blocked");
    assert_eq!(status_of(0, 1), Some(true));
    assert_eq!(status_of(2, 5), None, "v3's edges stay hidden");
}

#[test]
fn second_batch_on_residual_reaches_six_total() {
    let g = six_node_graph();
    let phi = pinned_world(&g);

    let fb = observe_feedback(&g, &phi, &NodeSet::from_nodes(6, &[0])).unwrap();
    let residual = residual_subgraph(&g, &fb.activated).unwrap();
    assert_eq!(residual.alive_ids(), &[2, 5]);

    // The exact oracle picks v3 on the residual (spread 1.8 beats 1.0).
    let (best, value) = exact_opt(&residual, 1).unwrap();
    assert_eq!(best.to_vec(), vec![2]);
    assert!((value - 1.8).abs() < 1e-12);

    let second = propagate(&residual, &phi, &best).unwrap();
    let mut total = fb.activated.clone();
    total.union_with(&second);
    assert_eq!(total.len(), 6, "both batches together influence everything");

    // One-shot seeding of {v1, v4} on the same world stops at 4 nodes.
    let oneshot = propagate(&g, &phi, &NodeSet::from_nodes(6, &[0, 3])).unwrap();
    assert_eq!(oneshot.len(), 4);
}

#[test]
fn monte_carlo_agrees_with_exact_oracle_on_random_fixture() {
    let g = random_fixture(8, 12, 0x5eed);
    let seeds = NodeSet::from_nodes(8, &[1, 6]);
    let exact = exact_spread(&g, &seeds).unwrap();
    let sims = 200_000;
    let mc = monte_carlo_spread(&g, &seeds, sims, 31).unwrap();
    // Spread is in [2, 8]: the per-world standard deviation is at most 3.
    let se = 3.0 / (sims as f64).sqrt();
    assert!(
        (mc - exact).abs() <= 3.0 * se,
        "monte carlo {mc} vs exact {exact} (3 se = {})",
        3.0 * se
    );
}

#[test]
fn sampled_worlds_compose_identically_across_batch_splits() {
    // Sweep a handful of sampled worlds: splitting the same seed set over
    // two batches never changes the final activated set.
    let g = six_node_graph();
    for seed in 0..50u64 {
        let phi = sample_realization(&g, seed);
        let all = NodeSet::from_nodes(6, &[0, 2]);
        let single = propagate(&g, &phi, &all).unwrap();

        let fb = observe_feedback(&g, &phi, &NodeSet::from_nodes(6, &[0])).unwrap();
        let residual = residual_subgraph(&g, &fb.activated).unwrap();
        let mut union = fb.activated.clone();
        if residual.is_alive(2) {
            let second = propagate(&residual, &phi, &NodeSet::from_nodes(6, &[2])).unwrap();
            union.union_with(&second);
        }
        assert_eq!(single.to_vec(), union.to_vec(), "world {seed}");
    }
}
