//! Shared fixtures for the benchmarks.

use infmax_core::rng::{domain, SeedStream};
use infmax_core::synth::pa_graph_wc;
use infmax_core::{Graph, RrCollection};

pub const BENCH_SEED: u64 = 0xbe7c;

/// The standard benchmark graph: 10K-node preferential attachment with
/// weighted-cascade probabilities.
pub fn bench_graph(n: usize) -> Graph {
    pa_graph_wc(n, 2, BENCH_SEED)
}

/// A pre-sampled RR pool over `g`.
pub fn bench_pool(g: &Graph, size: usize) -> RrCollection {
    let mut pool = RrCollection::new(g);
    pool.extend_with(g, size, &SeedStream::new(BENCH_SEED, domain::RR_SELECTION))
        .expect("pool");
    pool
}
