//! Counter-based deterministic randomness.
//!
//! Every random decision in this crate is a pure function of a master seed
//! and a position (edge id, sample index, batch index, ...). Nothing carries
//! mutable generator state, so results do not depend on evaluation order or
//! on how work is split across threads.

/// Weyl increment used by splitmix64.
const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64: one increment step followed by the finalizer. Full avalanche,
/// so consecutive inputs give statistically independent outputs.
#[inline]
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a derived seed with a counter (or another seed component).
#[inline]
pub fn mix2(a: u64, b: u64) -> u64 {
    mix64(a ^ b.wrapping_mul(GOLDEN).wrapping_add(0xd1b5_4a32_d192_ed03))
}

/// Maps 64 random bits to a float in `[0, 1)` with 53 significant bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps 64 random bits to `[0, n)` by multiply-shift. The bias is on the
/// order of `n / 2^64`, far below anything the statistical checks resolve.
#[inline]
pub fn bounded(bits: u64, n: u64) -> u64 {
    ((bits as u128 * n as u128) >> 64) as u64
}

/// Disjoint sub-domains of a master seed. Two streams derived from the same
/// master seed but different domains never share values.
pub mod domain {
    /// Realization sampling (live-edge worlds).
    pub const REALIZATION: u64 = 0x01;
    /// Per-simulation seeds inside a Monte Carlo spread estimate.
    pub const MONTE_CARLO: u64 = 0x02;
    /// Selection pool of RR-sets (the pool the greedy cover runs on).
    pub const RR_SELECTION: u64 = 0x03;
    /// Validation pool of RR-sets (the pool the stop test runs on).
    pub const RR_VALIDATION: u64 = 0x04;
    /// Per-batch selector seeds inside the adaptive loop.
    pub const BATCH: u64 = 0x05;
    /// Root choice inside one RR-set sample.
    pub const RR_ROOT: u64 = 0x06;
    /// Reverse coin flips inside one RR-set sample.
    pub const RR_FLIP: u64 = 0x07;
    /// Forward coin flips of a realization.
    pub const EDGE_FLIP: u64 = 0x08;
    /// Synthetic graph generation.
    pub const SYNTH: u64 = 0x09;
}

/// A stream of per-index seeds derived from `(master seed, domain)`.
///
/// `seed_at(i)` depends only on the stream identity and `i`, so samples can
/// be generated by any worker in any order.
#[derive(Clone, Copy, Debug)]
pub struct SeedStream {
    base: u64,
}

impl SeedStream {
    pub fn new(master: u64, domain: u64) -> Self {
        SeedStream {
            base: mix2(master, domain),
        }
    }

    #[inline]
    pub fn seed_at(&self, index: u64) -> u64 {
        mix2(self.base, index)
    }
}
