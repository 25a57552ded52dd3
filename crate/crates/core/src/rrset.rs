//! Reverse-reachable set sampling and coverage bookkeeping.
//!
//! A random RR-set is the set of alive nodes that reach a uniformly random
//! alive root in a random live-edge outcome. The fraction of a pool covered
//! by a seed set, scaled by the alive node count, is an unbiased spread
//! estimate. Pools are rebuilt from scratch for every residual graph;
//! carrying samples across batches would bias the estimates, which the epoch
//! guard below makes impossible.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::rng::{bounded, domain, mix2, unit_f64, SeedStream};

/// Samples one RR-set rooted at a uniformly random alive node.
pub fn sample_rr_set(g: &Graph, seed: u64) -> Result<Vec<NodeId>> {
    let alive = g.alive_ids();
    if alive.is_empty() {
        return Err(Error::State(
            "cannot sample an RR-set: no alive nodes".into(),
        ));
    }
    let root = alive[bounded(mix2(seed, domain::RR_ROOT), alive.len() as u64) as usize];
    Ok(sample_rr_set_from_root(g, root, seed))
}

/// Reverse BFS from `root`: each in-edge encountered is live independently
/// with its probability. Coins are a pure function of `(seed, edge id)` and
/// are only drawn for edges actually reached. The result is sorted.
pub fn sample_rr_set_from_root(g: &Graph, root: NodeId, seed: u64) -> Vec<NodeId> {
    debug_assert!(g.is_alive(root));
    let flip_base = mix2(seed, domain::RR_FLIP);
    let mut visited = g.node_set();
    visited.insert(root);
    let mut queue = vec![root];
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        for (u, p, e) in g.in_edges(v) {
            if g.is_alive(u) && !visited.contains(u) && unit_f64(mix2(flip_base, e as u64)) < p {
                visited.insert(u);
                queue.push(u);
            }
        }
    }
    queue.sort_unstable();
    queue
}

/// Append-only pool of RR-sets with an inverted node → set-id index.
#[derive(Clone, Debug)]
pub struct RrCollection {
    sets: Vec<Vec<NodeId>>,
    index: Vec<Vec<u32>>,
    eligible: Vec<NodeId>,
    graph_epoch: u64,
}

impl RrCollection {
    /// An empty pool bound to the residual state of `g`.
    pub fn new(g: &Graph) -> Self {
        RrCollection {
            sets: Vec::new(),
            index: vec![Vec::new(); g.node_count()],
            eligible: g.alive_ids().to_vec(),
            graph_epoch: g.epoch(),
        }
    }

    /// A pool built from explicit sets over the universe `[0, node_count)`,
    /// every node eligible. Used by fixtures and synthetic coverage tests.
    pub fn from_sets(node_count: usize, sets: Vec<Vec<NodeId>>) -> Result<Self> {
        let mut c = RrCollection {
            sets: Vec::new(),
            index: vec![Vec::new(); node_count],
            eligible: (0..node_count as NodeId).collect(),
            graph_epoch: 0,
        };
        for set in sets {
            if set.is_empty() {
                return Err(Error::Input("RR-sets must be non-empty".into()));
            }
            if set.iter().any(|&v| v as usize >= node_count) {
                return Err(Error::Input(format!(
                    "set {set:?} exceeds universe {node_count}"
                )));
            }
            c.push_set(set);
        }
        Ok(c)
    }

    fn push_set(&mut self, set: Vec<NodeId>) {
        let id = self.sets.len() as u32;
        for &v in &set {
            self.index[v as usize].push(id);
        }
        self.sets.push(set);
    }

    pub fn total(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<NodeId>] {
        &self.sets
    }

    /// Set ids containing `v`.
    pub fn sets_containing(&self, v: NodeId) -> &[u32] {
        &self.index[v as usize]
    }

    pub fn node_count(&self) -> usize {
        self.index.len()
    }

    /// Nodes eligible for selection (alive in the source residual graph).
    pub fn eligible(&self) -> &[NodeId] {
        &self.eligible
    }

    pub fn graph_epoch(&self) -> u64 {
        self.graph_epoch
    }

    /// Appends `count` samples. Sample `i` of this pool's lifetime always
    /// uses `stream.seed_at(i)`, so the pool's contents depend only on the
    /// stream and the final size, not on call or thread boundaries.
    pub fn extend_with(&mut self, g: &Graph, count: usize, stream: &SeedStream) -> Result<()> {
        if count == 0 {
            return Err(Error::Input("extension count must be positive".into()));
        }
        if g.epoch() != self.graph_epoch {
            return Err(Error::State(
                "RR pool was sampled on a different residual graph; rebuild it instead of extending".into(),
            ));
        }
        let start = self.sets.len() as u64;
        let fresh: Vec<Vec<NodeId>> = (0..count as u64)
            .into_par_iter()
            .map(|i| sample_rr_set(g, stream.seed_at(start + i)))
            .collect::<Result<_>>()?;
        for set in fresh {
            self.push_set(set);
        }
        Ok(())
    }

    /// `(Cov, F)`: how many sets intersect `seeds`, and the covered fraction.
    pub fn coverage_fraction(&self, seeds: &NodeSet) -> (usize, f64) {
        let covered = self.covered_mask(seeds);
        let cov = covered.iter().filter(|&&c| c).count();
        let f = if self.sets.is_empty() {
            0.0
        } else {
            cov as f64 / self.sets.len() as f64
        };
        (cov, f)
    }

    /// Per-set covered flags for `seeds`.
    pub fn covered_mask(&self, seeds: &NodeSet) -> Vec<bool> {
        let mut covered = vec![false; self.sets.len()];
        for v in seeds.iter() {
            if (v as usize) < self.index.len() {
                for &sid in &self.index[v as usize] {
                    covered[sid as usize] = true;
                }
            }
        }
        covered
    }

    /// Binary dump for debugging: magic, version, epoch, universe, eligible
    /// nodes, then each set length-prefixed.
    pub fn dump<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(b"RRC1")?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&self.graph_epoch.to_le_bytes())?;
        w.write_all(&(self.index.len() as u64).to_le_bytes())?;
        w.write_all(&(self.eligible.len() as u64).to_le_bytes())?;
        for &v in &self.eligible {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(self.sets.len() as u64).to_le_bytes())?;
        for set in &self.sets {
            w.write_all(&(set.len() as u64).to_le_bytes())?;
            for &v in set {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn restore<R: Read>(r: &mut R) -> Result<Self> {
        fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
            let mut buf = [0u8; 4];
            r.read_exact(&mut buf)?;
            Ok(u32::from_le_bytes(buf))
        }
        fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            Ok(u64::from_le_bytes(buf))
        }
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"RRC1" {
            return Err(Error::Validation("bad RR collection magic".into()));
        }
        let version = read_u32(r)?;
        if version != 1 {
            return Err(Error::Validation(format!(
                "unsupported RR dump version {version}"
            )));
        }
        let graph_epoch = read_u64(r)?;
        let universe = read_u64(r)? as usize;
        let eligible_len = read_u64(r)? as usize;
        let mut eligible = Vec::with_capacity(eligible_len);
        for _ in 0..eligible_len {
            eligible.push(read_u32(r)?);
        }
        let total = read_u64(r)? as usize;
        let mut c = RrCollection {
            sets: Vec::with_capacity(total),
            index: vec![Vec::new(); universe],
            eligible,
            graph_epoch,
        };
        for _ in 0..total {
            let len = read_u64(r)? as usize;
            let mut set = Vec::with_capacity(len);
            for _ in 0..len {
                let v = read_u32(r)?;
                if v as usize >= universe {
                    return Err(Error::Validation(
                        "RR dump references node outside universe".into(),
                    ));
                }
                set.push(v);
            }
            if set.is_empty() {
                return Err(Error::Validation("RR dump contains an empty set".into()));
            }
            c.push_set(set);
        }
        Ok(c)
    }
}
