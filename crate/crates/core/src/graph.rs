//! Directed social network with per-edge activation probabilities.
//!
//! The topology is stored once in CSR form (forward and reverse) and shared
//! behind an `Arc`; residual graphs are a fresh alive-mask over the same
//! arrays, so node and edge ids stay stable across batches and no edge data
//! is copied.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::mix2;

/// Dense node id in `[0, n)`.
pub type NodeId = u32;
/// Dense edge id in `[0, m)`; the id is the edge's position in the forward CSR.
pub type EdgeId = u32;

/// A set of node ids over a fixed universe `[0, n)`, backed by a bitmap.
/// Membership tests are O(1); iteration is in ascending id order.
#[derive(Clone, PartialEq, Eq)]
pub struct NodeSet {
    universe: usize,
    words: Vec<u64>,
    len: usize,
}

impl NodeSet {
    pub fn new(universe: usize) -> Self {
        NodeSet {
            universe,
            words: vec![0; universe.div_ceil(64)],
            len: 0,
        }
    }

    pub fn from_nodes(universe: usize, nodes: &[NodeId]) -> Self {
        let mut s = NodeSet::new(universe);
        for &v in nodes {
            s.insert(v);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Inserts `v`, returning true if it was not already present.
    pub fn insert(&mut self, v: NodeId) -> bool {
        assert!((v as usize) < self.universe, "node id {v} out of universe");
        let (w, b) = (v as usize / 64, v as usize % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        if fresh {
            self.words[w] |= 1 << b;
            self.len += 1;
        }
        fresh
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        let (w, b) = (v as usize / 64, v as usize % 64);
        w < self.words.len() && self.words[w] & (1 << b) != 0
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        assert_eq!(self.universe, other.universe, "universe mismatch");
        self.len = 0;
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
            self.len += w.count_ones() as usize;
        }
    }

    /// Ascending iteration over members.
    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros();
                    rest &= rest - 1;
                    Some((wi * 64) as u32 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<NodeId> for NodeSet {
    /// Builds a set whose universe is just large enough for the given ids.
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let nodes: Vec<NodeId> = iter.into_iter().collect();
        let universe = nodes.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
        NodeSet::from_nodes(universe, &nodes)
    }
}

/// Immutable CSR topology shared by a graph and all of its residuals.
#[derive(Debug)]
pub(crate) struct Topology {
    pub node_count: usize,
    pub edge_count: usize,
    pub out_offsets: Vec<usize>,
    pub out_targets: Vec<NodeId>,
    pub out_probs: Vec<f64>,
    pub in_offsets: Vec<usize>,
    pub in_sources: Vec<NodeId>,
    pub in_probs: Vec<f64>,
    pub in_edge_ids: Vec<EdgeId>,
}

/// Directed graph under the independent cascade model.
///
/// Cloning is cheap: the topology is shared, only the alive mask is owned.
#[derive(Clone, Debug)]
pub struct Graph {
    topo: Arc<Topology>,
    alive: Vec<bool>,
    alive_ids: Vec<NodeId>,
    epoch: u64,
}

impl Graph {
    /// Builds a graph from explicit directed edges. Edge ids are assigned in
    /// CSR order: grouped by source node, input order preserved per source.
    pub fn from_edges(node_count: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Graph> {
        for &(u, v, p) in edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) references a node out of range [0, {node_count})"
                )));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Validation(format!(
                    "probability {p} of edge ({u}, {v}) outside [0, 1]"
                )));
            }
        }

        let n = node_count;
        let m = edges.len();
        let mut out_deg = vec![0usize; n];
        let mut in_deg = vec![0usize; n];
        for &(u, v, _) in edges {
            out_deg[u as usize] += 1;
            in_deg[v as usize] += 1;
        }
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for v in 0..n {
            out_offsets[v + 1] = out_offsets[v] + out_deg[v];
            in_offsets[v + 1] = in_offsets[v] + in_deg[v];
        }

        let mut out_targets = vec![0 as NodeId; m];
        let mut out_probs = vec![0.0; m];
        let mut cursor = out_offsets.clone();
        for &(u, v, p) in edges {
            let pos = cursor[u as usize];
            out_targets[pos] = v;
            out_probs[pos] = p;
            cursor[u as usize] += 1;
        }

        // Reverse CSR carries the forward edge id so both traversal
        // directions agree on which coin belongs to which edge.
        let mut in_sources = vec![0 as NodeId; m];
        let mut in_probs = vec![0.0; m];
        let mut in_edge_ids = vec![0 as EdgeId; m];
        let mut cursor = in_offsets.clone();
        for u in 0..n {
            for e in out_offsets[u]..out_offsets[u + 1] {
                let v = out_targets[e] as usize;
                let pos = cursor[v];
                in_sources[pos] = u as NodeId;
                in_probs[pos] = out_probs[e];
                in_edge_ids[pos] = e as EdgeId;
                cursor[v] += 1;
            }
        }

        let topo = Arc::new(Topology {
            node_count: n,
            edge_count: m,
            out_offsets,
            out_targets,
            out_probs,
            in_offsets,
            in_sources,
            in_probs,
            in_edge_ids,
        });
        Ok(Graph {
            alive: vec![true; n],
            alive_ids: (0..n as NodeId).collect(),
            epoch: epoch_of(&topo, &[]),
            topo,
        })
    }

    pub fn node_count(&self) -> usize {
        self.topo.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.topo.edge_count
    }

    /// Number of alive nodes (`n_i` of the current residual graph).
    pub fn alive_count(&self) -> usize {
        self.alive_ids.len()
    }

    /// Alive node ids in ascending order.
    pub fn alive_ids(&self) -> &[NodeId] {
        &self.alive_ids
    }

    #[inline]
    pub fn is_alive(&self, v: NodeId) -> bool {
        self.alive[v as usize]
    }

    /// Identifier of the residual state; derived from the set of removed
    /// nodes, so equal removal sets give equal epochs regardless of how the
    /// residual was reached.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Out-edges of `u` as `(target, probability, edge id)`, including edges
    /// whose target is no longer alive.
    #[inline]
    pub fn out_edges(&self, u: NodeId) -> impl Iterator<Item = (NodeId, f64, EdgeId)> + '_ {
        let t = &*self.topo;
        (t.out_offsets[u as usize]..t.out_offsets[u as usize + 1])
            .map(move |e| (t.out_targets[e], t.out_probs[e], e as EdgeId))
    }

    /// In-edges of `v` as `(source, probability, edge id)`.
    #[inline]
    pub fn in_edges(&self, v: NodeId) -> impl Iterator<Item = (NodeId, f64, EdgeId)> + '_ {
        let t = &*self.topo;
        (t.in_offsets[v as usize]..t.in_offsets[v as usize + 1])
            .map(move |e| (t.in_sources[e], t.in_probs[e], t.in_edge_ids[e]))
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.topo.out_offsets[u as usize + 1] - self.topo.out_offsets[u as usize]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.topo.in_offsets[v as usize + 1] - self.topo.in_offsets[v as usize]
    }

    pub fn edge_prob(&self, e: EdgeId) -> f64 {
        self.topo.out_probs[e as usize]
    }

    /// First edge id from `u` to `v`, if one exists.
    pub fn edge_id(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.out_edges(u)
            .find(|&(t, _, _)| t == v)
            .map(|(_, _, e)| e)
    }

    /// Endpoints `(source, target)` of edge `e`.
    pub fn edge_endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        let pos = self
            .topo
            .out_offsets
            .partition_point(|&off| off <= e as usize)
            - 1;
        (pos as NodeId, self.topo.out_targets[e as usize])
    }

    /// A fresh empty node set over this graph's id universe.
    pub fn node_set(&self) -> NodeSet {
        NodeSet::new(self.node_count())
    }
}

fn epoch_of(topo: &Topology, dead_ascending: &[NodeId]) -> u64 {
    let mut h = mix2(topo.node_count as u64, topo.edge_count as u64);
    for &v in dead_ascending {
        h = mix2(h, v as u64);
    }
    h
}

/// Loads an edge list: one `u v` or `u v p` per line, `#` comments ignored.
///
/// A leading `n m` count line is honored when the declared counts are
/// consistent with the rest of the file; otherwise the line is read as an
/// edge. Without a count line, `n` is one past the largest node id, so gaps
/// become implicit isolated nodes. Edges given without a probability get
/// `p = 0` and are expected to be filled in by [`assign_wc_probabilities`].
pub fn load_edge_list<P: AsRef<Path>>(path: P, directed: bool) -> Result<Graph> {
    let file = File::open(path.as_ref())?;
    parse_edge_list(BufReader::new(file), directed)
}

pub(crate) fn parse_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<Graph> {
    struct Line {
        number: usize,
        fields: Vec<f64>,
    }

    let mut lines = Vec::new();
    for (idx, raw) in reader.lines().enumerate() {
        let raw = raw?;
        let number = idx + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut fields = Vec::with_capacity(3);
        for tok in text.split_whitespace() {
            let value: f64 = tok.parse().map_err(|_| Error::Parse {
                line: number,
                msg: format!("expected a number, found {tok:?}"),
            })?;
            fields.push(value);
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: number,
                msg: format!(
                    "expected \"u v\" or \"u v p\", found {} fields",
                    fields.len()
                ),
            });
        }
        lines.push(Line { number, fields });
    }

    if lines.is_empty() {
        return Err(Error::Validation("edge list contains no data lines".into()));
    }

    let as_node = |value: f64, number: usize| -> Result<NodeId> {
        if value.fract() != 0.0 || value < 0.0 || value > u32::MAX as f64 {
            return Err(Error::Parse {
                line: number,
                msg: format!("expected a nonnegative integer node id, found {value}"),
            });
        }
        Ok(value as NodeId)
    };

    // Count-line detection: the first line declares (n, m) only if the rest
    // of the file matches the declaration.
    let mut start = 0;
    let mut declared_n = None;
    if lines[0].fields.len() == 2 {
        let n = lines[0].fields[0];
        let m = lines[0].fields[1];
        if n.fract() == 0.0
            && m.fract() == 0.0
            && n >= 0.0
            && m >= 0.0
            && m as usize == lines.len() - 1
        {
            let max_id = lines[1..]
                .iter()
                .flat_map(|l| l.fields.iter().take(2))
                .fold(-1.0f64, |acc, &v| acc.max(v));
            if max_id < n {
                declared_n = Some(n as usize);
                start = 1;
            }
        }
    }

    let mut edges: Vec<(NodeId, NodeId, f64)> = Vec::with_capacity(lines.len() - start);
    let mut max_id = 0u32;
    for line in &lines[start..] {
        let u = as_node(line.fields[0], line.number)?;
        let v = as_node(line.fields[1], line.number)?;
        let p = if line.fields.len() == 3 {
            line.fields[2]
        } else {
            0.0
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Validation(format!(
                "line {}: probability {p} outside [0, 1]",
                line.number
            )));
        }
        max_id = max_id.max(u).max(v);
        edges.push((u, v, p));
        if !directed {
            edges.push((v, u, p));
        }
    }
    if edges.is_empty() {
        return Err(Error::Validation("edge list contains no edges".into()));
    }

    let n = declared_n.unwrap_or(max_id as usize + 1);
    Graph::from_edges(n, &edges)
}

/// Weighted-cascade probabilities: every edge `(u, v)` gets `1 / in-degree(v)`.
pub fn assign_wc_probabilities(g: &Graph) -> Graph {
    let t = &*g.topo;
    let mut out_probs = vec![0.0; t.edge_count];
    for v in 0..t.node_count {
        let deg = t.in_offsets[v + 1] - t.in_offsets[v];
        for pos in t.in_offsets[v]..t.in_offsets[v + 1] {
            out_probs[t.in_edge_ids[pos] as usize] = 1.0 / deg as f64;
        }
    }
    let mut in_probs = vec![0.0; t.edge_count];
    for pos in 0..t.edge_count {
        in_probs[pos] = out_probs[t.in_edge_ids[pos] as usize];
    }
    let topo = Arc::new(Topology {
        node_count: t.node_count,
        edge_count: t.edge_count,
        out_offsets: t.out_offsets.clone(),
        out_targets: t.out_targets.clone(),
        out_probs,
        in_offsets: t.in_offsets.clone(),
        in_sources: t.in_sources.clone(),
        in_probs,
        in_edge_ids: t.in_edge_ids.clone(),
    });
    Graph {
        epoch: {
            let dead: Vec<NodeId> = (0..t.node_count as NodeId)
                .filter(|&v| !g.alive[v as usize])
                .collect();
            epoch_of(&topo, &dead)
        },
        alive: g.alive.clone(),
        alive_ids: g.alive_ids.clone(),
        topo,
    }
}

/// Removes all `activated` nodes: they stop being seed candidates and edges
/// incident to them stop being traversable. Ids of surviving nodes are
/// unchanged.
pub fn residual_subgraph(g: &Graph, activated: &NodeSet) -> Result<Graph> {
    if activated.iter().any(|v| v as usize >= g.node_count()) {
        return Err(Error::Input(format!(
            "activated set contains a node id >= {}",
            g.node_count()
        )));
    }
    let mut alive = g.alive.clone();
    for v in activated.iter() {
        alive[v as usize] = false;
    }
    let alive_ids: Vec<NodeId> = (0..g.node_count() as NodeId)
        .filter(|&v| alive[v as usize])
        .collect();
    let dead: Vec<NodeId> = (0..g.node_count() as NodeId)
        .filter(|&v| !alive[v as usize])
        .collect();
    Ok(Graph {
        topo: Arc::clone(&g.topo),
        epoch: epoch_of(&g.topo, &dead),
        alive,
        alive_ids,
    })
}
