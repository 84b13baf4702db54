//! Directed follower network with common-friends tie strengths.
//!
//! An edge `(u, v)` means `u` follows `v`, so messages flow from `v` to `u`.
//! Adjacency is stored in compressed rows sorted by node id: the position of
//! a followee in the follower's row is the edge index, and every per-edge
//! array in the crate (strengths, retweet counters) is keyed by it.

mod generate;
mod io;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use generate::{generate_network, GeneratorParams, DEFAULT_TRIAD_PROB};
pub use io::{load_edge_list, parse_edge_list, strengths_path_for};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// A directed follow relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub follower: NodeId,
    pub followee: NodeId,
}

impl Edge {
    pub fn new(follower: impl Into<NodeId>, followee: impl Into<NodeId>) -> Self {
        Edge {
            follower: follower.into(),
            followee: followee.into(),
        }
    }

    pub fn reversed(self) -> Self {
        Edge {
            follower: self.followee,
            followee: self.follower,
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoopAt { line: usize, node: NodeId },
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("invalid generator parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable directed graph `G(V, E, W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    node_count: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    strengths: Vec<f64>,
}

impl NetworkGraph {
    /// Builds a graph over `node_count` nodes. Duplicate edges are collapsed;
    /// self-loops and out-of-range endpoints are rejected. Common-friends
    /// strengths are computed before returning.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut list: Vec<Edge> = Vec::new();
        for e in edges {
            if e.follower == e.followee {
                return Err(GraphError::SelfLoop(e.follower));
            }
            for n in [e.follower, e.followee] {
                if n.index() >= node_count {
                    return Err(GraphError::UnknownNode(n));
                }
            }
            list.push(e);
        }
        list.sort_unstable();
        list.dedup();

        let mut out_offsets = vec![0usize; node_count + 1];
        let mut in_offsets = vec![0usize; node_count + 1];
        for e in &list {
            out_offsets[e.follower.index() + 1] += 1;
            in_offsets[e.followee.index() + 1] += 1;
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets: Vec<NodeId> = list.iter().map(|e| e.followee).collect();
        let mut in_sources = vec![NodeId(0); list.len()];
        let mut cursor = in_offsets.clone();
        // `list` is sorted by follower, so each followers row comes out sorted.
        for e in &list {
            let slot = &mut cursor[e.followee.index()];
            in_sources[*slot] = e.follower;
            *slot += 1;
        }

        let mut graph = NetworkGraph {
            node_count,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            strengths: Vec::new(),
        };
        graph.strengths = compute_common_friends_strengths(&graph);
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.index() < self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count as u32).map(NodeId)
    }

    /// Edges in index order, i.e. sorted by `(follower, followee)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.node_count).flat_map(move |u| {
            self.followees(NodeId(u as u32))
                .iter()
                .map(move |&v| Edge::new(NodeId(u as u32), v))
        })
    }

    /// Nodes that `u` follows, sorted.
    pub fn followees(&self, u: NodeId) -> &[NodeId] {
        &self.out_targets[self.out_offsets[u.index()]..self.out_offsets[u.index() + 1]]
    }

    /// Nodes that follow `u`, sorted. These receive whatever `u` posts.
    pub fn followers(&self, u: NodeId) -> &[NodeId] {
        &self.in_sources[self.in_offsets[u.index()]..self.in_offsets[u.index() + 1]]
    }

    pub fn edge_index(&self, follower: NodeId, followee: NodeId) -> Option<usize> {
        if !self.contains(follower) {
            return None;
        }
        self.followees(follower)
            .binary_search(&followee)
            .ok()
            .map(|pos| self.out_offsets[follower.index()] + pos)
    }

    pub fn has_edge(&self, follower: NodeId, followee: NodeId) -> bool {
        self.edge_index(follower, followee).is_some()
    }

    /// True when the reverse of `edge` is also in `E`.
    pub fn is_reciprocal(&self, edge: Edge) -> bool {
        self.has_edge(edge.followee, edge.follower)
    }

    /// Common-friends strength of an existing edge.
    pub fn strength(&self, follower: NodeId, followee: NodeId) -> Option<f64> {
        self.edge_index(follower, followee).map(|i| self.strengths[i])
    }

    /// Strengths aligned with [`NetworkGraph::edges`].
    pub fn strengths(&self) -> &[f64] {
        &self.strengths
    }

    pub fn in_degree(&self, u: NodeId) -> usize {
        self.followers(u).len()
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.followees(u).len()
    }

    /// Undirected neighbour set of `u` (followers and followees merged), sorted.
    pub fn neighbors(&self, u: NodeId) -> Vec<NodeId> {
        merge_sorted(self.followees(u), self.followers(u))
    }

    /// Number of unordered node pairs linked in both directions.
    pub fn reciprocal_pair_count(&self) -> usize {
        self.edges()
            .filter(|e| e.follower < e.followee && self.is_reciprocal(*e))
            .count()
    }

    /// SHA-256 over the canonical edge list, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.node_count as u64).to_le_bytes());
        for e in self.edges() {
            hasher.update(e.follower.0.to_le_bytes());
            hasher.update(e.followee.0.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

fn merge_sorted(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn count_common(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Overlap of two sorted undirected neighbour lists, `i` and `j` excluded from
/// each other's list. For adjacent nodes this is `c / (k_i - 1 + k_j - 1 - c)`.
fn overlap(i: NodeId, ni: &[NodeId], j: NodeId, nj: &[NodeId]) -> f64 {
    // Neither list contains its own node, so the intersection never holds i or j.
    let common = count_common(ni, nj);
    let others_i = ni.len() - usize::from(ni.binary_search(&j).is_ok());
    let others_j = nj.len() - usize::from(nj.binary_search(&i).is_ok());
    let denom = others_i as i64 + others_j as i64 - common as i64;
    if denom <= 0 {
        0.0
    } else {
        common as f64 / denom as f64
    }
}

/// Common-friends tie strength between `i` and `j` on the undirected
/// projection of the graph. Zero when the pair shares no context at all.
pub fn common_friends_strength(i: NodeId, j: NodeId, graph: &NetworkGraph) -> Result<f64, GraphError> {
    for n in [i, j] {
        if !graph.contains(n) {
            return Err(GraphError::UnknownNode(n));
        }
    }
    Ok(overlap(i, &graph.neighbors(i), j, &graph.neighbors(j)))
}

/// Strength `W` for every edge, aligned with [`NetworkGraph::edges`].
pub fn compute_common_friends_strengths(graph: &NetworkGraph) -> Vec<f64> {
    let neighbors: Vec<Vec<NodeId>> = graph.nodes().map(|u| graph.neighbors(u)).collect();
    graph
        .edges()
        .map(|e| {
            overlap(
                e.follower,
                &neighbors[e.follower.index()],
                e.followee,
                &neighbors[e.followee.index()],
            )
        })
        .collect()
}
