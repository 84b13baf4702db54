use serde::{Deserialize, Serialize};

use super::{Edge, GraphError, NetworkGraph, NodeId};
use crate::rng::SimRng;

/// Parameters of the synthetic follower-graph generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub node_count: usize,
    /// Followees chosen by each arriving node.
    pub out_degree_target: usize,
    /// Probability that a new follow edge is immediately followed back.
    pub reciprocity_prob: f64,
    /// Probability that a follow after the first goes to a followee of the
    /// previously chosen node instead of a fresh preferential pick.
    pub triad_prob: f64,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            node_count: 10_000,
            out_degree_target: 10,
            reciprocity_prob: 0.3,
            triad_prob: DEFAULT_TRIAD_PROB,
            seed: 1,
        }
    }
}

pub const DEFAULT_TRIAD_PROB: f64 = 1.0;

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.node_count < 2 {
            return Err(GraphError::Params("node_count must be >= 2".into()));
        }
        if self.out_degree_target < 1 {
            return Err(GraphError::Params("out_degree_target must be >= 1".into()));
        }
        if self.node_count < self.out_degree_target + 1 {
            return Err(GraphError::Params(format!(
                "node_count {} < out_degree_target + 1 = {}",
                self.node_count,
                self.out_degree_target + 1
            )));
        }
        for (name, p) in [
            ("reciprocity_prob", self.reciprocity_prob),
            ("triad_prob", self.triad_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::Params(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        if self.node_count > u32::MAX as usize {
            return Err(GraphError::Params("node_count exceeds u32 range".into()));
        }
        Ok(())
    }
}

/// Grows a weakly connected follower graph. Node `t` arrives and follows
/// `min(t, out_degree_target)` distinct earlier nodes, each picked with
/// probability proportional to `in_degree + 1`, or with `triad_prob` among
/// the followees of its previous pick. Each follow is returned with
/// probability `reciprocity_prob`.
pub fn generate_network(params: &GeneratorParams) -> Result<NetworkGraph, GraphError> {
    params.validate()?;
    let n = params.node_count;
    let m = params.out_degree_target;
    let mut rng = SimRng::seed_from_u64(params.seed);

    let mut followees: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut edges: Vec<Edge> = Vec::with_capacity(n * m * 2);
    // One entry per node plus one per in-edge: uniform draws are in-degree + 1 weighted.
    let mut pool: Vec<NodeId> = Vec::with_capacity(n * (m + 2));
    pool.push(NodeId(0));

    let mut chosen: Vec<NodeId> = Vec::with_capacity(m);
    for t in 1..n {
        let me = NodeId(t as u32);
        let want = m.min(t);
        chosen.clear();
        let mut last: Option<NodeId> = None;
        while chosen.len() < want {
            let mut pick = None;
            if let Some(prev) = last {
                if rng.bernoulli(params.triad_prob) {
                    let cands: Vec<NodeId> = followees[prev.index()]
                        .iter()
                        .copied()
                        .filter(|c| *c != me && !chosen.contains(c))
                        .collect();
                    if !cands.is_empty() {
                        pick = Some(cands[rng.index(cands.len())]);
                    }
                }
            }
            let target = match pick {
                Some(p) => p,
                None => loop {
                    let c = pool[rng.index(pool.len())];
                    if c != me && !chosen.contains(&c) {
                        break c;
                    }
                },
            };
            chosen.push(target);
            last = Some(target);
        }

        pool.push(me);
        for &target in &chosen {
            edges.push(Edge::new(me, target));
            followees[t].push(target);
            pool.push(target);
            if rng.bernoulli(params.reciprocity_prob) {
                edges.push(Edge::new(target, me));
                followees[target.index()].push(me);
                pool.push(me);
            }
        }
    }

    NetworkGraph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, m: usize, r: f64, seed: u64) -> GeneratorParams {
        GeneratorParams {
            node_count: n,
            out_degree_target: m,
            reciprocity_prob: r,
            seed,
            ..GeneratorParams::default()
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = generate_network(&params(1000, 5, 0.3, 7)).unwrap();
        let b = generate_network(&params(1000, 5, 0.3, 7)).unwrap();
        assert!(a.edges().eq(b.edges()));
        assert_eq!(a.content_hash(), b.content_hash());
        let c = generate_network(&params(1000, 5, 0.3, 8)).unwrap();
        assert_ne!(a.content_hash(), c.content_hash());
    }

    #[test]
    fn no_reciprocity_means_no_mutual_pairs() {
        let g = generate_network(&params(1000, 5, 0.0, 7)).unwrap();
        assert_eq!(g.reciprocal_pair_count(), 0);
        let g = generate_network(&params(1000, 5, 0.3, 7)).unwrap();
        assert!(g.reciprocal_pair_count() > 0);
    }

    #[test]
    fn every_late_node_follows_target_count() {
        let g = generate_network(&params(500, 4, 0.0, 3)).unwrap();
        for u in g.nodes().skip(4) {
            assert_eq!(g.out_degree(u), 4);
        }
        // weakly connected: every node but 0 follows an earlier node
        for u in g.nodes().skip(1) {
            assert!(g.followees(u).iter().any(|v| v.0 < u.0));
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(generate_network(&params(5, 5, 0.3, 1)).is_err());
        assert!(generate_network(&params(1, 1, 0.3, 1)).is_err());
        assert!(generate_network(&params(10, 0, 0.3, 1)).is_err());
        assert!(generate_network(&params(10, 2, 1.5, 1)).is_err());
        assert!(generate_network(&params(6, 5, 0.3, 1)).is_ok());
    }
}
