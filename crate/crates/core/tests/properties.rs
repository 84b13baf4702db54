use std::collections::BTreeSet;

use proptest::prelude::*;

use emotion_contagion::emotions::SimulationConfig;
use emotion_contagion::engine::{run, Event};
use emotion_contagion::graph::{common_friends_strength, Edge, NetworkGraph, NodeId};
use emotion_contagion::metrics::{
    classify_dominance, normalize_min_max, post_counts_from_events, prior_retweet_counts, proportion_report,
};

fn arb_graph(max_nodes: u32) -> impl Strategy<Value = (u32, Vec<(u32, u32)>)> {
    (2..=max_nodes).prop_flat_map(|n| {
        let pairs = prop::collection::vec((0..n, 0..n), 0..(n * n) as usize);
        (
            Just(n),
            pairs.prop_map(|v| v.into_iter().filter(|(a, b)| a != b).collect()),
        )
    })
}

fn build(n: u32, edges: &[(u32, u32)]) -> NetworkGraph {
    NetworkGraph::from_edges(n as usize, edges.iter().map(|&(a, b)| Edge::new(a, b))).unwrap()
}

fn brute(edges: &[(u32, u32)], i: u32, j: u32) -> f64 {
    let nb = |x: u32, other: u32| -> BTreeSet<u32> {
        edges
            .iter()
            .flat_map(|&(a, b)| [(a, b), (b, a)])
            .filter(|&(a, b)| a == x && b != other)
            .map(|(_, b)| b)
            .collect()
    };
    let (ni, nj) = (nb(i, j), nb(j, i));
    let c = ni.intersection(&nj).count();
    let d = ni.len() + nj.len() - c;
    if d == 0 {
        0.0
    } else {
        c as f64 / d as f64
    }
}

proptest! {
    #[test]
    fn strengths_match_set_intersection((n, edges) in arb_graph(12)) {
        let g = build(n, &edges);
        for (e, s) in g.edges().zip(g.strengths()) {
            prop_assert_eq!(*s, brute(&edges, e.follower.0, e.followee.0));
            prop_assert!((0.0..=1.0).contains(s));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let s = common_friends_strength(NodeId(i), NodeId(j), &g).unwrap();
                    prop_assert_eq!(s, brute(&edges, i, j));
                    prop_assert_eq!(s, common_friends_strength(NodeId(j), NodeId(i), &g).unwrap());
                }
            }
        }
    }

    #[test]
    fn normalization_bounds(values in prop::collection::vec(0u32..50, 1..40)) {
        let norm = normalize_min_max(&values);
        let lo = *values.iter().min().unwrap();
        let hi = *values.iter().max().unwrap();
        for (v, x) in values.iter().zip(&norm) {
            prop_assert!((0.0..=1.0).contains(x));
            if *v == lo {
                prop_assert_eq!(*x, 0.0);
            }
            if *v == hi && hi != lo {
                prop_assert_eq!(*x, 1.0);
            }
        }
    }

    #[test]
    fn dominance_is_scale_free(counts in prop::array::uniform4(0u64..20), k in 1u64..10) {
        prop_assert_eq!(classify_dominance(&counts), classify_dominance(&counts.map(|c| c * k)));
    }

    #[test]
    fn run_level_metric_invariants((n, edges) in arb_graph(15), seed in 0u64..500, tau in 0.0f64..0.3) {
        let g = build(n, &edges);
        let cfg = SimulationConfig { tau, seed, steps: 400, ..Default::default() };
        let out = run(&g, &cfg).unwrap();
        let counts = post_counts_from_events(&out.events, g.node_count()).unwrap();
        prop_assert_eq!(&counts, &out.post_counts);

        let p = proportion_report(&out.events, &counts);
        if p.retweet_total > 0 {
            prop_assert!((p.retweet_share.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        prop_assert!(p.user_share.iter().sum::<f64>() <= 1.0 + 1e-12);

        let priors = prior_retweet_counts(&out.events, &g).unwrap();
        let retweets: Vec<_> = out.events.iter().filter_map(Event::as_retweet).collect();
        prop_assert_eq!(priors.len(), retweets.len());
        for (k, r) in retweets.iter().enumerate() {
            let earlier = retweets[..k].iter().filter(|x| x.edge == r.edge).count() as u32;
            prop_assert_eq!(priors[k], earlier);
        }
    }
}
