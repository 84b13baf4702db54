use emotion_contagion::emotions::Emotion;
use emotion_contagion::engine::{Event, PostEvent, RetweetEvent};
use emotion_contagion::graph::{Edge, NetworkGraph, NodeId};
use emotion_contagion::metrics::{
    classify_dominance, post_counts_from_events, proportion_report, strength_preference, strength_preferences,
    MetricsReport,
};

fn post(step: u64, msg: u64, emotion: Emotion, author: u32) -> Event {
    Event::Post(PostEvent {
        step,
        message_id: msg,
        emotion,
        author: NodeId(author),
    })
}

fn rt(step: u64, msg: u64, emotion: Emotion, reader: u32, sender: u32, graph: &NetworkGraph) -> Event {
    let edge = Edge::new(reader, sender);
    Event::Retweet(RetweetEvent {
        step,
        message_id: msg,
        emotion,
        author: NodeId(sender),
        edge,
        strength: graph.strength(edge.follower, edge.followee).unwrap(),
    })
}

/// Disjoint stars: in component `k`, node `base` follows `base + 1`, both
/// follow `common` shared nodes, and `base` follows `exclusive` more nodes.
/// The strength of `base -> base + 1` is `common / (common + exclusive)`.
fn pair_components(specs: &[(u32, u32)]) -> (NetworkGraph, Vec<Edge>) {
    let mut edges = Vec::new();
    let mut pairs = Vec::new();
    let mut next = 0u32;
    for &(common, exclusive) in specs {
        let (i, j) = (next, next + 1);
        next += 2;
        edges.push(Edge::new(i, j));
        pairs.push(Edge::new(i, j));
        for _ in 0..common {
            edges.push(Edge::new(i, next));
            edges.push(Edge::new(j, next));
            next += 1;
        }
        for _ in 0..exclusive {
            edges.push(Edge::new(i, next));
            next += 1;
        }
    }
    (NetworkGraph::from_edges(next as usize, edges).unwrap(), pairs)
}

#[test]
fn mean_common_friends_of_three_events() {
    let (g, pairs) = pair_components(&[(1, 9), (1, 4), (3, 7)]);
    let strengths: Vec<f64> = pairs
        .iter()
        .map(|e| g.strength(e.follower, e.followee).unwrap())
        .collect();
    assert_eq!(strengths, vec![0.1, 0.2, 0.3]);
    let events: Vec<Event> = pairs
        .iter()
        .enumerate()
        .map(|(k, e)| rt(k as u64, k as u64, Emotion::Anger, e.follower.0, e.followee.0, &g))
        .collect();
    let p = strength_preference(&events, &g, Emotion::Anger).unwrap();
    assert_eq!(p.event_count, 3);
    assert!((p.mean_common_friends.unwrap() - 0.2).abs() < 1e-12);
    assert_eq!(p.reciprocity_proportion, Some(0.0));
}

#[test]
fn all_reciprocal_edges() {
    let pairs = [(0, 1), (1, 0), (1, 2), (2, 1)];
    let g = NetworkGraph::from_edges(3, pairs.map(|(a, b)| Edge::new(a, b))).unwrap();
    let events = vec![rt(0, 0, Emotion::Joy, 0, 1, &g), rt(1, 1, Emotion::Joy, 2, 1, &g)];
    assert_eq!(
        strength_preference(&events, &g, Emotion::Joy)
            .unwrap()
            .reciprocity_proportion,
        Some(1.0)
    );
}

#[test]
fn normalized_prior_retweets_hand_walk() {
    let tri = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
    let g = NetworkGraph::from_edges(3, tri.map(|(a, b)| Edge::new(a, b))).unwrap();
    // edge A = 0->1, B = 1->2, C = 2->0
    let mut events = Vec::new();
    let mut step = 0;
    let mut push = |emotion, reader, sender, events: &mut Vec<Event>| {
        events.push(rt(step, step, emotion, reader, sender, &g));
        step += 1;
    };
    push(Emotion::Joy, 1, 2, &mut events);
    push(Emotion::Joy, 1, 2, &mut events);
    for _ in 0..5 {
        push(Emotion::Joy, 0, 1, &mut events);
    }
    push(Emotion::Anger, 2, 0, &mut events); // S = 0
    push(Emotion::Anger, 1, 2, &mut events); // S = 2
    push(Emotion::Anger, 0, 1, &mut events); // S = 5

    let prefs = strength_preferences(&events, &g).unwrap();
    let anger = prefs[Emotion::Anger.index()].mean_normalized_retweet_strength.unwrap();
    assert!((anger - 0.466667).abs() < 1e-6);
    assert!((anger - 1.4 / 3.0).abs() < 1e-12);
    // joy priors 0,1,0,1,2,3,4 over S_max = 5
    let joy = prefs[Emotion::Joy.index()].mean_normalized_retweet_strength.unwrap();
    assert!((joy - 2.2 / 7.0).abs() < 1e-12);
}

#[test]
fn six_event_log() {
    // mutual triangle {0,1,2} plus 3 -> 0
    let mut edges: Vec<Edge> = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]
        .map(|(a, b)| Edge::new(a, b))
        .to_vec();
    edges.push(Edge::new(3, 0));
    let g = NetworkGraph::from_edges(4, edges).unwrap();
    assert_eq!(g.strength(NodeId(1), NodeId(0)), Some(0.5));
    assert_eq!(g.strength(NodeId(1), NodeId(2)), Some(1.0));
    assert_eq!(g.strength(NodeId(3), NodeId(0)), Some(0.0));

    let events = vec![
        post(0, 0, Emotion::Anger, 0),
        rt(1, 0, Emotion::Anger, 1, 0, &g),
        rt(2, 0, Emotion::Anger, 3, 0, &g),
        post(3, 1, Emotion::Joy, 2),
        rt(4, 1, Emotion::Joy, 1, 2, &g),
        rt(5, 2, Emotion::Joy, 1, 0, &g),
    ];
    let report = MetricsReport::from_events(&events, &g).unwrap();

    let anger = report.preference(Emotion::Anger);
    assert_eq!(anger.event_count, 2);
    assert_eq!(anger.mean_common_friends, Some(0.25));
    assert_eq!(anger.reciprocity_proportion, Some(0.5));
    assert_eq!(anger.mean_normalized_retweet_strength, Some(0.0));

    let joy = report.preference(Emotion::Joy);
    assert_eq!(joy.event_count, 2);
    assert_eq!(joy.mean_common_friends, Some(0.75));
    assert_eq!(joy.reciprocity_proportion, Some(1.0));
    assert_eq!(joy.mean_normalized_retweet_strength, Some(0.5));
    assert_eq!(report.joy_minus_anger_strength(), Some(0.5));

    let disgust = report.preference(Emotion::Disgust);
    assert_eq!(disgust.event_count, 0);
    assert_eq!(disgust.mean_common_friends, None);

    let p = &report.proportions;
    assert_eq!(p.retweets(Emotion::Anger), 0.5);
    assert_eq!(p.tweets(Emotion::Joy), 0.5);
    assert_eq!(p.users(Emotion::Anger), 0.5);
    assert_eq!(p.users(Emotion::Joy), 0.5);
    assert_eq!((p.retweet_total, p.tweet_total, p.dominated_total), (4, 6, 4));

    let vit: Vec<(u64, Option<Emotion>)> = report.vitality.iter().map(|r| (r.vitality, r.dominant)).collect();
    assert_eq!(
        vit,
        vec![
            (1, Some(Emotion::Anger)),
            (3, Some(Emotion::Joy)),
            (1, Some(Emotion::Joy)),
            (1, Some(Emotion::Anger)),
        ]
    );
}

#[test]
fn two_and_two_retweets_split_evenly() {
    let tri = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
    let g = NetworkGraph::from_edges(3, tri.map(|(a, b)| Edge::new(a, b))).unwrap();
    let events = vec![
        rt(0, 0, Emotion::Anger, 0, 1, &g),
        rt(1, 1, Emotion::Anger, 0, 2, &g),
        rt(2, 2, Emotion::Joy, 1, 0, &g),
        rt(3, 3, Emotion::Joy, 2, 0, &g),
    ];
    let counts = post_counts_from_events(&events, 3).unwrap();
    let p = proportion_report(&events, &counts);
    assert_eq!(p.retweets(Emotion::Anger), 0.5);
    assert_eq!(p.retweets(Emotion::Joy), 0.5);
}

#[test]
fn dominance_examples() {
    let mut counts = [0u64; 4];
    counts[Emotion::Anger.index()] = 5;
    counts[Emotion::Joy.index()] = 3;
    counts[Emotion::Disgust.index()] = 1;
    assert_eq!(classify_dominance(&counts), Some(Emotion::Anger));
    let mut tie = [0u64; 4];
    tie[Emotion::Anger.index()] = 2;
    tie[Emotion::Joy.index()] = 2;
    assert_eq!(classify_dominance(&tie), None);
    assert_eq!(classify_dominance(&[0; 4]), None);
}
