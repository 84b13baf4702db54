//! Observables computed from a finished run's event log.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emotions::{Emotion, PerEmotion};
use crate::engine::{Event, RetweetEvent};
use crate::graph::{Edge, NetworkGraph, NodeId};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("retweet on edge {}->{} which is not in the graph", .0.follower, .0.followee)]
    UnknownEdge(Edge),
    #[error("event references node {0} outside the graph")]
    UnknownNode(NodeId),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Average strength of the ties one emotion travelled over, under the three
/// tie-strength definitions. Means are `None` when there were no events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrengthPreference {
    pub emotion: Emotion,
    pub mean_common_friends: Option<f64>,
    pub reciprocity_proportion: Option<f64>,
    pub mean_normalized_retweet_strength: Option<f64>,
    pub event_count: u64,
}

impl StrengthPreference {
    fn empty(emotion: Emotion) -> Self {
        StrengthPreference {
            emotion,
            mean_common_friends: None,
            reciprocity_proportion: None,
            mean_normalized_retweet_strength: None,
            event_count: 0,
        }
    }
}

/// For each retweet in log order, the number of retweets on the same
/// directed edge strictly earlier in the log.
pub fn prior_retweet_counts(events: &[Event], graph: &NetworkGraph) -> Result<Vec<u32>, MetricsError> {
    let mut seen = vec![0u32; graph.edge_count()];
    events
        .iter()
        .filter_map(Event::as_retweet)
        .map(|r| {
            let idx = graph
                .edge_index(r.edge.follower, r.edge.followee)
                .ok_or(MetricsError::UnknownEdge(r.edge))?;
            let prior = seen[idx];
            seen[idx] += 1;
            Ok(prior)
        })
        .collect()
}

/// Min-max normalization; a constant sequence maps to all zeros.
pub fn normalize_min_max(values: &[u32]) -> Vec<f64> {
    let (Some(&lo), Some(&hi)) = (values.iter().min(), values.iter().max()) else {
        return Vec::new();
    };
    if hi == lo {
        return vec![0.0; values.len()];
    }
    let span = (hi - lo) as f64;
    values.iter().map(|&v| (v - lo) as f64 / span).collect()
}

/// Strength preferences of all four emotions in one pass. Retweet strength
/// is normalized over the retweets of every emotion so the four share a scale.
pub fn strength_preferences(
    events: &[Event],
    graph: &NetworkGraph,
) -> Result<PerEmotion<StrengthPreference>, MetricsError> {
    let normalized = normalize_min_max(&prior_retweet_counts(events, graph)?);
    let mut count = [0u64; 4];
    let mut cf_sum = [0.0f64; 4];
    let mut recip = [0u64; 4];
    let mut rt_sum = [0.0f64; 4];
    for (r, norm) in events.iter().filter_map(Event::as_retweet).zip(normalized) {
        let i = r.emotion.index();
        let strength = graph
            .strength(r.edge.follower, r.edge.followee)
            .ok_or(MetricsError::UnknownEdge(r.edge))?;
        count[i] += 1;
        cf_sum[i] += strength;
        recip[i] += u64::from(graph.is_reciprocal(r.edge));
        rt_sum[i] += norm;
    }
    Ok(Emotion::ALL.map(|e| {
        let i = e.index();
        let n = count[i];
        if n == 0 {
            return StrengthPreference::empty(e);
        }
        let n_f = n as f64;
        StrengthPreference {
            emotion: e,
            mean_common_friends: Some(cf_sum[i] / n_f),
            reciprocity_proportion: Some(recip[i] as f64 / n_f),
            mean_normalized_retweet_strength: Some(rt_sum[i] / n_f),
            event_count: n,
        }
    }))
}

pub fn strength_preference(
    events: &[Event],
    graph: &NetworkGraph,
    emotion: Emotion,
) -> Result<StrengthPreference, MetricsError> {
    Ok(strength_preferences(events, graph)?[emotion.index()])
}

/// The emotion with the strictly largest count, if there is one.
pub fn classify_dominance(counts: &PerEmotion<u64>) -> Option<Emotion> {
    let max = *counts.iter().max()?;
    if max == 0 || counts.iter().filter(|&&c| c == max).count() > 1 {
        return None;
    }
    Emotion::ALL.into_iter().find(|e| counts[e.index()] == max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VitalityRecord {
    pub user: NodeId,
    /// Posts plus reposts.
    pub vitality: u64,
    pub dominant: Option<Emotion>,
}

pub fn vitality_records(post_counts: &[PerEmotion<u64>]) -> Vec<VitalityRecord> {
    post_counts
        .iter()
        .enumerate()
        .map(|(u, counts)| VitalityRecord {
            user: NodeId(u as u32),
            vitality: counts.iter().sum(),
            dominant: classify_dominance(counts),
        })
        .collect()
}

/// Rebuilds per-user per-emotion counters from a log: the author of each
/// post and the reader of each retweet gets one.
pub fn post_counts_from_events(events: &[Event], node_count: usize) -> Result<Vec<PerEmotion<u64>>, MetricsError> {
    let mut counts = vec![[0u64; 4]; node_count];
    for ev in events {
        let actor = ev.actor();
        let slot = counts.get_mut(actor.index()).ok_or(MetricsError::UnknownNode(actor))?;
        slot[ev.emotion().index()] += 1;
    }
    Ok(counts)
}

/// Vitality distribution of the users dominated by one emotion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitalityDistribution {
    pub emotion: Emotion,
    pub users: usize,
    pub mean: Option<f64>,
    /// `(vitality, user count)` sorted by vitality.
    pub histogram: Vec<(u64, u64)>,
    /// `(v, P(V >= v))` at every observed vitality.
    pub ccdf: Vec<(u64, f64)>,
}

impl VitalityDistribution {
    /// `P(V >= v)` for any `v`.
    pub fn ccdf_at(&self, v: u64) -> f64 {
        if self.users == 0 {
            return 0.0;
        }
        let above: u64 = self.histogram.iter().filter(|(x, _)| *x >= v).map(|(_, c)| c).sum();
        above as f64 / self.users as f64
    }

    /// `log10(max / min)` over positive observed vitalities.
    pub fn decades_spanned(&self) -> f64 {
        let mut positive = self.histogram.iter().map(|(v, _)| *v).filter(|&v| v > 0);
        match (positive.next(), self.histogram.last()) {
            (Some(lo), Some(&(hi, _))) => (hi as f64 / lo as f64).log10(),
            _ => 0.0,
        }
    }
}

pub fn vitality_distribution(records: &[VitalityRecord], emotion: Emotion) -> VitalityDistribution {
    let mut values: Vec<u64> = records
        .iter()
        .filter(|r| r.dominant == Some(emotion))
        .map(|r| r.vitality)
        .collect();
    values.sort_unstable();
    let users = values.len();
    let mut histogram: Vec<(u64, u64)> = Vec::new();
    for v in &values {
        match histogram.last_mut() {
            Some((x, c)) if x == v => *c += 1,
            _ => histogram.push((*v, 1)),
        }
    }
    let mut remaining = users as u64;
    let ccdf = histogram
        .iter()
        .map(|&(v, c)| {
            let p = remaining as f64 / users as f64;
            remaining -= c;
            (v, p)
        })
        .collect();
    let mean = (users > 0).then(|| values.iter().sum::<u64>() as f64 / users as f64);
    VitalityDistribution {
        emotion,
        users,
        mean,
        histogram,
        ccdf,
    }
}

/// Per-emotion shares of retweets, of all messages, and of dominated users.
/// Each share is zero when its denominator is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionReport {
    pub retweet_share: PerEmotion<f64>,
    pub tweet_share: PerEmotion<f64>,
    pub user_share: PerEmotion<f64>,
    pub retweet_total: u64,
    pub tweet_total: u64,
    /// Users with a strict dominant emotion.
    pub dominated_total: u64,
}

impl ProportionReport {
    pub fn retweets(&self, e: Emotion) -> f64 {
        self.retweet_share[e.index()]
    }

    pub fn tweets(&self, e: Emotion) -> f64 {
        self.tweet_share[e.index()]
    }

    pub fn users(&self, e: Emotion) -> f64 {
        self.user_share[e.index()]
    }
}

fn shares(counts: PerEmotion<u64>) -> (PerEmotion<f64>, u64) {
    let total: u64 = counts.iter().sum();
    let share = counts.map(|c| if total == 0 { 0.0 } else { c as f64 / total as f64 });
    (share, total)
}

pub fn proportion_report(events: &[Event], post_counts: &[PerEmotion<u64>]) -> ProportionReport {
    let mut retweets = [0u64; 4];
    let mut tweets = [0u64; 4];
    for ev in events {
        tweets[ev.emotion().index()] += 1;
        if let Event::Retweet(RetweetEvent { emotion, .. }) = ev {
            retweets[emotion.index()] += 1;
        }
    }
    let mut dominated = [0u64; 4];
    for counts in post_counts {
        if let Some(e) = classify_dominance(counts) {
            dominated[e.index()] += 1;
        }
    }
    let (retweet_share, retweet_total) = shares(retweets);
    let (tweet_share, tweet_total) = shares(tweets);
    let (user_share, dominated_total) = shares(dominated);
    ProportionReport {
        retweet_share,
        tweet_share,
        user_share,
        retweet_total,
        tweet_total,
        dominated_total,
    }
}

/// Everything `analyze` reports about a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub preferences: PerEmotion<StrengthPreference>,
    pub proportions: ProportionReport,
    pub vitality: Vec<VitalityRecord>,
}

impl MetricsReport {
    pub fn from_events(events: &[Event], graph: &NetworkGraph) -> Result<Self, MetricsError> {
        let post_counts = post_counts_from_events(events, graph.node_count())?;
        Self::from_parts(events, &post_counts, graph)
    }

    pub fn from_parts(
        events: &[Event],
        post_counts: &[PerEmotion<u64>],
        graph: &NetworkGraph,
    ) -> Result<Self, MetricsError> {
        Ok(MetricsReport {
            preferences: strength_preferences(events, graph)?,
            proportions: proportion_report(events, post_counts),
            vitality: vitality_records(post_counts),
        })
    }

    pub fn preference(&self, e: Emotion) -> &StrengthPreference {
        &self.preferences[e.index()]
    }

    /// `mean_common_friends(joy) - mean_common_friends(anger)`.
    pub fn joy_minus_anger_strength(&self) -> Option<f64> {
        Some(self.preference(Emotion::Joy).mean_common_friends? - self.preference(Emotion::Anger).mean_common_friends?)
    }

    pub fn vitality_distribution(&self, e: Emotion) -> VitalityDistribution {
        vitality_distribution(&self.vitality, e)
    }
}

pub const REPORT_HEADER: [&str; 11] = [
    "emotion",
    "retweet_events",
    "mean_common_friends",
    "reciprocity_proportion",
    "mean_normalized_retweet_strength",
    "retweet_share",
    "tweet_share",
    "user_share",
    "retweet_total",
    "tweet_total",
    "dominated_users_total",
];

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// One row per emotion.
pub fn write_report_csv<W: Write>(report: &MetricsReport, writer: W) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REPORT_HEADER)?;
    let p = &report.proportions;
    for e in Emotion::ALL {
        let pref = report.preference(e);
        w.write_record([
            e.as_str().to_string(),
            pref.event_count.to_string(),
            fmt_opt(pref.mean_common_friends),
            fmt_opt(pref.reciprocity_proportion),
            fmt_opt(pref.mean_normalized_retweet_strength),
            format!("{:.6}", p.retweets(e)),
            format!("{:.6}", p.tweets(e)),
            format!("{:.6}", p.users(e)),
            p.retweet_total.to_string(),
            p.tweet_total.to_string(),
            p.dominated_total.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per user: `user,vitality,dominant` (empty when unclassified).
pub fn write_vitality_csv<W: Write>(records: &[VitalityRecord], writer: W) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["user", "vitality", "dominant"])?;
    for r in records {
        w.write_record([
            r.user.to_string(),
            r.vitality.to_string(),
            r.dominant.map(|e| e.as_str().to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
