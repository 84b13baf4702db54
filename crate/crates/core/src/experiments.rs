//! Parameter sweeps over τ and the joy-anger prior gap, plus the vitality
//! snapshot. Runs fan out over rayon; tables come back in (value, seed) order.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::emotions::{Emotion, EmotionParams, PerEmotion, SimulationConfig, ValidationError};
use crate::engine::{run, EngineError};
use crate::graph::{generate_network, load_edge_list, GeneratorParams, GraphError, NetworkGraph};
use crate::metrics::{
    fmt_opt, vitality_distribution, write_vitality_csv, MetricsError, MetricsReport, ProportionReport,
    StrengthPreference, VitalityDistribution, VitalityRecord,
};
use crate::rng::RNG_ALGORITHM;

pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const DEFAULT_TAUS: [f64; 5] = [0.0, 0.02, 0.04, 0.06, 0.08];
pub const DEFAULT_GAP_TAU: f64 = 0.06;

/// `0, 0.04, ..., 0.40`.
pub fn default_gaps() -> Vec<f64> {
    (0..=10).map(|k| k as f64 * 0.04).collect()
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid sweep: {0}")]
    Spec(String),
    #[error("gap {0} outside [0, 0.5]")]
    Gap(f64),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("run at {variable}={value}, seed {seed} failed: {source}")]
    Run {
        variable: SweepVariable,
        value: f64,
        seed: u64,
        source: EngineError,
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Tau,
    Gap,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Tau => "tau",
            SweepVariable::Gap => "gap",
        }
    }
}

impl std::fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphSource {
    Path(PathBuf),
    Generate(GeneratorParams),
}

impl GraphSource {
    pub fn load(&self) -> Result<NetworkGraph, GraphError> {
        match self {
            GraphSource::Path(p) => load_edge_list(p),
            GraphSource::Generate(params) => generate_network(params),
        }
    }
}

impl Default for GraphSource {
    fn default() -> Self {
        GraphSource::Generate(GeneratorParams::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base_config: SimulationConfig,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub graph_source: GraphSource,
}

impl SweepSpec {
    pub fn new(base_config: SimulationConfig, variable: SweepVariable, values: Vec<f64>, seeds: Vec<u64>) -> Self {
        SweepSpec {
            base_config,
            variable,
            values,
            seeds,
            graph_source: GraphSource::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.values.is_empty() {
            return Err(ExperimentError::Spec("no values to sweep".into()));
        }
        if self.seeds.is_empty() {
            return Err(ExperimentError::Spec("no seeds".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(ExperimentError::Spec("sweep values must be finite".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ExperimentError::Spec("sweep values must be strictly increasing".into()));
        }
        if self.variable == SweepVariable::Gap {
            if let Some(&g) = self.values.iter().find(|g| !(0.0..=0.5).contains(*g)) {
                return Err(ExperimentError::Gap(g));
            }
        }
        Ok(())
    }

    /// The run configuration of one (value, seed) cell.
    pub fn config_for(&self, value: f64, seed: u64) -> SimulationConfig {
        let mut c = self.base_config;
        match self.variable {
            SweepVariable::Tau => c.tau = value,
            SweepVariable::Gap => c.emotion_params = EmotionParams::with_gap(value),
        }
        c.seed = seed;
        c
    }

    /// Hex sha256 of the base config as JSON.
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.base_config.to_json().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub seed: u64,
    pub preferences: PerEmotion<StrengthPreference>,
    pub proportions: ProportionReport,
    /// Mean vitality of the users each emotion dominates.
    pub mean_vitality: PerEmotion<Option<f64>>,
    pub joy_minus_anger_strength: Option<f64>,
}

impl SweepRow {
    pub fn from_report(value: f64, seed: u64, report: &MetricsReport) -> Self {
        SweepRow {
            value,
            seed,
            preferences: report.preferences,
            proportions: report.proportions,
            mean_vitality: Emotion::ALL.map(|e| report.vitality_distribution(e).mean),
            joy_minus_anger_strength: report.joy_minus_anger_strength(),
        }
    }

    pub fn preference(&self, e: Emotion) -> &StrengthPreference {
        &self.preferences[e.index()]
    }

    /// Numeric columns after `value` and `seed`, in [`metric_columns`] order.
    pub fn metrics(&self) -> Vec<Option<f64>> {
        let p = &self.proportions;
        let mut out = Vec::with_capacity(metric_columns().len());
        for e in Emotion::ALL {
            let pref = self.preference(e);
            out.extend([
                Some(pref.event_count as f64),
                pref.mean_common_friends,
                pref.reciprocity_proportion,
                pref.mean_normalized_retweet_strength,
                Some(p.retweets(e)),
                Some(p.tweets(e)),
                Some(p.users(e)),
                self.mean_vitality[e.index()],
            ]);
        }
        out.extend([
            Some(p.retweet_total as f64),
            Some(p.tweet_total as f64),
            Some(p.dominated_total as f64),
            self.joy_minus_anger_strength,
        ]);
        out
    }
}

const PER_EMOTION_COLUMNS: [&str; 8] = [
    "retweet_events",
    "mean_common_friends",
    "reciprocity_proportion",
    "mean_normalized_retweet_strength",
    "retweet_share",
    "tweet_share",
    "user_share",
    "mean_vitality",
];

/// Column names of [`SweepRow::metrics`].
pub fn metric_columns() -> Vec<String> {
    let mut cols: Vec<String> = Emotion::ALL
        .iter()
        .flat_map(|e| PER_EMOTION_COLUMNS.iter().map(move |c| format!("{e}_{c}")))
        .collect();
    cols.extend(
        [
            "retweet_total",
            "tweet_total",
            "dominated_users_total",
            "joy_minus_anger_strength",
        ]
        .map(String::from),
    );
    cols
}

/// Per-value averages over seeds. Absent entries are skipped; a column with
/// no present entries stays absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanRow {
    pub value: f64,
    pub seeds: usize,
    pub metrics: Vec<Option<f64>>,
}

impl MeanRow {
    pub fn metric(&self, column: &str) -> Option<f64> {
        let idx = metric_columns().iter().position(|c| c == column)?;
        self.metrics[idx]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.rows.iter().map(|r| r.value).collect();
        v.dedup();
        v
    }

    pub fn seeds(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self.rows.iter().map(|r| r.seed).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn rows_for_seed(&self, seed: u64) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.seed == seed)
    }

    pub fn means(&self) -> Vec<MeanRow> {
        let width = metric_columns().len();
        self.values()
            .into_iter()
            .map(|value| {
                let group: Vec<Vec<Option<f64>>> = self
                    .rows
                    .iter()
                    .filter(|r| r.value == value)
                    .map(SweepRow::metrics)
                    .collect();
                let metrics = (0..width)
                    .map(|k| {
                        let present: Vec<f64> = group.iter().filter_map(|m| m[k]).collect();
                        (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
                    })
                    .collect();
                MeanRow {
                    value,
                    seeds: group.len(),
                    metrics,
                }
            })
            .collect()
    }

    fn header(&self, second: &str) -> Vec<String> {
        let mut h = vec![self.variable.as_str().to_string(), second.to_string()];
        h.extend(metric_columns());
        h
    }

    /// One row per (value, seed), preceded by a `#` line naming the columns.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<(), ExperimentError> {
        let header = self.header("seed");
        writeln!(writer, "# columns: {}", header.join(" "))?;
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![format!("{}", r.value), r.seed.to_string()];
            rec.extend(r.metrics().into_iter().map(fmt_opt));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_means_csv<W: Write>(&self, mut writer: W) -> Result<(), ExperimentError> {
        let header = self.header("seeds");
        writeln!(writer, "# columns: {}", header.join(" "))?;
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&header)?;
        for m in self.means() {
            let mut rec = vec![format!("{}", m.value), m.seeds.to_string()];
            rec.extend(m.metrics.into_iter().map(fmt_opt));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Provenance of a sweep output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub config: crate::emotions::ConfigFile,
    pub config_hash: String,
    pub graph_source: GraphSource,
    pub graph_hash: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub rng_algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossovers: Option<GapCrossovers>,
}

impl Manifest {
    pub fn new(experiment: &str, spec: &SweepSpec, graph: &NetworkGraph) -> Self {
        Manifest {
            experiment: experiment.to_string(),
            variable: spec.variable,
            values: spec.values.clone(),
            seeds: spec.seeds.clone(),
            config: spec.base_config.to_file(),
            config_hash: spec.config_hash(),
            graph_source: spec.graph_source.clone(),
            graph_hash: graph.content_hash(),
            node_count: graph.node_count(),
            edge_count: graph.edge_count(),
            rng_algorithm: RNG_ALGORITHM.to_string(),
            crossovers: None,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), ExperimentError> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

/// Runs every (value, seed) cell of `spec` on `graph`.
pub fn run_sweep(graph: &NetworkGraph, spec: &SweepSpec) -> Result<SweepTable, ExperimentError> {
    spec.validate()?;
    spec.config_for(spec.values[0], spec.seeds[0]).validate()?;
    let cells: Vec<(f64, u64)> = spec
        .values
        .iter()
        .flat_map(|&v| spec.seeds.iter().map(move |&s| (v, s)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(value, seed)| {
            let out = run(graph, &spec.config_for(value, seed)).map_err(|source| ExperimentError::Run {
                variable: spec.variable,
                value,
                seed,
                source,
            })?;
            let report = MetricsReport::from_parts(&out.events, &out.post_counts, graph)?;
            Ok(SweepRow::from_report(value, seed, &report))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(SweepTable {
        variable: spec.variable,
        rows,
    })
}

/// τ sweep with the spec's priors.
pub fn sweep_tau(spec: &SweepSpec) -> Result<SweepTable, ExperimentError> {
    if spec.variable != SweepVariable::Tau {
        return Err(ExperimentError::Spec("sweep_tau needs variable = tau".into()));
    }
    let graph = spec.graph_source.load()?;
    run_sweep(&graph, spec)
}

/// Anger-minus-joy differences at which the gap sweep is summarized, on
/// mean curves. `None` means anger stayed ahead at every gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCrossovers {
    pub tweets: Option<f64>,
    pub users: Option<f64>,
    /// Largest grid gap with anger's tweet share above joy's.
    pub last_tweets_ahead: Option<f64>,
    pub last_users_ahead: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSweep {
    pub tau: f64,
    pub table: SweepTable,
    pub crossovers: GapCrossovers,
}

/// First point, scanning `xs` upward, where `diffs` (anger minus joy)
/// stops being positive, linearly interpolated within the bracketing
/// interval. A zero at a grid point is the crossover itself.
pub fn crossover(xs: &[f64], diffs: &[f64]) -> Option<f64> {
    let k = diffs.iter().position(|&d| d <= 0.0)?;
    if k == 0 {
        return Some(xs[0]);
    }
    let (x0, x1, d0, d1) = (xs[k - 1], xs[k], diffs[k - 1], diffs[k]);
    Some(x0 + d0 / (d0 - d1) * (x1 - x0))
}

fn last_ahead(xs: &[f64], diffs: &[f64]) -> Option<f64> {
    xs.iter().zip(diffs).rev().find(|(_, d)| **d > 0.0).map(|(x, _)| *x)
}

/// Recomputes the crossover summaries from raw rows.
pub fn gap_crossovers(table: &SweepTable) -> GapCrossovers {
    let means = table.means();
    let xs: Vec<f64> = means.iter().map(|m| m.value).collect();
    let diff = |what: &str| -> Vec<f64> {
        means
            .iter()
            .map(|m| {
                m.metric(&format!("anger_{what}")).unwrap_or(0.0) - m.metric(&format!("joy_{what}")).unwrap_or(0.0)
            })
            .collect()
    };
    let tweets = diff("tweet_share");
    let users = diff("user_share");
    GapCrossovers {
        tweets: crossover(&xs, &tweets),
        users: crossover(&xs, &users),
        last_tweets_ahead: last_ahead(&xs, &tweets),
        last_users_ahead: last_ahead(&xs, &users),
    }
}

/// Gap sweep at fixed `tau`: disgust and sadness at 0.25, joy and anger at
/// `0.25 ± g/2`.
pub fn sweep_gap(spec: &SweepSpec, tau: f64) -> Result<GapSweep, ExperimentError> {
    let graph = spec.graph_source.load()?;
    sweep_gap_on(&graph, spec, tau)
}

pub fn sweep_gap_on(graph: &NetworkGraph, spec: &SweepSpec, tau: f64) -> Result<GapSweep, ExperimentError> {
    if spec.variable != SweepVariable::Gap {
        return Err(ExperimentError::Spec("sweep_gap needs variable = gap".into()));
    }
    let mut spec = spec.clone();
    spec.base_config.tau = tau;
    let table = run_sweep(graph, &spec)?;
    let crossovers = gap_crossovers(&table);
    Ok(GapSweep { tau, table, crossovers })
}

/// τ sweep with every prior at 0.25.
pub fn equal_prior_run(
    graph: &NetworkGraph,
    config: &SimulationConfig,
    taus: &[f64],
    seeds: &[u64],
) -> Result<SweepTable, ExperimentError> {
    if config
        .emotion_params
        .proportion
        .iter()
        .any(|&p| (p - 0.25).abs() > 1e-12)
    {
        return Err(ExperimentError::Spec(
            "equal-prior run needs every proportion at 0.25".into(),
        ));
    }
    let spec = SweepSpec::new(*config, SweepVariable::Tau, taus.to_vec(), seeds.to_vec());
    run_sweep(graph, &spec)
}

/// Seeds paired with the first swept value above zero at which anger's
/// retweet share beats joy's, if any.
pub fn retweet_crossover_by_seed(table: &SweepTable) -> Vec<(u64, Option<f64>)> {
    table
        .seeds()
        .into_iter()
        .map(|seed| {
            let first = table
                .rows_for_seed(seed)
                .filter(|r| r.value > 0.0)
                .find(|r| r.proportions.retweets(Emotion::Anger) > r.proportions.retweets(Emotion::Joy))
                .map(|r| r.value);
            (seed, first)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VitalitySnapshot {
    pub seed: u64,
    pub records: Vec<VitalityRecord>,
}

impl VitalitySnapshot {
    pub fn distribution(&self, e: Emotion) -> VitalityDistribution {
        vitality_distribution(&self.records, e)
    }
}

/// Per-user vitality after one run per seed at `config`.
pub fn vitality_snapshot(
    graph: &NetworkGraph,
    config: &SimulationConfig,
    seeds: &[u64],
) -> Result<Vec<VitalitySnapshot>, ExperimentError> {
    config.validate()?;
    seeds
        .par_iter()
        .map(|&seed| {
            let out = run(graph, &SimulationConfig { seed, ..*config }).map_err(|source| ExperimentError::Run {
                variable: SweepVariable::Tau,
                value: config.tau,
                seed,
                source,
            })?;
            Ok(VitalitySnapshot {
                seed,
                records: crate::metrics::vitality_records(&out.post_counts),
            })
        })
        .collect()
}

/// `seed,user,vitality,dominant` for every snapshot.
pub fn write_vitality_snapshots<W: Write>(snaps: &[VitalitySnapshot], mut writer: W) -> Result<(), ExperimentError> {
    writeln!(writer, "# columns: seed user vitality dominant")?;
    writeln!(writer, "seed,user,vitality,dominant")?;
    for s in snaps {
        let mut buf = Vec::new();
        write_vitality_csv(&s.records, &mut buf)?;
        let text = String::from_utf8(buf).expect("csv is utf-8");
        for line in text.lines().skip(1) {
            writeln!(writer, "{},{}", s.seed, line)?;
        }
    }
    writer.flush()?;
    Ok(())
}
