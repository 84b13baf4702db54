//! Emotion taxonomy and model parameters.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Anger,
    Disgust,
    Joy,
    Sadness,
}

impl Emotion {
    pub const ALL: [Emotion; 4] = [Emotion::Anger, Emotion::Disgust, Emotion::Joy, Emotion::Sadness];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Emotion> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Anger => "anger",
            Emotion::Disgust => "disgust",
            Emotion::Joy => "joy",
            Emotion::Sadness => "sadness",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown emotion {s:?}"))
    }
}

/// A value per emotion, indexed in [`Emotion::ALL`] order.
pub type PerEmotion<T> = [T; 4];

/// Posting proportions and influence (correlation) per emotion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionParams {
    pub proportion: PerEmotion<f64>,
    pub correlation: PerEmotion<f64>,
}

impl EmotionParams {
    pub fn proportion(&self, e: Emotion) -> f64 {
        self.proportion[e.index()]
    }

    pub fn correlation(&self, e: Emotion) -> f64 {
        self.correlation[e.index()]
    }

    /// Default correlations with every proportion set to 0.25.
    pub fn equal_priors() -> Self {
        EmotionParams {
            proportion: [0.25; 4],
            ..default_params()
        }
    }

    /// Disgust and sadness held at 0.25, joy and anger split symmetrically
    /// around 0.25 so that `P_joy - P_anger = gap`.
    pub fn with_gap(gap: f64) -> Self {
        let mut p = Self::equal_priors();
        p.proportion[Emotion::Joy.index()] = 0.25 + gap / 2.0;
        p.proportion[Emotion::Anger.index()] = 0.25 - gap / 2.0;
        p
    }
}

impl Default for EmotionParams {
    fn default() -> Self {
        default_params()
    }
}

/// Proportions and correlations measured on the Weibo corpus.
pub fn default_params() -> EmotionParams {
    let mut proportion = [0.0; 4];
    let mut correlation = [0.0; 4];
    for (e, p, c) in [
        (Emotion::Anger, 0.192, 0.41),
        (Emotion::Joy, 0.391, 0.35),
        (Emotion::Disgust, 0.137, 0.04),
        (Emotion::Sadness, 0.280, 0.03),
    ] {
        proportion[e.index()] = p;
        correlation[e.index()] = c;
    }
    EmotionParams {
        proportion,
        correlation,
    }
}

/// Draws an emotion by inverse CDF over [`Emotion::ALL`]; one uniform per call.
pub fn sample_emotion(params: &EmotionParams, rng: &mut SimRng) -> Emotion {
    let u = rng.uniform();
    let mut acc = 0.0;
    let mut last = Emotion::Anger;
    for e in Emotion::ALL {
        let p = params.proportion(e);
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = e;
        if u < acc {
            return e;
        }
    }
    // rounding slack when proportions sum to slightly under 1
    last
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Probability that an activated user posts rather than reads.
    pub p_new: f64,
    pub emotion_params: EmotionParams,
    /// Screen capacity `N`.
    pub screen_size: usize,
    /// Number of activations `M`.
    pub steps: u64,
    /// Retweet threshold.
    pub tau: f64,
    pub seed: u64,
}

pub const DEFAULT_P_NEW: f64 = 0.45;
pub const DEFAULT_SCREEN_SIZE: usize = 20;
pub const DEFAULT_TAU: f64 = 0.06;
/// Steps per node, so `M = STEPS_PER_NODE * |V|`.
pub const STEPS_PER_NODE: u64 = 10;

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            p_new: DEFAULT_P_NEW,
            emotion_params: default_params(),
            screen_size: DEFAULT_SCREEN_SIZE,
            steps: STEPS_PER_NODE * 10_000,
            tau: DEFAULT_TAU,
            seed: 1,
        }
    }
}

impl SimulationConfig {
    /// Default configuration with `M = 10 |V|`.
    pub fn for_graph_size(node_count: usize) -> Self {
        SimulationConfig {
            steps: STEPS_PER_NODE * node_count as u64,
            ..Self::default()
        }
    }

    pub fn to_file(&self) -> ConfigFile {
        let p = &self.emotion_params;
        ConfigFile {
            p_new: Some(self.p_new),
            p_anger: Some(p.proportion(Emotion::Anger)),
            p_disgust: Some(p.proportion(Emotion::Disgust)),
            p_joy: Some(p.proportion(Emotion::Joy)),
            p_sadness: Some(p.proportion(Emotion::Sadness)),
            c_anger: Some(p.correlation(Emotion::Anger)),
            c_disgust: Some(p.correlation(Emotion::Disgust)),
            c_joy: Some(p.correlation(Emotion::Joy)),
            c_sadness: Some(p.correlation(Emotion::Sadness)),
            screen_size: Some(self.screen_size),
            steps: Some(self.steps),
            tau: Some(self.tau),
            seed: Some(self.seed),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let file: ConfigFile = serde_json::from_str(text)?;
        Ok(file.apply(Self::default()))
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        validate_config(self)
    }
}

/// Flat key-value config document. Absent keys keep the base value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_new: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_anger: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_disgust: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_joy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_sadness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_anger: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_disgust: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_joy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_sadness: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub screen_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Overlays the keys present here onto `base`.
    pub fn apply(&self, mut base: SimulationConfig) -> SimulationConfig {
        let ep = &mut base.emotion_params;
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut base.p_new, self.p_new);
        set(&mut ep.proportion[Emotion::Anger.index()], self.p_anger);
        set(&mut ep.proportion[Emotion::Disgust.index()], self.p_disgust);
        set(&mut ep.proportion[Emotion::Joy.index()], self.p_joy);
        set(&mut ep.proportion[Emotion::Sadness.index()], self.p_sadness);
        set(&mut ep.correlation[Emotion::Anger.index()], self.c_anger);
        set(&mut ep.correlation[Emotion::Disgust.index()], self.c_disgust);
        set(&mut ep.correlation[Emotion::Joy.index()], self.c_joy);
        set(&mut ep.correlation[Emotion::Sadness.index()], self.c_sadness);
        set(&mut base.tau, self.tau);
        if let Some(v) = self.screen_size {
            base.screen_size = v;
        }
        if let Some(v) = self.steps {
            base.steps = v;
        }
        if let Some(v) = self.seed {
            base.seed = v;
        }
        base
    }

    /// Keys set in `other` win.
    pub fn merged(&self, other: &ConfigFile) -> ConfigFile {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigFile { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            p_new,
            p_anger,
            p_disgust,
            p_joy,
            p_sadness,
            c_anger,
            c_disgust,
            c_joy,
            c_sadness,
            screen_size,
            steps,
            tau,
            seed
        )
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
}

/// Every invariant violation found in a config.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {}", .violations.join("; "))]
pub struct ValidationError {
    pub violations: Vec<String>,
}

const PROPORTION_SUM_TOL: f64 = 1e-9;

fn collect_violations(config: &SimulationConfig, require_steps: bool) -> Vec<String> {
    let mut v = Vec::new();
    let unit = |x: f64| (0.0..=1.0).contains(&x);
    if !unit(config.p_new) {
        v.push(format!("p_new must be in [0, 1], got {}", config.p_new));
    }
    let ep = &config.emotion_params;
    for e in Emotion::ALL {
        if !unit(ep.proportion(e)) {
            v.push(format!("p_{e} must be in [0, 1], got {}", ep.proportion(e)));
        }
        if !unit(ep.correlation(e)) {
            v.push(format!("c_{e} must be in [0, 1], got {}", ep.correlation(e)));
        }
    }
    let sum: f64 = ep.proportion.iter().sum();
    if (sum - 1.0).abs() > PROPORTION_SUM_TOL || sum.is_nan() {
        v.push(format!("proportions must sum to 1, got {sum}"));
    }
    if config.screen_size < 1 {
        v.push("screen_size must be >= 1".into());
    }
    if require_steps && config.steps < 1 {
        v.push("steps must be >= 1".into());
    }
    if !config.tau.is_finite() || config.tau < 0.0 {
        v.push(format!("tau must be ≥ 0, got {}", config.tau));
    }
    v
}

/// Checks every config invariant and reports all violations at once.
pub fn validate_config(config: &SimulationConfig) -> Result<(), ValidationError> {
    let violations = collect_violations(config, true);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ValidationError { violations })
    }
}

/// As [`validate_config`] but tolerates `steps == 0`, which the engine runs
/// as an empty simulation.
pub(crate) fn validate_for_run(config: &SimulationConfig) -> Result<(), ValidationError> {
    let violations = collect_violations(config, false);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ValidationError { violations })
    }
}
