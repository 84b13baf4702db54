//! Agent-based simulation of emotion contagion on directed follower
//! networks: graph construction with common-friends tie strengths, the
//! publish/republish activation loop, metrics over event logs, and the
//! parameter sweeps built on top of them.

pub mod cli;
pub mod emotions;
pub mod engine;
pub mod experiments;
pub mod graph;
pub mod metrics;
pub mod rng;

pub use emotions::{Emotion, EmotionParams, SimulationConfig};
pub use engine::{run, EngineState, Event, RetweetEvent, RunOutput};
pub use graph::{Edge, GeneratorParams, NetworkGraph, NodeId};
pub use metrics::{MetricsReport, ProportionReport, StrengthPreference, VitalityRecord};
