//! Command-line front end. Exit codes: 0 success, 1 usage, 2 validation,
//! 3 runtime failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::emotions::{ConfigError, ConfigFile, EmotionParams, SimulationConfig, ValidationError};
use crate::engine::{read_event_log, run, write_event_log, EngineError, EventLogError, RunMetadata};
use crate::experiments::{
    default_gaps, equal_prior_run, retweet_crossover_by_seed, run_sweep, sweep_gap_on, vitality_snapshot,
    write_vitality_snapshots, ExperimentError, GraphSource, Manifest, SweepSpec, SweepTable, SweepVariable,
    DEFAULT_TAUS,
};
use crate::graph::{generate_network, load_edge_list, GeneratorParams, GraphError, NetworkGraph};
use crate::metrics::{write_report_csv, write_vitality_csv, MetricsError, MetricsReport};
use crate::rng::RNG_ALGORITHM;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "emocon", version, about = "Emotion contagion on follower networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic follower graph and its strength file.
    Gen(GenArgs),
    /// Run one simulation and write its event log.
    Run(RunArgs),
    /// Sweep the retweet threshold with the configured priors.
    SweepTau(SweepTauArgs),
    /// Sweep the joy-anger prior gap at a fixed threshold.
    SweepGap(SweepGapArgs),
    /// Sweep the threshold with every prior at 0.25.
    EqualPrior(EqualPriorArgs),
    /// Compute the metrics report of an event log.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    /// Number of nodes.
    #[arg(long, default_value_t = 10_000)]
    pub nodes: usize,
    /// Followees picked by each arriving node.
    #[arg(long = "out-degree", default_value_t = 10)]
    pub out_degree: usize,
    /// Probability that a follow is returned.
    #[arg(long, default_value_t = 0.3)]
    pub reciprocity: f64,
    /// Probability of following a followee of the previous pick.
    #[arg(long, default_value_t = crate::graph::DEFAULT_TRIAD_PROB)]
    pub triad: f64,
}

impl GeneratorArgs {
    fn params(&self, seed: u64) -> GeneratorParams {
        GeneratorParams {
            node_count: self.nodes,
            out_degree_target: self.out_degree,
            reciprocity_prob: self.reciprocity,
            triad_prob: self.triad,
            seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Edge-list path; strengths go next to it with a `.strengths` extension.
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Config keys as flags. Flags win over `--config`, which wins over defaults.
#[derive(Debug, Args, Default)]
pub struct ConfigArgs {
    /// JSON config file with any subset of the keys below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "p_new", visible_alias = "p-new")]
    pub p_new: Option<f64>,
    #[arg(long = "p_anger", visible_alias = "p-anger")]
    pub p_anger: Option<f64>,
    #[arg(long = "p_disgust", visible_alias = "p-disgust")]
    pub p_disgust: Option<f64>,
    #[arg(long = "p_joy", visible_alias = "p-joy")]
    pub p_joy: Option<f64>,
    #[arg(long = "p_sadness", visible_alias = "p-sadness")]
    pub p_sadness: Option<f64>,
    #[arg(long = "c_anger", visible_alias = "c-anger")]
    pub c_anger: Option<f64>,
    #[arg(long = "c_disgust", visible_alias = "c-disgust")]
    pub c_disgust: Option<f64>,
    #[arg(long = "c_joy", visible_alias = "c-joy")]
    pub c_joy: Option<f64>,
    #[arg(long = "c_sadness", visible_alias = "c-sadness")]
    pub c_sadness: Option<f64>,
    /// Screen capacity [default: 20]
    #[arg(long = "screen_size", visible_alias = "screen-size")]
    pub screen_size: Option<usize>,
    /// Activations per run [default: 10 x nodes]
    #[arg(long)]
    pub steps: Option<u64>,
    /// Retweet threshold [default: 0.06]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Seed for every random stream [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    fn overrides(&self) -> ConfigFile {
        ConfigFile {
            p_new: self.p_new,
            p_anger: self.p_anger,
            p_disgust: self.p_disgust,
            p_joy: self.p_joy,
            p_sadness: self.p_sadness,
            c_anger: self.c_anger,
            c_disgust: self.c_disgust,
            c_joy: self.c_joy,
            c_sadness: self.c_sadness,
            screen_size: self.screen_size,
            steps: self.steps,
            tau: self.tau,
            seed: self.seed,
        }
    }

    /// Defaults sized for `node_count`, overlaid with the file and then the flags.
    pub fn resolve(&self, node_count: usize) -> Result<SimulationConfig, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        Ok(file
            .merged(&self.overrides())
            .apply(SimulationConfig::for_graph_size(node_count)))
    }

    fn seed(&self) -> Result<u64, CliError> {
        Ok(match (&self.seed, &self.config) {
            (Some(s), _) => *s,
            (None, Some(p)) => ConfigFile::load(p)?.seed.unwrap_or(1),
            (None, None) => 1,
        })
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Event log path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Metadata JSON path [default: output with `.meta.json` extension]
    #[arg(long)]
    pub metadata: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepGraphArgs {
    /// Edge-list file; a graph is generated when absent.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Generator seed [default: --seed]
    #[arg(long = "graph-seed")]
    pub graph_seed: Option<u64>,
    /// Run seeds [default: five consecutive seeds from --seed]
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
}

impl SweepGraphArgs {
    fn source(&self, seed: u64) -> GraphSource {
        match &self.graph {
            Some(p) => GraphSource::Path(p.clone()),
            None => GraphSource::Generate(self.generator.params(self.graph_seed.unwrap_or(seed))),
        }
    }

    fn seeds(&self, seed: u64) -> Vec<u64> {
        if self.seeds.is_empty() {
            (seed..seed + 5).collect()
        } else {
            self.seeds.clone()
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepTauArgs {
    #[command(flatten)]
    pub graph: SweepGraphArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Threshold values.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_TAUS)]
    pub taus: Vec<f64>,
    /// Per-seed table; means and manifest are written next to it.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write per-user vitality at `--vitality-tau` to this path.
    #[arg(long = "vitality-out")]
    pub vitality_out: Option<PathBuf>,
    #[arg(long = "vitality-tau", default_value_t = 0.06)]
    pub vitality_tau: f64,
}

#[derive(Debug, Args)]
pub struct SweepGapArgs {
    #[command(flatten)]
    pub graph: SweepGraphArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Values of P_joy - P_anger [default: 0,0.04,...,0.40]
    #[arg(long, value_delimiter = ',')]
    pub gaps: Vec<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EqualPriorArgs {
    #[command(flatten)]
    pub graph: SweepGraphArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_TAUS)]
    pub taus: Vec<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Event log written by `run`.
    #[arg(long)]
    pub events: PathBuf,
    /// Edge-list file the log was produced on.
    #[arg(long)]
    pub graph: PathBuf,
    /// Report CSV path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Per-user vitality CSV path.
    #[arg(long)]
    pub vitality: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<ValidationError> for CliError {
    fn from(e: ValidationError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Params(_) => CliError::Validation(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Validation(v) => v.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Spec(_) | ExperimentError::Gap(_) | ExperimentError::Validation(_) => {
                CliError::Validation(e.to_string())
            }
            ExperimentError::Graph(g) => g.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<EventLogError> for CliError {
    fn from(e: EventLogError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Runtime(format!("cannot open {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<NetworkGraph, CliError> {
    load_edge_list(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

/// `out.csv` -> `out.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let graph = generate_network(&args.generator.params(args.seed))?;
    let spath = graph.save(&args.output)?;
    println!(
        "wrote {} ({} nodes, {} edges) and {}",
        args.output.display(),
        graph.node_count(),
        graph.edge_count(),
        spath.display()
    );
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let graph = load_graph(&args.graph)?;
    let config = args.config.resolve(graph.node_count())?;
    let started = Instant::now();
    let out = run(&graph, &config)?;
    let elapsed = started.elapsed();
    let mut w = create(&args.output)?;
    write_event_log(&out.events, &mut w)?;
    w.flush()?;

    let retweets = out.retweets().count() as u64;
    let meta = RunMetadata {
        config: config.to_file(),
        seed: config.seed,
        graph_hash: graph.content_hash(),
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        steps: out.steps,
        posts: out.message_count,
        retweets,
        wall_clock_ms: elapsed.as_millis(),
    };
    let meta_path = args
        .metadata
        .clone()
        .unwrap_or_else(|| sibling(&args.output, "meta.json"));
    std::fs::write(
        &meta_path,
        serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n",
    )?;
    println!(
        "{} events ({} posts, {} retweets) -> {}",
        out.events.len(),
        out.message_count,
        retweets,
        args.output.display()
    );
    Ok(())
}

fn write_table(table: &SweepTable, manifest: &Manifest, output: &Path) -> Result<(), CliError> {
    let mut w = create(output)?;
    table.write_csv(&mut w)?;
    w.flush()?;
    let mut m = create(&sibling(output, "means.csv"))?;
    table.write_means_csv(&mut m)?;
    m.flush()?;
    manifest.write(&sibling(output, "manifest.json"))?;
    println!("{} rows -> {}", table.rows.len(), output.display());
    Ok(())
}

struct Prepared {
    graph: NetworkGraph,
    spec: SweepSpec,
}

fn prepare(
    graph_args: &SweepGraphArgs,
    config: &ConfigArgs,
    variable: SweepVariable,
    values: Vec<f64>,
) -> Result<Prepared, CliError> {
    let seed = config.seed()?;
    let source = graph_args.source(seed);
    let graph = source.load()?;
    let base = config.resolve(graph.node_count())?;
    let spec = SweepSpec {
        base_config: base,
        variable,
        values,
        seeds: graph_args.seeds(seed),
        graph_source: source,
    };
    spec.validate()?;
    Ok(Prepared { graph, spec })
}

fn cmd_sweep_tau(args: &SweepTauArgs) -> Result<(), CliError> {
    let Prepared { graph, spec } = prepare(&args.graph, &args.config, SweepVariable::Tau, args.taus.clone())?;
    let table = run_sweep(&graph, &spec)?;
    write_table(&table, &Manifest::new("sweep-tau", &spec, &graph), &args.output)?;
    for (seed, tau) in retweet_crossover_by_seed(&table) {
        match tau {
            Some(t) => println!("seed {seed}: anger retweet share first exceeds joy at tau={t}"),
            None => println!("seed {seed}: anger retweet share never exceeds joy"),
        }
    }
    if let Some(path) = &args.vitality_out {
        let cfg = SimulationConfig {
            tau: args.vitality_tau,
            ..spec.base_config
        };
        let snaps = vitality_snapshot(&graph, &cfg, &spec.seeds)?;
        let mut w = create(path)?;
        write_vitality_snapshots(&snaps, &mut w)?;
        w.flush()?;
        println!("vitality at tau={} -> {}", args.vitality_tau, path.display());
    }
    Ok(())
}

fn cmd_sweep_gap(args: &SweepGapArgs) -> Result<(), CliError> {
    let gaps = if args.gaps.is_empty() {
        default_gaps()
    } else {
        args.gaps.clone()
    };
    let Prepared { graph, spec } = prepare(&args.graph, &args.config, SweepVariable::Gap, gaps)?;
    let tau = spec.base_config.tau;
    let sweep = sweep_gap_on(&graph, &spec, tau)?;
    let mut spec = spec;
    spec.base_config.tau = tau;
    let mut manifest = Manifest::new("sweep-gap", &spec, &graph);
    manifest.crossovers = Some(sweep.crossovers);
    write_table(&sweep.table, &manifest, &args.output)?;
    let show = |v: Option<f64>| v.map_or("none".to_string(), |g| format!("{g:.4}"));
    println!(
        "crossover at tau={tau}: tweets {} users {}",
        show(sweep.crossovers.tweets),
        show(sweep.crossovers.users)
    );
    Ok(())
}

fn cmd_equal_prior(args: &EqualPriorArgs) -> Result<(), CliError> {
    let Prepared { graph, mut spec } = prepare(&args.graph, &args.config, SweepVariable::Tau, args.taus.clone())?;
    spec.base_config.emotion_params = EmotionParams::equal_priors();
    let table = equal_prior_run(&graph, &spec.base_config, &spec.values, &spec.seeds)?;
    write_table(&table, &Manifest::new("equal-prior", &spec, &graph), &args.output)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let graph = load_graph(&args.graph)?;
    let events = read_event_log(open(&args.events)?)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.events.display())))?;
    let report = MetricsReport::from_events(&events, &graph)?;
    let mut w = create(&args.output)?;
    write_report_csv(&report, &mut w)?;
    w.flush()?;
    if let Some(path) = &args.vitality {
        let mut v = create(path)?;
        write_vitality_csv(&report.vitality, &mut v)?;
        v.flush()?;
    }
    println!("report -> {}", args.output.display());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::SweepTau(a) => cmd_sweep_tau(a),
        Command::SweepGap(a) => cmd_sweep_gap(a),
        Command::EqualPrior(a) => cmd_equal_prior(a),
        Command::Analyze(a) => cmd_analyze(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_and_help() {
        assert_eq!(main_with_args(["emocon"]), EXIT_USAGE);
        assert_eq!(main_with_args(["emocon", "run", "--bogus"]), EXIT_USAGE);
        assert_eq!(main_with_args(["emocon", "--help"]), EXIT_OK);
        assert_eq!(main_with_args(["emocon", "run", "--help"]), EXIT_OK);
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(
            sibling(Path::new("out/sweep.csv"), "means.csv"),
            PathBuf::from("out/sweep.means.csv")
        );
        assert_eq!(
            sibling(Path::new("events"), "meta.json"),
            PathBuf::from("events.meta.json")
        );
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"tau": 0.03, "seed": 4, "steps": 9}"#).unwrap();
        let args = ConfigArgs {
            config: Some(p),
            tau: Some(0.07),
            ..Default::default()
        };
        let c = args.resolve(100).unwrap();
        assert_eq!(c.tau, 0.07);
        assert_eq!(c.seed, 4);
        assert_eq!(c.steps, 9);
        assert_eq!(args.seed().unwrap(), 4);
        assert_eq!(ConfigArgs::default().resolve(100).unwrap().steps, 1000);
    }
}
