//! Command-line front end: `simulate`, `sweep`, `survey-import`,
//! `check-theorem` and `replay`.
//!
//! Exit status is 0 on success, 2 for invalid flags or unusable inputs, and 1
//! when an output cannot be written or a check fails.

pub mod manifest;
pub mod svg;

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{derive_seed, sweep_epsilon, verify_theorem1, TheoremCheck};
use crate::cascade::{can_diffusive_shift, run, DEFAULT_HORIZON, DEFAULT_P};
use crate::feature_space::SurveyRatings;
use crate::graph::Graph;
use crate::SimConfig64;
use manifest::{manifest_path, sha256_hex, RunManifest};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Failed(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "snshift",
    version,
    about = "Simulate users shifting between two social networking sites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one cascade and write its trace.
    Simulate(SimulateArgs),
    /// Run paired replicates over several attachment factors.
    Sweep(SweepArgs),
    /// Turn survey ratings into a feature space and report the novelty x2.
    SurveyImport(SurveyArgs),
    /// Decide whether diffusive shift is ruled out and verify it empirically.
    CheckTheorem(TheoremArgs),
    /// Re-execute a run from its manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Edge-list file (two integer ids per line, '#' comments).
    #[arg(long)]
    graph: PathBuf,
    /// Novelty: share of time on features only the new site offers.
    #[arg(long, value_parser = unit_interval)]
    x2: f64,
    /// Non-diffusive adoption probability per day.
    #[arg(long, default_value_t = DEFAULT_P, value_parser = unit_interval)]
    p: f64,
    /// Daily time span.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_HORIZON, value_parser = at_least_one)]
    horizon: usize,
    /// Comma-separated node ids (as in the graph file) that start as dual users.
    #[arg(long, default_value = "", value_parser = id_list)]
    seed_nodes: IdList,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Attachment factor.
    #[arg(long, value_parser = unit_interval)]
    epsilon: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also write a line chart of the adopter fraction.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_parser = unit_list)]
    epsilons: FloatList,
    #[arg(long, value_parser = at_least_one)]
    replicates: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SurveyArgs {
    /// CSV with header `respondent,feature,rating`.
    #[arg(long)]
    ratings: PathBuf,
    /// CSV with header `feature,sns_list`.
    #[arg(long)]
    availability: PathBuf,
    #[arg(long)]
    new_sns: String,
    #[arg(long)]
    old_sns: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TheoremArgs {
    #[arg(long, value_parser = unit_interval)]
    epsilon: f64,
    #[arg(long, value_parser = unit_interval)]
    x2: f64,
    #[arg(long, default_value_t = 100, value_parser = at_least_one)]
    trials: usize,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0.05, value_parser = unit_interval)]
    edge_prob: f64,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Write the reproduced CSV here instead of the recorded path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
struct IdList(Vec<u64>);

#[derive(Debug, Clone, PartialEq)]
struct FloatList(Vec<f64>);

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn at_least_one(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("{s:?} must be an integer >= 1")),
    }
}

fn id_list(s: &str) -> Result<IdList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| format!("{t:?} is not a node id"))
        })
        .collect::<Result<_, _>>()
        .map(IdList)
}

fn unit_list(s: &str) -> Result<FloatList, String> {
    let values: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(unit_interval)
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err("at least one value required".into());
    }
    Ok(FloatList(values))
}

fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

struct LoadedGraph {
    graph: Graph,
    path: PathBuf,
    digest: String,
}

fn load_graph(path: &Path) -> CliResult<LoadedGraph> {
    let bytes = read_input(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))?;
    let graph = Graph::parse_edge_list(text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let path = fs::canonicalize(path).unwrap_or_else(|_| path.to_path_buf());
    Ok(LoadedGraph {
        graph,
        path,
        digest: sha256_hex(&bytes),
    })
}

fn internal_seeds(graph: &Graph, ids: &IdList) -> CliResult<Vec<usize>> {
    let index: HashMap<u64, usize> = graph
        .external_ids()
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, i))
        .collect();
    ids.0
        .iter()
        .map(|id| {
            index.get(id).copied().ok_or_else(|| {
                CliError::Usage(format!("seed node {id} does not appear in the graph"))
            })
        })
        .collect()
}

fn model_config(model: &ModelArgs, graph: &Graph, epsilon: f64) -> CliResult<SimConfig64> {
    let cfg = SimConfig64::new(epsilon, model.x2)
        .with_p(model.p)
        .with_delta(model.delta)
        .with_horizon(model.horizon)
        .with_seeds(internal_seeds(graph, &model.seed_nodes)?)
        .with_rng_seed(model.rng_seed);
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn model_manifest(manifest: &mut RunManifest, model: &ModelArgs, loaded: &LoadedGraph) {
    manifest.set("tool_version", TOOL_VERSION);
    manifest.set("graph", loaded.path.display());
    manifest.set("graph_sha256", &loaded.digest);
    manifest.set("node_count", loaded.graph.node_count());
    manifest.set("edge_count", loaded.graph.edge_count());
    manifest.set("x2", model.x2);
    manifest.set("p", model.p);
    manifest.set("delta", model.delta);
    manifest.set("horizon", model.horizon);
    manifest.set("seed_nodes", join(&model.seed_nodes.0));
    manifest.set("rng_seed", model.rng_seed);
}

fn simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> CliResult<RunManifest> {
    let loaded = load_graph(&args.model.graph)?;
    let cfg = model_config(&args.model, &loaded.graph, args.epsilon)?;
    let trace = run(&loaded.graph, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let csv = trace.to_csv_string();
    write_output(&args.out, csv.as_bytes())?;

    let mut manifest = RunManifest::new();
    manifest.set("command", "simulate");
    model_manifest(&mut manifest, &args.model, &loaded);
    manifest.set("epsilon", args.epsilon);
    manifest.set("out", args.out.display());
    if let Some(svg_path) = &args.svg {
        let points: Vec<(f64, f64)> = trace
            .records
            .iter()
            .map(|r| (r.step as f64, trace.fraction(r.adopters_total)))
            .collect();
        let title = format!(
            "epsilon = {}, x2 = {}, p = {}",
            args.epsilon, args.model.x2, args.model.p
        );
        let chart = svg::line_chart(&points, &title, "day", "fraction using the new site");
        write_output(svg_path, chart.as_bytes())?;
        manifest.set("svg", svg_path.display());
    }
    manifest.set("out_sha256", sha256_hex(csv.as_bytes()));
    write_output(&manifest_path(&args.out), manifest.render().as_bytes())?;

    let _ = writeln!(
        stdout,
        "adopters {}/{} after {} steps ({} diffusive)",
        trace.terminal_adopters(),
        trace.node_count,
        trace.terminal_step,
        trace.total_diffusive()
    );
    Ok(manifest)
}

fn sweep(args: &SweepArgs, stdout: &mut dyn Write) -> CliResult<RunManifest> {
    let loaded = load_graph(&args.model.graph)?;
    let epsilons = &args.epsilons.0;
    let base = model_config(&args.model, &loaded.graph, epsilons[0])?;
    let result = sweep_epsilon(&loaded.graph, &base, epsilons, args.replicates)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let csv = result.to_csv_string();
    write_output(&args.out, csv.as_bytes())?;

    let seeds: Vec<u64> = (0..args.replicates as u64)
        .map(|i| derive_seed(args.model.rng_seed, i))
        .collect();
    let mut manifest = RunManifest::new();
    manifest.set("command", "sweep");
    model_manifest(&mut manifest, &args.model, &loaded);
    manifest.set("epsilons", join(epsilons));
    manifest.set("replicates", args.replicates);
    manifest.set("derived_seeds", join(&seeds));
    manifest.set("out", args.out.display());
    manifest.set("out_sha256", sha256_hex(csv.as_bytes()));
    write_output(&manifest_path(&args.out), manifest.render().as_bytes())?;

    for (i, eps) in epsilons.iter().enumerate() {
        let _ = writeln!(
            stdout,
            "epsilon={eps} median_steps_to_90={}",
            result.median_steps_to_90(i)
        );
    }
    Ok(manifest)
}

fn survey_import(args: &SurveyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let ratings = read_input(&args.ratings)?;
    let availability = read_input(&args.availability)?;
    let usage = |e: crate::feature_space::FeatureSpaceError| CliError::Usage(e.to_string());
    let survey =
        SurveyRatings::read_csv(ratings.as_slice(), availability.as_slice()).map_err(usage)?;
    let space = survey.to_feature_space::<f64>().map_err(usage)?;
    let x2 = space.novelty(&args.new_sns, &args.old_sns).map_err(usage)?;
    let mut buf = Vec::new();
    space
        .write_csv(&mut buf)
        .map_err(|e| CliError::Io(e.to_string()))?;
    write_output(&args.out, &buf)?;
    let _ = writeln!(stdout, "x2={x2}");
    Ok(())
}

fn check_theorem(args: &TheoremArgs, stdout: &mut dyn Write) -> CliResult<()> {
    if can_diffusive_shift(args.epsilon, args.x2) {
        let _ = writeln!(stdout, "POSSIBLE");
        return Ok(());
    }
    let _ = writeln!(stdout, "IMPOSSIBLE");
    let report = verify_theorem1(&TheoremCheck {
        trials: args.trials,
        nodes: args.n..=args.n,
        edge_prob: args.edge_prob..=args.edge_prob,
        fixed: Some((args.epsilon, args.x2)),
        rng_seed: args.rng_seed,
        ..TheoremCheck::default()
    });
    let _ = write!(stdout, "{report}");
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} of {} trials produced diffusive adoptions",
            report.trials - report.passed,
            report.trials
        )))
    }
}

/// Flags that a manifest carries verbatim, per command.
const MODEL_KEYS: &[&str] = &[
    "graph",
    "x2",
    "p",
    "delta",
    "horizon",
    "seed_nodes",
    "rng_seed",
];
const SIMULATE_KEYS: &[&str] = &["epsilon", "out", "svg"];
const SWEEP_KEYS: &[&str] = &["epsilons", "replicates", "out"];

fn replay(args: &ReplayArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let text = read_input(&args.manifest)?;
    let text =
        String::from_utf8(text).map_err(|_| CliError::Usage("manifest is not UTF-8".into()))?;
    let recorded = RunManifest::parse(&text).map_err(CliError::Usage)?;
    let command = recorded
        .get("command")
        .ok_or_else(|| CliError::Usage("manifest has no command".into()))?;
    let extra = match command {
        "simulate" => SIMULATE_KEYS,
        "sweep" => SWEEP_KEYS,
        other => return Err(CliError::Usage(format!("cannot replay command {other:?}"))),
    };

    let graph_path = recorded
        .get("graph")
        .ok_or_else(|| CliError::Usage("manifest has no graph".into()))?;
    let digest = sha256_hex(&read_input(Path::new(graph_path))?);
    if recorded.get("graph_sha256") != Some(digest.as_str()) {
        return Err(CliError::Usage(format!(
            "{graph_path} changed since the run was recorded"
        )));
    }

    let mut argv: Vec<OsString> = vec!["snshift".into(), command.into()];
    for key in MODEL_KEYS.iter().chain(extra) {
        let value = match (*key, &args.out) {
            ("out", Some(out)) => out.display().to_string(),
            _ => match recorded.get(key) {
                Some(v) => v.to_owned(),
                None => continue,
            },
        };
        argv.push(format!("--{}={value}", key.replace('_', "-")).into());
    }
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(format!("manifest: {e}")))?;
    let manifest = match &cli.command {
        Command::Simulate(a) => simulate(a, stdout)?,
        Command::Sweep(a) => sweep(a, stdout)?,
        _ => unreachable!("replay only builds simulate or sweep"),
    };
    if manifest.get("out_sha256") == recorded.get("out_sha256") {
        let _ = writeln!(
            stdout,
            "reproduced {}",
            manifest.get("out").unwrap_or_default()
        );
        Ok(())
    } else {
        let _ = writeln!(stderr, "output differs from the recorded digest");
        Err(CliError::Failed(
            "replay did not reproduce the recorded output".into(),
        ))
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a, stdout).map(|_| ()),
        Command::Sweep(a) => sweep(a, stdout).map(|_| ()),
        Command::SurveyImport(a) => survey_import(a, stdout),
        Command::CheckTheorem(a) => check_theorem(a, stdout),
        Command::Replay(a) => replay(a, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}
