//! `pcgraph`: command-line front end for piecewise-constant graph signal
//! recovery.
//!
//! Results go to stdout as JSON (one document per invocation, `--pretty`
//! for an indented form); logs go to stderr. Exit codes: 0 on success, 2
//! when a solver legitimately found nothing, 1 on any input error.

pub mod config;
pub mod curves;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pcgraph::synth::{gen_ball_piece, gen_geometric_graph, gen_path_piece, gen_signal, NoiseSpec};
use pcgraph::{
    decompose, learn_dictionary, localize_unknown, DecomposeOptions, Error, Graph, GraphSignal,
    LambdaGrid, LearnOptions, Piece, Result,
};

use crate::config::{ExperimentConfig, PieceShape, TaskKind};
use crate::curves::{csv_text, expand_methods, run_sweep, MethodSpec, ShapeSampler, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "pcgraph", version, about = "Recover piecewise-constant structure in graph signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Pretty-print the JSON result.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Localize one piece in a signal.
    Localize(LocalizeArgs),
    /// Decompose a signal into several pieces.
    Decompose(DecomposeArgs),
    /// Learn a piece dictionary from a matrix of signals.
    Learn(LearnArgs),
    /// Run a Monte Carlo noise sweep and write per-method CSV curves.
    Curves(CurvesArgs),
    /// Generate a geometric graph and optionally a planted signal.
    Gen(GenArgs),
}

/// Localization methods exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Threshold at 1/2 and keep the largest connected component.
    Hard,
    /// Regularized cut solver swept over the lambda grid.
    Cut,
    /// Better of the path relaxation and the shortest-path solver.
    Path,
    /// Better of cut and path.
    Combined,
}

impl MethodArg {
    fn spec(&self) -> MethodSpec {
        match self {
            MethodArg::Hard => MethodSpec::Hard,
            MethodArg::Cut => MethodSpec::Cut,
            MethodArg::Path => MethodSpec::Path,
            MethodArg::Combined => MethodSpec::Combined,
        }
    }
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    /// Edge-list graph file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Single-column signal CSV.
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Combined)]
    pub method: MethodArg,
    /// Fit the piece magnitude instead of assuming 1 (combined method only).
    #[arg(long)]
    pub unknown_magnitude: bool,
    /// Comma-separated regularizer grid; must start at 0 and increase.
    #[arg(long, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub signal: PathBuf,
    /// Number of pieces to fit.
    #[arg(long)]
    pub pieces: usize,
    #[arg(long, default_value_t = 50)]
    pub max_sweeps: usize,
    /// Relative objective decrease per sweep below which the loop stops.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Multi-column signal CSV, one column per training signal.
    #[arg(long)]
    pub signals: PathBuf,
    /// Dictionary size.
    #[arg(long)]
    pub atoms: usize,
    /// Atoms per signal in the sparse code.
    #[arg(long)]
    pub sparsity: usize,
    /// Outer alternation count.
    #[arg(long, default_value_t = 30)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving dictionary.json, coefficients.json, usage.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// How many of the most-used atoms the usage report highlights.
    #[arg(long, default_value_t = 5)]
    pub top: usize,
    /// Highest usage count still reported as a rare atom.
    #[arg(long, default_value_t = 2)]
    pub rare_max: usize,
    #[arg(long, value_delimiter = ',')]
    pub lambda_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// Experiment config JSON; flags below override its fields.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Points dropped in the unit square before keeping the largest
    /// connected component.
    #[arg(long)]
    pub nodes: usize,
    /// Connect points within this Euclidean distance.
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge-list output path.
    #[arg(long)]
    pub out_graph: PathBuf,
    /// Ball center (node id in the emitted graph); needs --ball-hops.
    #[arg(long, requires = "ball_hops", conflicts_with_all = ["path_s", "path_t"])]
    pub ball_center: Option<usize>,
    #[arg(long, requires = "ball_center")]
    pub ball_hops: Option<u32>,
    /// Path source (node id in the emitted graph); needs --path-t.
    #[arg(long, requires = "path_t")]
    pub path_s: Option<usize>,
    #[arg(long, requires = "path_s")]
    pub path_t: Option<usize>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub magnitude: f64,
    /// Noise variance added to the planted signal.
    #[arg(long, default_value_t = 0.0)]
    pub sigma2: f64,
    /// Noise stream seed; defaults to --seed.
    #[arg(long)]
    pub noise_seed: Option<u64>,
    /// Signal CSV output path; requires a planted piece.
    #[arg(long)]
    pub out_signal: Option<PathBuf>,
    /// Ground-truth piece JSON output path.
    #[arg(long)]
    pub out_truth: Option<PathBuf>,
}

/// Runs a parsed command line and prints its JSON result to stdout.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Localize(args) => emit(&run_localize(&args)?, cli.pretty),
        Command::Decompose(args) => emit(&run_decompose(&args)?, cli.pretty),
        Command::Learn(args) => emit(&run_learn(&args)?, cli.pretty),
        Command::Curves(args) => emit(&run_curves(&args)?, cli.pretty),
        Command::Gen(args) => emit(&run_gen(&args)?, cli.pretty),
    }
}

fn emit<T: Serialize>(value: &T, pretty: bool) -> Result<()> {
    use std::io::Write;

    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| Error::invalid(format!("cannot serialize result: {e}")))?;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}").and_then(|_| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            // The reader closed the pipe (head, jq -e, ...); the work itself
            // succeeded, so leave quietly instead of panicking.
            std::process::exit(0);
        }
        return Err(Error::invalid(format!("cannot write result: {e}")));
    }
    Ok(())
}

fn build_grid(values: &Option<Vec<f64>>) -> Result<LambdaGrid> {
    match values {
        Some(v) => LambdaGrid::new(v.clone()),
        None => Ok(LambdaGrid::default()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizeOutput {
    pub method: String,
    pub nodes: Vec<usize>,
    pub magnitude: f64,
    pub objective: f64,
    pub lambda: Option<f64>,
}

pub fn run_localize(args: &LocalizeArgs) -> Result<LocalizeOutput> {
    if args.unknown_magnitude && args.method != MethodArg::Combined {
        return Err(Error::invalid(
            "--unknown-magnitude fits the magnitude with the combined method; drop --method or pass --method combined",
        ));
    }
    let graph = pcgraph::io::read_edge_list(&args.graph)?;
    let x = pcgraph::io::read_single_signal_csv(&args.signal)?;
    let grid = build_grid(&args.lambda_grid)?;

    if args.unknown_magnitude {
        let fit = localize_unknown(&graph, &x, &grid)?;
        return Ok(LocalizeOutput {
            method: fit.result.method.as_str().to_string(),
            nodes: fit.result.piece.nodes().to_vec(),
            magnitude: fit.magnitude,
            objective: fit.result.objective,
            lambda: fit.result.lambda,
        });
    }

    let result = args.method.spec().run(&graph, &x, &grid)?;
    Ok(LocalizeOutput {
        method: result.method.as_str().to_string(),
        nodes: result.piece.nodes().to_vec(),
        magnitude: 1.0,
        objective: result.objective,
        lambda: result.lambda,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceOutput {
    pub nodes: Vec<usize>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeOutput {
    pub pieces: Vec<PieceOutput>,
    pub objective_trace: Vec<f64>,
    /// `||x - model||^2 / ||x||^2`; null when the input signal is zero.
    pub nmse: Option<f64>,
}

pub fn run_decompose(args: &DecomposeArgs) -> Result<DecomposeOutput> {
    let graph = pcgraph::io::read_edge_list(&args.graph)?;
    let x = pcgraph::io::read_single_signal_csv(&args.signal)?;
    let grid = build_grid(&args.lambda_grid)?;
    let options = DecomposeOptions { max_sweeps: args.max_sweeps, tol: args.tol };
    let decomposition = decompose(&graph, &x, args.pieces, &grid, &options)?;

    let model = GraphSignal::new(pcgraph::model_signal(graph.node_count(), &decomposition.pieces))
        .expect("model of finite pieces is finite");
    let nmse = pcgraph::metrics::nmse(&model, &x).ok();
    Ok(DecomposeOutput {
        pieces: decomposition
            .pieces
            .iter()
            .map(|p| PieceOutput { nodes: p.nodes().to_vec(), magnitude: p.magnitude })
            .collect(),
        objective_trace: decomposition.objective_trace,
        nmse,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LearnOutput {
    pub dictionary_file: String,
    pub coefficients_file: String,
    pub usage_file: String,
    pub objective_trace: Vec<f64>,
}

#[derive(Serialize)]
struct UsageReport<'a> {
    usage: &'a [pcgraph::AtomUsage],
    common_events: &'a [pcgraph::AtomUsage],
    special_events: Vec<&'a pcgraph::AtomUsage>,
}

pub fn run_learn(args: &LearnArgs) -> Result<LearnOutput> {
    let graph = pcgraph::io::read_edge_list(&args.graph)?;
    let matrix = pcgraph::io::read_signal_csv(&args.signals)?;
    let grid = build_grid(&args.lambda_grid)?;
    let options = LearnOptions { outer_iters: args.iters, rel_tol: args.rel_tol, seed: args.seed };
    let outcome = learn_dictionary(&graph, &matrix, args.atoms, args.sparsity, &grid, &options)?;

    std::fs::create_dir_all(&args.out_dir)?;
    let dictionary_file = args.out_dir.join("dictionary.json");
    let coefficients_file = args.out_dir.join("coefficients.json");
    let usage_file = args.out_dir.join("usage.json");

    std::fs::write(&dictionary_file, outcome.dictionary.to_json_string())?;
    std::fs::write(&coefficients_file, outcome.coefficients.to_json_string())?;
    let usage = pcgraph::atom_usage(&outcome.coefficients);
    let report = UsageReport {
        usage: &usage,
        common_events: pcgraph::dictlearn::common_events(&usage, args.top),
        special_events: pcgraph::dictlearn::special_events(&usage, args.rare_max),
    };
    let text = serde_json::to_string(&report)
        .map_err(|e| Error::invalid(format!("cannot serialize usage report: {e}")))?;
    std::fs::write(&usage_file, text)?;

    Ok(LearnOutput {
        dictionary_file: dictionary_file.display().to_string(),
        coefficients_file: coefficients_file.display().to_string(),
        usage_file: usage_file.display().to_string(),
        objective_trace: outcome.objective_trace,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvesOutput {
    pub out_dir: String,
    pub files: Vec<String>,
    pub levels: usize,
    pub trials: usize,
}

pub fn run_curves(args: &CurvesArgs) -> Result<CurvesOutput> {
    let mut cfg = ExperimentConfig::load_file(&args.config)?;
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out_dir) = &args.out_dir {
        cfg.out_dir = out_dir.clone();
    }
    cfg.validate()?;
    if cfg.task != TaskKind::Localize {
        return Err(Error::invalid(format!(
            "curves runs the localize task; config asks for {:?}",
            cfg.task
        )));
    }

    let graph = cfg.build_graph()?;
    let shape = match &cfg.shape {
        PieceShape::Ball { ball } => ShapeSampler::Ball { hops: ball.hops },
        PieceShape::PathBand { path } => {
            ShapeSampler::PathBand { min_nodes: path.min_nodes, max_nodes: path.max_nodes }
        }
        PieceShape::File { piece_file } => {
            let piece = config::read_piece_file(piece_file, &graph)?;
            ShapeSampler::Fixed(Piece::new(piece.nodes().to_vec())?)
        }
    };
    let methods = expand_methods(&cfg.methods, &cfg.glap_lambdas);
    let grid = LambdaGrid::default();
    let outcome = run_sweep(
        &graph,
        &SweepSpec {
            shape,
            sigma2_levels: &cfg.sigma2_levels,
            trials: cfg.trials,
            seed: cfg.seed,
            methods: &methods,
            grid: &grid,
        },
    )?;

    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut files = Vec::new();
    for (key, stats) in &outcome.curves {
        let path = cfg.out_dir.join(format!("{key}.csv"));
        std::fs::write(&path, csv_text(stats))?;
        files.push(path.display().to_string());
    }
    Ok(CurvesOutput {
        out_dir: cfg.out_dir.display().to_string(),
        files,
        levels: cfg.sigma2_levels.len(),
        trials: cfg.trials,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GenOutput {
    pub graph_file: String,
    pub node_count: usize,
    pub edge_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_file: Option<String>,
}

#[derive(Serialize)]
struct TruthDoc<'a> {
    nodes: &'a [usize],
    magnitude: f64,
}

fn gen_piece(args: &GenArgs, graph: &Graph) -> Result<Option<Piece>> {
    let nodes = match (args.ball_center, args.ball_hops, args.path_s, args.path_t) {
        (Some(center), Some(hops), None, None) => gen_ball_piece(graph, center, hops)?,
        (None, None, Some(s), Some(t)) => gen_path_piece(graph, s, t)?,
        (None, None, None, None) => return Ok(None),
        _ => unreachable!("flag dependencies are enforced by the parser"),
    };
    Ok(Some(Piece::with_magnitude(nodes.nodes().to_vec(), args.magnitude)?))
}

pub fn run_gen(args: &GenArgs) -> Result<GenOutput> {
    let generated = gen_geometric_graph(args.nodes, args.radius, args.seed)?;
    let graph = &generated.graph;
    pcgraph::io::write_edge_list(&args.out_graph, graph)?;

    let piece = gen_piece(args, graph)?;
    let mut signal_file = None;
    if let Some(out_signal) = &args.out_signal {
        let Some(piece) = &piece else {
            return Err(Error::invalid(
                "--out-signal needs a planted piece; pass --ball-center/--ball-hops or --path-s/--path-t",
            ));
        };
        let noise = NoiseSpec::gaussian(args.sigma2, args.noise_seed.unwrap_or(args.seed))?;
        let x = gen_signal(graph.node_count(), std::slice::from_ref(piece), &noise)?;
        pcgraph::io::write_single_signal_csv(out_signal, &x)?;
        signal_file = Some(out_signal.display().to_string());
    }
    let mut truth_file = None;
    if let Some(out_truth) = &args.out_truth {
        let Some(piece) = &piece else {
            return Err(Error::invalid(
                "--out-truth needs a planted piece; pass --ball-center/--ball-hops or --path-s/--path-t",
            ));
        };
        let doc = TruthDoc { nodes: piece.nodes(), magnitude: piece.magnitude };
        let text = serde_json::to_string(&doc)
            .map_err(|e| Error::invalid(format!("cannot serialize truth piece: {e}")))?;
        std::fs::write(out_truth, text)?;
        truth_file = Some(out_truth.display().to_string());
    }

    Ok(GenOutput {
        graph_file: args.out_graph.display().to_string(),
        node_count: graph.node_count(),
        edge_count: graph.edge_count(),
        signal_file,
        truth_file,
    })
}

/// Sizes the global thread pool from `PCGRAPH_THREADS`; silently keeps the
/// default when the variable is unset and warns when it is unusable.
pub fn init_thread_pool() {
    let Ok(raw) = std::env::var("PCGRAPH_THREADS") else { return };
    match raw.parse::<usize>() {
        Ok(n) if n >= 1 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::debug!("thread pool already initialized: {e}");
            }
        }
        _ => log::warn!("ignoring PCGRAPH_THREADS={raw:?}; expected a positive integer"),
    }
}
