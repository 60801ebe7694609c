//! Monte Carlo noise sweep: for each noise level and trial, plant a piece,
//! add Gaussian noise, and score every enabled method on the same signal.
//!
//! Trial seeds are `seed ^ global_trial_index`, so results are independent
//! of thread count and of which methods are enabled; aggregation runs in
//! trial order for bitwise reproducibility.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use pcgraph::baselines::glap_localize;
use pcgraph::metrics;
use pcgraph::synth::{gen_signal_with, sample_ball, sample_path_in_band, NoiseSpec};
use pcgraph::{
    cut_localize, hard_threshold_localize, localize_unit, path_localize, Error, Graph, LambdaGrid,
    LocalizeResult, Piece, Result,
};

/// Retry budget when a trial draws a path piece from a size band.
const PATH_SAMPLE_ATTEMPTS: usize = 500;

/// One localization method in a sweep. `Glap` carries its smoothing weight
/// because each weight produces its own curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Hard,
    Cut,
    Path,
    Combined,
    Glap(f64),
}

impl MethodSpec {
    /// File-name-safe curve key, e.g. `cut` or `glap_0.5`.
    pub fn key(&self) -> String {
        match self {
            MethodSpec::Hard => "hard".to_string(),
            MethodSpec::Cut => "cut".to_string(),
            MethodSpec::Path => "path".to_string(),
            MethodSpec::Combined => "combined".to_string(),
            MethodSpec::Glap(lambda) => format!("glap_{lambda}"),
        }
    }

    pub fn run(&self, graph: &Graph, x: &pcgraph::GraphSignal, grid: &LambdaGrid) -> Result<LocalizeResult> {
        match self {
            MethodSpec::Hard => hard_threshold_localize(graph, x),
            MethodSpec::Cut => cut_localize(graph, x, grid),
            MethodSpec::Path => path_localize(graph, x),
            MethodSpec::Combined => localize_unit(graph, x, grid),
            MethodSpec::Glap(lambda) => glap_localize(graph, x, *lambda),
        }
    }
}

/// Expands config method names into concrete specs, one `Glap` per weight.
pub fn expand_methods(names: &[String], glap_lambdas: &[f64]) -> Vec<MethodSpec> {
    let mut specs = Vec::new();
    for name in names {
        match name.as_str() {
            "hard" => specs.push(MethodSpec::Hard),
            "cut" => specs.push(MethodSpec::Cut),
            "path" => specs.push(MethodSpec::Path),
            "combined" => specs.push(MethodSpec::Combined),
            "glap" => specs.extend(glap_lambdas.iter().map(|&l| MethodSpec::Glap(l))),
            other => unreachable!("method {other} survived config validation"),
        }
    }
    specs
}

/// Ground-truth generator for one trial.
#[derive(Debug, Clone)]
pub enum ShapeSampler {
    Ball { hops: u32 },
    PathBand { min_nodes: usize, max_nodes: usize },
    Fixed(Piece),
}

impl ShapeSampler {
    fn draw(&self, graph: &Graph, rng: &mut ChaCha8Rng) -> Result<Piece> {
        match self {
            ShapeSampler::Ball { hops } => Ok(sample_ball(graph, *hops, rng)),
            ShapeSampler::PathBand { min_nodes, max_nodes } => {
                sample_path_in_band(graph, *min_nodes, *max_nodes, rng, PATH_SAMPLE_ATTEMPTS)
            }
            ShapeSampler::Fixed(piece) => Ok(piece.clone()),
        }
    }
}

/// Aggregated scores for one method at one noise level.
#[derive(Debug, Clone, Serialize)]
pub struct LevelStat {
    pub sigma2: f64,
    pub mean_f1: f64,
    pub mean_hamming: f64,
    pub trials: usize,
}

/// Per-method curves in the order the methods were given.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub curves: Vec<(String, Vec<LevelStat>)>,
}

impl SweepOutcome {
    pub fn curve(&self, key: &str) -> Option<&[LevelStat]> {
        self.curves.iter().find(|(k, _)| k == key).map(|(_, s)| s.as_slice())
    }
}

pub struct SweepSpec<'a> {
    pub shape: ShapeSampler,
    pub sigma2_levels: &'a [f64],
    pub trials: usize,
    pub seed: u64,
    pub methods: &'a [MethodSpec],
    pub grid: &'a LambdaGrid,
}

/// Scores of all methods on one trial's shared signal.
struct TrialRow {
    level: usize,
    scores: Vec<(f64, usize)>,
}

fn run_trial(
    graph: &Graph,
    spec: &SweepSpec<'_>,
    level: usize,
    trial: usize,
) -> Result<TrialRow> {
    let global = (level * spec.trials + trial) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ global);
    let truth = spec.shape.draw(graph, &mut rng)?;
    let unit = Piece::new(truth.nodes().to_vec()).expect("truth piece is nonempty");
    let noise = NoiseSpec::gaussian(spec.sigma2_levels[level], 0)?;
    let x = gen_signal_with(graph.node_count(), std::slice::from_ref(&unit), &noise, &mut rng)?;

    let mut scores = Vec::with_capacity(spec.methods.len());
    for method in spec.methods {
        match method.run(graph, &x, spec.grid) {
            Ok(result) => scores.push((
                metrics::f1(&result.piece, &unit),
                metrics::hamming(&result.piece, &unit),
            )),
            // An empty estimate misses the whole piece.
            Err(Error::EmptyResult) => scores.push((0.0, unit.len())),
            Err(e) => return Err(e),
        }
    }
    Ok(TrialRow { level, scores })
}

/// Runs the full sweep. Trials are independent and run in parallel; the
/// outcome is identical for any thread count.
pub fn run_sweep(graph: &Graph, spec: &SweepSpec<'_>) -> Result<SweepOutcome> {
    if spec.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if spec.methods.is_empty() {
        return Err(Error::invalid("sweep needs at least one method"));
    }
    let levels = spec.sigma2_levels.len();
    let rows: Vec<TrialRow> = (0..levels * spec.trials)
        .into_par_iter()
        .map(|g| run_trial(graph, spec, g / spec.trials, g % spec.trials))
        .collect::<Result<Vec<_>>>()?;

    let mut curves: Vec<(String, Vec<LevelStat>)> = spec
        .methods
        .iter()
        .map(|m| {
            let stats = spec
                .sigma2_levels
                .iter()
                .map(|&s| LevelStat { sigma2: s, mean_f1: 0.0, mean_hamming: 0.0, trials: spec.trials })
                .collect();
            (m.key(), stats)
        })
        .collect();
    // Rows arrive in trial order, so these sums are bitwise reproducible.
    for row in &rows {
        for (m, &(f1, hamming)) in row.scores.iter().enumerate() {
            let stat = &mut curves[m].1[row.level];
            stat.mean_f1 += f1;
            stat.mean_hamming += hamming as f64;
        }
    }
    let t = spec.trials as f64;
    for (_, stats) in &mut curves {
        for stat in stats {
            stat.mean_f1 /= t;
            stat.mean_hamming /= t;
        }
    }
    Ok(SweepOutcome { curves })
}

/// Renders one curve as CSV. Floats print in shortest round-trip form, so
/// equal runs produce byte-identical files.
pub fn csv_text(stats: &[LevelStat]) -> String {
    let mut out = String::from("sigma2,mean_f1,mean_hamming,trials\n");
    for s in stats {
        out.push_str(&format!("{},{},{},{}\n", s.sigma2, s.mean_f1, s.mean_hamming, s.trials));
    }
    out
}
