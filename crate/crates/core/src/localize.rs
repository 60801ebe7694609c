//! Localization of a single activated piece in a noisy signal.
//!
//! All solvers here answer the same question: which connected set of nodes
//! best explains a signal that is approximately an indicator (times a
//! magnitude) plus noise? They differ in the shape prior:
//!
//! * `hard_threshold_localize` keeps nodes above 1/2 and projects to the
//!   largest connected component.
//! * `cut_localize` minimizes `||x - t||^2 + lambda * cut(t)` exactly over
//!   binary labelings via minimum s-t cut, sweeping `lambda` over a grid and
//!   keeping the unregularized best.
//! * `path_relax_localize` and `path_sp_localize` target path-shaped pieces:
//!   the first through a convex relaxation with degree constraints, the
//!   second exactly over all simple paths through a shortest-path reduction.
//! * `localize_unit` combines the cut and path families; `localize_unknown`
//!   alternates support and magnitude estimation when the height of the
//!   piece is unknown.
//!
//! Nothing here mutates the graph and every solver is deterministic, so
//! calls over disjoint signals (for example a lambda sweep or a Monte Carlo
//! harness) can run in parallel.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::maxflow::min_st_cut;
use crate::piece::Piece;
use crate::qp::{solve_degree_qp, QP_MAX_SWEEPS, QP_TOL};
use crate::shortest_path::{dijkstra, weighted_adjacency};
use crate::signal::{check_signal, model_objective, unit_objective, GraphSignal};

/// Nodes activate only above this value; comparisons are strict.
pub const ACTIVATION_THRESHOLD: f64 = 0.5;

/// Cap on support/magnitude alternations in `localize_unknown`.
pub const UNKNOWN_MAX_ITERS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalizeMethod {
    Hard,
    Cut,
    PathRelax,
    PathSp,
    Combined,
    Glap,
}

impl LocalizeMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            LocalizeMethod::Hard => "hard",
            LocalizeMethod::Cut => "cut",
            LocalizeMethod::PathRelax => "path_relax",
            LocalizeMethod::PathSp => "path_sp",
            LocalizeMethod::Combined => "combined",
            LocalizeMethod::Glap => "glap",
        }
    }
}

impl std::fmt::Display for LocalizeMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One localized piece with its unregularized objective `||x - 1_C||^2`
/// (`||x - mu * 1_C||^2` for unknown-magnitude results) and, when a
/// regularizer weight was involved, the weight that produced the piece.
#[derive(Debug, Clone)]
pub struct LocalizeResult {
    pub piece: Piece,
    pub objective: f64,
    pub method: LocalizeMethod,
    pub lambda: Option<f64>,
}

/// Strictly increasing regularizer grid starting at 0, so the unregularized
/// candidate is always in the sweep.
#[derive(Debug, Clone)]
pub struct LambdaGrid {
    values: Vec<f64>,
}

impl LambdaGrid {
    pub fn new(values: Vec<f64>) -> Result<LambdaGrid> {
        if values.is_empty() {
            return Err(Error::invalid("lambda grid must be nonempty"));
        }
        if values[0] != 0.0 {
            return Err(Error::invalid("lambda grid must start at 0"));
        }
        for pair in values.windows(2) {
            if !(pair[1] > pair[0]) || !pair[1].is_finite() {
                return Err(Error::invalid("lambda grid must be strictly increasing and finite"));
            }
        }
        Ok(LambdaGrid { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Default for LambdaGrid {
    /// `{0} + {0.01 * 2^k : k = 0..=12}`, covering roughly four orders of
    /// magnitude of boundary penalty.
    fn default() -> LambdaGrid {
        let mut values = vec![0.0];
        values.extend((0..=12).map(|k| 0.01 * f64::powi(2.0, k)));
        LambdaGrid { values }
    }
}

fn active_nodes(x: &[f64]) -> Vec<usize> {
    (0..x.len()).filter(|&i| x[i] > ACTIVATION_THRESHOLD).collect()
}

/// Keeps nodes with `x_i > 1/2` and returns the largest connected component
/// among them. Errors with `EmptyResult` when no node clears the threshold.
pub fn hard_threshold_localize(graph: &Graph, x: &GraphSignal) -> Result<LocalizeResult> {
    check_signal(graph, x)?;
    let piece = graph
        .project_to_piece(&active_nodes(x.values()))
        .ok_or(Error::EmptyResult)?;
    let objective = unit_objective(x.values(), piece.nodes());
    Ok(LocalizeResult { piece, objective, method: LocalizeMethod::Hard, lambda: None })
}

/// Exact minimizer of `||x - t||^2 + lambda * ||boundary(t)||_0` over binary
/// labelings, via minimum s-t cut. Returns the full labeling together with
/// the localized piece (largest activated component). Errors with
/// `EmptyResult` when the optimal labeling is all zeros.
pub fn cut_localize_fixed(
    graph: &Graph,
    x: &GraphSignal,
    lambda: f64,
) -> Result<(Vec<bool>, LocalizeResult)> {
    check_signal(graph, x)?;
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::invalid(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    let terminal: Vec<(f64, f64)> = x
        .values()
        .iter()
        .map(|&xi| (xi * xi, (xi - 1.0) * (xi - 1.0)))
        .collect();
    let pairwise: Vec<(usize, usize, f64)> =
        graph.edges().iter().map(|&(u, v)| (u, v, lambda)).collect();
    let cut = min_st_cut(graph.node_count(), &terminal, &pairwise)?;
    let active: Vec<usize> = (0..graph.node_count()).filter(|&i| cut.labels[i]).collect();
    let piece = graph.project_to_piece(&active).ok_or(Error::EmptyResult)?;
    let objective = unit_objective(x.values(), piece.nodes());
    Ok((
        cut.labels,
        LocalizeResult { piece, objective, method: LocalizeMethod::Cut, lambda: Some(lambda) },
    ))
}

/// Sweeps `cut_localize_fixed` over the grid and keeps the piece with the
/// smallest unregularized objective; ties resolve to the smaller lambda.
/// Lambdas whose optimal labeling is empty are skipped; if every lambda is
/// empty the sweep errors with `EmptyResult`.
pub fn cut_localize(graph: &Graph, x: &GraphSignal, grid: &LambdaGrid) -> Result<LocalizeResult> {
    let mut best: Option<LocalizeResult> = None;
    for &lambda in grid.values() {
        match cut_localize_fixed(graph, x, lambda) {
            Ok((_, candidate)) => match &best {
                Some(b) if candidate.objective >= b.objective => {}
                _ => best = Some(candidate),
            },
            Err(Error::EmptyResult) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::EmptyResult)
}

/// Convex relaxation for path-shaped pieces: projects `x` onto
/// `{0 <= t <= 1, (A t)_i <= 2}` (adjacency rows bound how many neighbors
/// of a node may be active, which caps the width of the piece), then sweeps
/// thresholds over the distinct values of the relaxed solution and keeps the
/// best projected piece. Errors with `EmptyResult` when no node clears the
/// activation threshold.
pub fn path_relax_localize(graph: &Graph, x: &GraphSignal) -> Result<LocalizeResult> {
    check_signal(graph, x)?;
    if !(x.max_value() > ACTIVATION_THRESHOLD) {
        return Err(Error::EmptyResult);
    }
    let sol = solve_degree_qp(graph, x.values(), QP_TOL, QP_MAX_SWEEPS)?;
    log::debug!(
        "path relaxation settled after {} sweeps (residual {:.3e})",
        sol.sweeps,
        sol.residual
    );

    let mut thresholds = sol.t.clone();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let mut best: Option<LocalizeResult> = None;
    for &theta in &thresholds {
        let mask: Vec<usize> = (0..sol.t.len()).filter(|&i| sol.t[i] >= theta).collect();
        let Some(piece) = graph.project_to_piece(&mask) else { continue };
        let objective = unit_objective(x.values(), piece.nodes());
        match &best {
            Some(b) if objective >= b.objective => {}
            _ => {
                best = Some(LocalizeResult {
                    piece,
                    objective,
                    method: LocalizeMethod::PathRelax,
                    lambda: Some(theta),
                })
            }
        }
    }
    best.ok_or(Error::EmptyResult)
}

/// Exact path localization by shortest-path reduction.
///
/// With `lambda = 2 * max(x) - 1` and `y_i = max(x) - x_i >= 0`, the
/// regularized objective of a path piece `C` with endpoints `(s, t)` is
/// `||x||^2 + 2 * (dist_W(s, t) + (y_s + y_t) / 2)` under edge weights
/// `W_uv = (y_u + y_v) / 2`, so minimizing over all endpoint pairs with
/// Dijkstra minimizes over all simple paths with at least two nodes. The
/// selection uses the regularized objective; the reported objective is
/// unregularized. Errors on graphs with no edges, and with `EmptyResult`
/// when no node clears the activation threshold.
pub fn path_sp_localize(graph: &Graph, x: &GraphSignal) -> Result<LocalizeResult> {
    check_signal(graph, x)?;
    if graph.edge_count() == 0 {
        return Err(Error::invalid("path localization needs a graph with at least one edge"));
    }
    let x_max = x.max_value();
    if !(x_max > ACTIVATION_THRESHOLD) {
        return Err(Error::EmptyResult);
    }
    let lambda = 2.0 * x_max - 1.0;
    let y: Vec<f64> = x.values().iter().map(|&xi| x_max - xi).collect();
    let weights: Vec<f64> =
        graph.edges().iter().map(|&(u, v)| 0.5 * (y[u] + y[v])).collect();
    let adj = weighted_adjacency(graph, &weights)?;

    let mut best: Option<(f64, usize, usize)> = None;
    for s in 0..graph.node_count() {
        let sp = dijkstra(&adj, s);
        for t in (s + 1)..graph.node_count() {
            if !sp.dist[t].is_finite() {
                continue;
            }
            let score = sp.dist[t] + 0.5 * (y[s] + y[t]);
            match best {
                Some((b, _, _)) if score >= b => {}
                _ => best = Some((score, s, t)),
            }
        }
    }
    let (_, s, t) = best.ok_or(Error::EmptyResult)?;
    let nodes = dijkstra(&adj, s).path_to(t).expect("endpoints chosen from reachable pairs");
    let piece = Piece::new(nodes)?;
    let objective = unit_objective(x.values(), piece.nodes());
    Ok(LocalizeResult { piece, objective, method: LocalizeMethod::PathSp, lambda: Some(lambda) })
}

/// Better of the two path solvers by unregularized objective; ties go to the
/// shortest-path candidate. A failed branch falls back to the other; if both
/// fail, the relaxation's error is returned.
pub fn path_localize(graph: &Graph, x: &GraphSignal) -> Result<LocalizeResult> {
    let relax = path_relax_localize(graph, x);
    let sp = path_sp_localize(graph, x);
    match (relax, sp) {
        (Ok(r), Ok(s)) => Ok(if r.objective < s.objective { r } else { s }),
        (Ok(r), Err(_)) => Ok(r),
        (Err(_), Ok(s)) => Ok(s),
        (Err(r), Err(_)) => Err(r),
    }
}

/// Unit-magnitude localizer: better of the cut and path families by
/// unregularized objective, ties to the cut branch. A failed branch falls
/// back to the other; if both fail, the cut branch's error is returned.
pub fn localize_unit(graph: &Graph, x: &GraphSignal, grid: &LambdaGrid) -> Result<LocalizeResult> {
    let cut = cut_localize(graph, x, grid);
    let path = path_localize(graph, x);
    match (cut, path) {
        (Ok(c), Ok(p)) => Ok(if p.objective < c.objective { p } else { c }),
        (Ok(c), Err(_)) => Ok(c),
        (Err(_), Ok(p)) => Ok(p),
        (Err(c), Err(_)) => Err(c),
    }
}

/// Mean of `x` over the nodes of `piece`: the closed-form magnitude that
/// minimizes `||x - mu * 1_C||^2` for a fixed support.
pub fn piece_mean(x: &GraphSignal, piece: &Piece) -> f64 {
    let sum: f64 = piece.nodes().iter().map(|&u| x.values()[u]).sum();
    sum / piece.len() as f64
}

/// Output of `localize_unknown`: the fitted magnitude, the localized piece
/// (its `magnitude` field is set to the fit), and the accepted objective
/// values in order, which are non-increasing.
#[derive(Debug, Clone)]
pub struct PieceFit {
    pub magnitude: f64,
    pub result: LocalizeResult,
    pub objective_log: Vec<f64>,
}

/// Localization with unknown magnitude: alternates `mu <- mean(x over C)`
/// and `C <- localize_unit(x / mu)`, starting from `mu = max(x)`, for at
/// most `UNKNOWN_MAX_ITERS` rounds. A round that would increase
/// `||x - mu * 1_C||^2` is rejected and stops the loop, as does `mu <= 0` or
/// a support update that errors; the last accepted state is returned after a
/// final closed-form magnitude refit.
pub fn localize_unknown(graph: &Graph, x: &GraphSignal, grid: &LambdaGrid) -> Result<PieceFit> {
    check_signal(graph, x)?;
    let x_max = x.max_value();
    if !(x_max > 0.0) {
        // No positive entry can seed the magnitude, so nothing activates.
        return Err(Error::EmptyResult);
    }

    let mut mu = x_max;
    let mut cur = localize_unit(graph, &x.scaled(mu), grid)?;
    let mut best = objective_with(x, mu, &cur.piece);
    let mut log = vec![best];

    for _ in 0..UNKNOWN_MAX_ITERS {
        let next_mu = piece_mean(x, &cur.piece);
        if !(next_mu > 0.0) {
            break;
        }
        let next = match localize_unit(graph, &x.scaled(next_mu), grid) {
            Ok(r) => r,
            Err(e) => {
                log::debug!("support update failed, keeping last state: {e}");
                break;
            }
        };
        let objective = objective_with(x, next_mu, &next.piece);
        if objective > best {
            break;
        }
        let converged = next.piece.nodes() == cur.piece.nodes();
        mu = next_mu;
        cur = next;
        best = objective;
        log.push(objective);
        if converged {
            break;
        }
    }

    // Final refit: the closed-form magnitude for the final support never
    // increases the objective, and makes mu the exact mean over the piece.
    let refit = piece_mean(x, &cur.piece);
    if refit > 0.0 {
        let objective = objective_with(x, refit, &cur.piece);
        if objective <= best {
            mu = refit;
            best = objective;
            log.push(objective);
        }
    }

    let piece = Piece::with_magnitude(cur.piece.nodes().to_vec(), mu)?;
    Ok(PieceFit {
        magnitude: mu,
        result: LocalizeResult {
            piece,
            objective: best,
            method: cur.method,
            lambda: cur.lambda,
        },
        objective_log: log,
    })
}

fn objective_with(x: &GraphSignal, mu: f64, piece: &Piece) -> f64 {
    let scaled = Piece::with_magnitude(piece.nodes().to_vec(), mu).expect("piece stays valid");
    model_objective(x, std::slice::from_ref(&scaled))
}
