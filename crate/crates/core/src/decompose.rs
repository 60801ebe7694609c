//! Decomposition of a signal into K magnitude-weighted pieces.
//!
//! Greedy peeling seeds the pieces, then cyclic coordinate sweeps refit one
//! piece at a time against the residual of the others. Every update is
//! accepted only if the global objective `||x - sum mu_i 1_{C_i}||^2` does
//! not increase, so the recorded trace is non-increasing by construction.
//! Pieces may overlap; nothing here assumes disjoint supports.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::localize::{localize_unknown, LambdaGrid};
use crate::piece::Piece;
use crate::signal::{check_signal, model_objective, GraphSignal};

/// Magnitudes below this are treated as a dead piece and re-seeded.
pub const PIECE_DEATH_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct DecomposeOptions {
    pub max_sweeps: usize,
    /// Relative objective decrease per sweep below which the loop stops.
    pub tol: f64,
}

impl Default for DecomposeOptions {
    fn default() -> DecomposeOptions {
        DecomposeOptions { max_sweeps: 50, tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// K pieces; each carries its fitted magnitude.
    pub pieces: Vec<Piece>,
    /// Global objective after every accepted update, non-increasing.
    pub objective_trace: Vec<f64>,
    /// `x` minus the final model; `||residual||^2` equals the final
    /// objective.
    pub residual: GraphSignal,
}

fn residual_without(x: &GraphSignal, pieces: &[Piece], skip: Option<usize>) -> GraphSignal {
    let mut values = x.values().to_vec();
    for (j, piece) in pieces.iter().enumerate() {
        if Some(j) == skip {
            continue;
        }
        piece.add_scaled_to(&mut values, -piece.magnitude);
    }
    GraphSignal::new(values).expect("finite signal minus finite model")
}

fn fallback_piece(residual: &GraphSignal) -> Piece {
    // Zero-magnitude singleton at the largest absolute residual; keeps the
    // model unchanged while giving later sweeps a slot to improve.
    let mut node = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &v) in residual.values().iter().enumerate() {
        if v.abs() > best {
            best = v.abs();
            node = i;
        }
    }
    Piece::with_magnitude(vec![node], 0.0).expect("singleton piece")
}

/// Fits `k` pieces to `x` by greedy peeling plus cyclic coordinate descent.
///
/// With `k = 1` this reduces exactly to `localize_unknown`. A localization
/// step that errors leaves its piece unchanged and never aborts the sweep.
pub fn decompose(
    graph: &Graph,
    x: &GraphSignal,
    k: usize,
    grid: &LambdaGrid,
    options: &DecomposeOptions,
) -> Result<Decomposition> {
    check_signal(graph, x)?;
    if k == 0 {
        return Err(Error::invalid("piece count must be at least 1"));
    }

    let mut pieces: Vec<Piece> = Vec::with_capacity(k);
    let mut trace = Vec::new();
    let mut objective = model_objective(x, &pieces);

    for _ in 0..k {
        let residual = residual_without(x, &pieces, None);
        let candidate = match localize_unknown(graph, &residual, grid) {
            Ok(fit) => fit.result.piece,
            Err(e) => {
                log::debug!("peeling step found no piece ({e}); seeding a zero placeholder");
                fallback_piece(&residual)
            }
        };
        pieces.push(candidate);
        let with_candidate = model_objective(x, &pieces);
        if with_candidate <= objective {
            objective = with_candidate;
        } else {
            let residual = residual_without(x, &pieces[..pieces.len() - 1], None);
            *pieces.last_mut().unwrap() = fallback_piece(&residual);
            objective = model_objective(x, &pieces);
        }
        trace.push(objective);
    }

    for _ in 0..options.max_sweeps {
        let sweep_start = objective;
        for i in 0..k {
            let coordinate_residual = residual_without(x, &pieces, Some(i));
            match localize_unknown(graph, &coordinate_residual, grid) {
                Ok(fit) => {
                    let previous = std::mem::replace(&mut pieces[i], fit.result.piece);
                    let updated = model_objective(x, &pieces);
                    if updated <= objective {
                        objective = updated;
                        trace.push(objective);
                    } else {
                        pieces[i] = previous;
                    }
                }
                Err(e) => {
                    log::debug!("coordinate update {i} failed ({e}); piece left unchanged");
                }
            }

            if pieces[i].magnitude.abs() < PIECE_DEATH_THRESHOLD {
                let residual = residual_without(x, &pieces, None);
                if let Ok(fit) = localize_unknown(graph, &residual, grid) {
                    let previous = std::mem::replace(&mut pieces[i], fit.result.piece);
                    let updated = model_objective(x, &pieces);
                    if updated <= objective {
                        log::debug!("piece {i} died; re-seeded from the residual");
                        objective = updated;
                        trace.push(objective);
                    } else {
                        pieces[i] = previous;
                    }
                }
            }
        }
        if sweep_start <= 0.0 {
            break;
        }
        let relative_drop = (sweep_start - objective) / sweep_start;
        if relative_drop < options.tol {
            break;
        }
    }

    let residual = residual_without(x, &pieces, None);
    Ok(Decomposition { pieces, objective_trace: trace, residual })
}
