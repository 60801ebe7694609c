//! Recovery metrics: support overlap and signal error.

use crate::error::{Error, Result};
use crate::piece::Piece;
use crate::signal::GraphSignal;

/// Size of the symmetric difference between two supports.
pub fn hamming(estimate: &Piece, truth: &Piece) -> usize {
    let (xs, ys) = (estimate.nodes(), truth.nodes());
    let mut diff = 0;
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => {
                diff += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                diff += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    diff + (xs.len() - i) + (ys.len() - j)
}

/// Support F1 score `2 |A and B| / (|A| + |B|)`, in `[0, 1]`; symmetric
/// in its arguments.
pub fn f1(estimate: &Piece, truth: &Piece) -> f64 {
    let total = estimate.len() + truth.len();
    let overlap = (total - hamming(estimate, truth)) / 2;
    2.0 * overlap as f64 / total as f64
}

/// Normalized mean squared error `||estimate - truth||^2 / ||truth||^2`.
pub fn nmse(estimate: &GraphSignal, truth: &GraphSignal) -> Result<f64> {
    if truth.len() != estimate.len() {
        return Err(Error::invalid(format!(
            "signal lengths differ: {} vs {}",
            estimate.len(),
            truth.len()
        )));
    }
    let denom = truth.norm_sq();
    if denom == 0.0 {
        return Err(Error::invalid("reference signal is identically zero"));
    }
    let err: f64 = estimate
        .values()
        .iter()
        .zip(truth.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(err / denom)
}

/// Support-recovery summary for one (truth, estimate) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub hamming: usize,
    pub f1: f64,
}

impl EvalReport {
    pub fn support(estimate: &Piece, truth: &Piece) -> EvalReport {
        EvalReport { hamming: hamming(estimate, truth), f1: f1(estimate, truth) }
    }
}
