//! Projection of a signal onto `{0 <= t <= 1, (A t)_i <= 2 for all i}`.
//!
//! Minimizing `||x - t||^2` over that polyhedron is exactly the Euclidean
//! projection of `x`, computed here with Dykstra's cyclic projections: one
//! box pass plus one halfspace pass per node whose degree row can actually
//! bind (degree >= 3; rows with degree <= 2 are implied by the box). Each
//! set keeps its own correction term, which is what makes the cycle converge
//! to the projection rather than just a feasible point.

use crate::error::{Error, Result};
use crate::graph::Graph;

pub(crate) struct DegreeQp {
    pub t: Vec<f64>,
    /// Max of final feasibility violation and last sweep's iterate change.
    pub residual: f64,
    pub sweeps: usize,
}

/// Sweep target; tighter than the contractual residual so downstream
/// threshold sweeps see a well-settled iterate.
pub(crate) const QP_TOL: f64 = 1e-8;
/// Residual the solution must meet even when the sweep cap is reached.
pub(crate) const QP_ACCEPT: f64 = 1e-6;
pub(crate) const QP_MAX_SWEEPS: usize = 10_000;

pub(crate) fn solve_degree_qp(
    graph: &Graph,
    x: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> Result<DegreeQp> {
    let n = graph.node_count();
    debug_assert_eq!(x.len(), n);
    let constrained: Vec<usize> = (0..n).filter(|&i| graph.degree(i) >= 3).collect();

    let mut t: Vec<f64> = x.to_vec();
    let mut box_corr = vec![0.0; n];
    let mut half_corr: Vec<Vec<f64>> =
        constrained.iter().map(|&i| vec![0.0; graph.degree(i)]).collect();
    let mut prev = vec![0.0; n];
    let mut scratch: Vec<f64> = Vec::new();

    let mut residual = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        prev.copy_from_slice(&t);

        for i in 0..n {
            let v = t[i] + box_corr[i];
            let projected = v.clamp(0.0, 1.0);
            box_corr[i] = v - projected;
            t[i] = projected;
        }

        for (ci, &i) in constrained.iter().enumerate() {
            let neighbors = graph.neighbors(i);
            scratch.clear();
            scratch.extend(neighbors.iter().zip(&half_corr[ci]).map(|(&j, c)| t[j] + c));
            let total: f64 = scratch.iter().sum();
            if total > 2.0 {
                let shift = (total - 2.0) / neighbors.len() as f64;
                for (slot, (&j, corr)) in
                    scratch.iter().zip(neighbors.iter().zip(&mut half_corr[ci]))
                {
                    t[j] = slot - shift;
                    *corr = shift;
                }
            } else {
                for (slot, (&j, corr)) in
                    scratch.iter().zip(neighbors.iter().zip(&mut half_corr[ci]))
                {
                    t[j] = *slot;
                    *corr = 0.0;
                }
            }
        }

        let mut violation: f64 = 0.0;
        for i in 0..n {
            violation = violation.max(-t[i]).max(t[i] - 1.0);
        }
        for &i in &constrained {
            let row: f64 = graph.neighbors(i).iter().map(|&j| t[j]).sum();
            violation = violation.max(row - 2.0);
        }
        let change = t
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        residual = violation.max(change);
        if residual < tol {
            return Ok(DegreeQp { t, residual, sweeps: sweep });
        }
    }
    if residual < QP_ACCEPT {
        return Ok(DegreeQp { t, residual, sweeps: max_sweeps });
    }
    Err(Error::NonConvergence { residual, iterations: max_sweeps })
}
