//! Signals on graph nodes and piecewise-constant models built from pieces.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::piece::Piece;

/// A real-valued signal indexed by node id. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSignal {
    values: Vec<f64>,
}

impl GraphSignal {
    pub fn new(values: Vec<f64>) -> Result<GraphSignal> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("signal entries must be finite, got {bad}")));
        }
        Ok(GraphSignal { values })
    }

    pub fn zeros(len: usize) -> GraphSignal {
        GraphSignal { values: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Entrywise scale by `1 / divisor`.
    pub fn scaled(&self, divisor: f64) -> GraphSignal {
        GraphSignal { values: self.values.iter().map(|v| v / divisor).collect() }
    }
}

/// Checks that `x` has one value per node of `graph`.
pub fn check_signal(graph: &Graph, x: &GraphSignal) -> Result<()> {
    if x.len() != graph.node_count() {
        return Err(Error::invalid(format!(
            "signal length {} does not match node count {}",
            x.len(),
            graph.node_count()
        )));
    }
    Ok(())
}

/// Model vector: the sum of each piece's magnitude times its indicator.
pub fn model_signal(node_count: usize, pieces: &[Piece]) -> Vec<f64> {
    let mut m = vec![0.0; node_count];
    for piece in pieces {
        piece.add_scaled_to(&mut m, piece.magnitude);
    }
    m
}

/// Squared error between `x` and the model built from `pieces`, summed in
/// node order. Every solver that compares model objectives goes through this
/// function so equal states produce identical floating-point values.
pub fn model_objective(x: &GraphSignal, pieces: &[Piece]) -> f64 {
    let m = model_signal(x.len(), pieces);
    x.values()
        .iter()
        .zip(&m)
        .map(|(xi, mi)| {
            let d = xi - mi;
            d * d
        })
        .sum()
}

/// Squared error between `x` and the unit indicator of `nodes`.
pub fn unit_objective(x: &[f64], nodes: &[usize]) -> f64 {
    let full: f64 = x.iter().map(|v| v * v).sum();
    let adjust: f64 = nodes.iter().map(|&u| 1.0 - 2.0 * x[u]).sum();
    full + adjust
}
