//! Localization, decomposition, and dictionary learning for
//! piecewise-constant signals on graphs.
//!
//! A piecewise-constant graph signal is a sum of magnitude-scaled
//! indicators of connected node sets (pieces) plus noise. This crate
//! recovers that structure at three scales:
//!
//! - [`localize_unit`] / [`localize_unknown`]: one piece, unit or fitted
//!   magnitude, via exact min-cut and shortest-path solvers plus a convex
//!   relaxation;
//! - [`decompose`]: one signal into K pieces by coordinate descent;
//! - [`learn_dictionary`]: K pieces shared across L signals with
//!   per-column sparsity, alternating OMP coding and atom refits.
//!
//! [`baselines::glap_localize`] provides the Laplacian-smoothing
//! comparison method, [`synth`] generates benchmark instances, and
//! [`metrics`] scores recovered supports. Everything is deterministic
//! given its inputs and seeds.

pub mod baselines;
pub mod decompose;
pub mod dictlearn;
pub mod error;
pub mod graph;
pub mod io;
pub mod localize;
pub mod maxflow;
pub mod metrics;
pub mod piece;
mod qp;
pub mod shortest_path;
pub mod signal;
pub mod synth;

pub use crate::decompose::{decompose, DecomposeOptions, Decomposition};
pub use crate::dictlearn::{
    atom_usage, learn_dictionary, omp_sparse_code, update_atom, AtomUsage, CoefficientMatrix,
    LearnOptions, LearnOutcome, PieceDictionary, SignalMatrix,
};
pub use crate::error::{Error, Result};
pub use crate::graph::Graph;
pub use crate::localize::{
    cut_localize, cut_localize_fixed, hard_threshold_localize, localize_unit, localize_unknown,
    path_localize, path_relax_localize, path_sp_localize, piece_mean, LambdaGrid, LocalizeMethod,
    LocalizeResult, PieceFit,
};
pub use crate::maxflow::{min_st_cut, MinCut};
pub use crate::piece::Piece;
pub use crate::shortest_path::{shortest_paths_from, ShortestPaths};
pub use crate::signal::{model_objective, model_signal, GraphSignal};
pub use crate::synth::NoiseSpec;
