//! Experiment configuration: a single JSON document describing a Monte Carlo
//! sweep. Command-line flags override individual fields after loading.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use pcgraph::{Error, Graph, Piece, Result};

/// Experiment kinds a configuration may name. Only `localize` drives the
/// curves sweep; the others are accepted by the parser so configs can be
/// shared across tools, but `cmd_curves` rejects them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    Localize,
    LocalizeUnknown,
    Decompose,
    Learn,
    Curves,
}

/// Graph input: either an edge-list file or a generated geometric graph.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    File { file: PathBuf },
    Geometric { geometric: GeometricSpec },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometricSpec {
    pub n: usize,
    pub radius: f64,
    pub seed: u64,
}

/// Ground-truth piece shape drawn fresh each trial, or a fixed piece file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PieceShape {
    Ball { ball: BallSpec },
    PathBand { path: PathBandSpec },
    File { piece_file: PathBuf },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub hops: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathBandSpec {
    pub min_nodes: usize,
    pub max_nodes: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub task: TaskKind,
    pub shape: PieceShape,
    #[serde(default = "default_levels")]
    pub sigma2_levels: Vec<f64>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_glap_lambdas")]
    pub glap_lambdas: Vec<f64>,
    pub out_dir: PathBuf,
}

fn default_levels() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}

fn default_methods() -> Vec<String> {
    ["hard", "cut", "path", "combined", "glap"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn default_glap_lambdas() -> Vec<f64> {
    vec![0.5, 5.0]
}

pub const KNOWN_METHODS: [&str; 5] = ["hard", "cut", "path", "combined", "glap"];

impl ExperimentConfig {
    /// Parses a config document without checking it, so command-line
    /// overrides can be applied before validation.
    pub fn parse_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("bad experiment config: {e}")))
    }

    pub fn load_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_json_str(&text)
    }

    /// Parses and checks in one step. File paths are interpreted relative
    /// to the working directory and must exist at validation time.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg = Self::parse_json_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let cfg = Self::load_file(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.sigma2_levels.is_empty() {
            return Err(Error::invalid("sigma2_levels must be nonempty"));
        }
        for &s in &self.sigma2_levels {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::invalid(format!("bad noise level {s}")));
            }
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods must be nonempty"));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if !KNOWN_METHODS.contains(&m.as_str()) {
                return Err(Error::invalid(format!(
                    "unknown method {m:?}; expected one of {KNOWN_METHODS:?}"
                )));
            }
            if self.methods[..i].contains(m) {
                return Err(Error::invalid(format!("method {m:?} listed twice")));
            }
        }
        if self.methods.iter().any(|m| m == "glap") {
            if self.glap_lambdas.is_empty() {
                return Err(Error::invalid("glap requested but glap_lambdas is empty"));
            }
            for (i, &l) in self.glap_lambdas.iter().enumerate() {
                if !l.is_finite() || l < 0.0 {
                    return Err(Error::invalid(format!("bad glap lambda {l}")));
                }
                if self.glap_lambdas[..i].contains(&l) {
                    return Err(Error::invalid(format!("glap lambda {l} listed twice")));
                }
            }
        }
        match &self.graph {
            GraphSource::File { file } => require_file(file)?,
            GraphSource::Geometric { geometric } => {
                if geometric.n == 0 {
                    return Err(Error::invalid("geometric graph needs n >= 1"));
                }
                if !geometric.radius.is_finite() || geometric.radius < 0.0 {
                    return Err(Error::invalid(format!(
                        "bad geometric radius {}",
                        geometric.radius
                    )));
                }
            }
        }
        match &self.shape {
            PieceShape::Ball { .. } => {}
            PieceShape::PathBand { path } => {
                if path.min_nodes < 2 {
                    return Err(Error::invalid("path shapes need min_nodes >= 2"));
                }
                if path.max_nodes < path.min_nodes {
                    return Err(Error::invalid("path shape needs max_nodes >= min_nodes"));
                }
            }
            PieceShape::File { piece_file } => require_file(piece_file)?,
        }
        Ok(())
    }

    /// Loads or generates the configured graph.
    pub fn build_graph(&self) -> Result<Graph> {
        match &self.graph {
            GraphSource::File { file } => pcgraph::io::read_edge_list(file),
            GraphSource::Geometric { geometric } => {
                let gg = pcgraph::synth::gen_geometric_graph(
                    geometric.n,
                    geometric.radius,
                    geometric.seed,
                )?;
                Ok(gg.graph)
            }
        }
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "referenced file {} does not exist",
            path.display()
        )))
    }
}

/// Piece document used for fixed-truth sweeps and generator output:
/// `{"nodes": [...], "magnitude": m}` with magnitude defaulting to 1.
#[derive(Debug, Clone, Deserialize)]
pub struct PieceDoc {
    pub nodes: Vec<usize>,
    #[serde(default = "one")]
    pub magnitude: f64,
}

fn one() -> f64 {
    1.0
}

/// Reads a piece document and checks it against `graph` (node range and
/// connectivity).
pub fn read_piece_file(path: &Path, graph: &Graph) -> Result<Piece> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read piece file {}: {e}", path.display())))?;
    let doc: PieceDoc = serde_json::from_str(&text)
        .map_err(|e| Error::invalid(format!("bad piece file {}: {e}", path.display())))?;
    let piece = Piece::with_magnitude(doc.nodes, doc.magnitude)?;
    piece.validate_on(graph)?;
    Ok(piece)
}
