//! Dictionary learning over piece-shaped atoms.
//!
//! A dictionary is K connected pieces; signals are approximated as sparse
//! nonconvex combinations `X ~ D Z` with at most S active atoms per column.
//! Sparse coding is orthogonal matching pursuit per column (atom selection
//! on l2-normalized copies, least-squares refit on the raw indicators);
//! the dictionary update refits one atom at a time by localizing a
//! rank-one surrogate signal, accepting only non-increasing Frobenius
//! objectives. Columns are independent during coding, so a parallel
//! implementation could code them concurrently; this one stays sequential
//! and deterministic.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::localize::{localize_unit, localize_unknown, LambdaGrid};
use crate::piece::Piece;

/// OMP stops refining a column once the residual norm drops below this.
pub const OMP_RESIDUAL_EPS: f64 = 1e-9;

/// Coefficient rows with smaller self-inner-product count as dead atoms.
const DEAD_ROW_EPS: f64 = 0.0;

/// K piece-shaped atoms, each validated as connected on the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceDictionary {
    pieces: Vec<Piece>,
}

impl PieceDictionary {
    pub fn new(graph: &Graph, pieces: Vec<Piece>) -> Result<PieceDictionary> {
        if pieces.is_empty() {
            return Err(Error::invalid("dictionary must contain at least one atom"));
        }
        for piece in &pieces {
            piece.validate_on(graph)?;
        }
        Ok(PieceDictionary { pieces })
    }

    pub fn atom_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, j: usize) -> &Piece {
        &self.pieces[j]
    }

    /// `{"K": k, "atoms": [{"nodes": [...]}, ...]}`
    pub fn to_json_string(&self) -> String {
        let doc = DictionaryDoc {
            k: self.pieces.len(),
            atoms: self
                .pieces
                .iter()
                .map(|p| AtomDoc { nodes: p.nodes().to_vec() })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("dictionary serializes")
    }

    pub fn from_json_str(graph: &Graph, text: &str) -> Result<PieceDictionary> {
        let doc: DictionaryDoc = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("malformed dictionary JSON: {e}")))?;
        if doc.k != doc.atoms.len() {
            return Err(Error::invalid(format!(
                "dictionary declares K = {} but lists {} atoms",
                doc.k,
                doc.atoms.len()
            )));
        }
        let pieces = doc
            .atoms
            .into_iter()
            .map(|a| Piece::new(a.nodes))
            .collect::<Result<Vec<_>>>()?;
        PieceDictionary::new(graph, pieces)
    }
}

#[derive(Serialize, Deserialize)]
struct DictionaryDoc {
    #[serde(rename = "K")]
    k: usize,
    atoms: Vec<AtomDoc>,
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    nodes: Vec<usize>,
}

/// Dense N x L signal matrix, column-major; every entry finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    node_count: usize,
    signal_count: usize,
    data: Vec<f64>,
}

impl SignalMatrix {
    pub fn new(node_count: usize, signal_count: usize, data: Vec<f64>) -> Result<SignalMatrix> {
        if data.len() != node_count * signal_count {
            return Err(Error::invalid(format!(
                "signal matrix data length {} does not match {node_count} x {signal_count}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("signal entries must be finite, got {bad}")));
        }
        Ok(SignalMatrix { node_count, signal_count, data })
    }

    pub fn from_columns(node_count: usize, columns: &[Vec<f64>]) -> Result<SignalMatrix> {
        let mut data = Vec::with_capacity(node_count * columns.len());
        for col in columns {
            if col.len() != node_count {
                return Err(Error::invalid(format!(
                    "column length {} does not match node count {node_count}",
                    col.len()
                )));
            }
            data.extend_from_slice(col);
        }
        SignalMatrix::new(node_count, columns.len(), data)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn signal_count(&self) -> usize {
        self.signal_count
    }

    pub fn column(&self, l: usize) -> &[f64] {
        &self.data[l * self.node_count..(l + 1) * self.node_count]
    }

    pub fn is_all_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

/// K x L column-sparse coefficients with at most `sparsity` nonzeros per
/// column. Entries within a column are sorted by atom index.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    atom_count: usize,
    signal_count: usize,
    sparsity: usize,
    columns: Vec<Vec<(usize, f64)>>,
}

impl CoefficientMatrix {
    pub fn new(
        atom_count: usize,
        signal_count: usize,
        sparsity: usize,
        columns: Vec<Vec<(usize, f64)>>,
    ) -> Result<CoefficientMatrix> {
        if columns.len() != signal_count {
            return Err(Error::invalid(format!(
                "expected {signal_count} coefficient columns, got {}",
                columns.len()
            )));
        }
        for col in &columns {
            if col.len() > sparsity {
                return Err(Error::invalid(format!(
                    "column with {} entries exceeds sparsity {sparsity}",
                    col.len()
                )));
            }
            for pair in col.windows(2) {
                if pair[1].0 <= pair[0].0 {
                    return Err(Error::invalid("column entries must have ascending atom indices"));
                }
            }
            for &(row, value) in col {
                if row >= atom_count {
                    return Err(Error::invalid(format!("atom index {row} out of range")));
                }
                if !value.is_finite() {
                    return Err(Error::invalid(format!("coefficient must be finite, got {value}")));
                }
            }
        }
        Ok(CoefficientMatrix { atom_count, signal_count, sparsity, columns })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn signal_count(&self) -> usize {
        self.signal_count
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn column(&self, l: usize) -> &[(usize, f64)] {
        &self.columns[l]
    }

    /// Dense row `j` of length L.
    pub fn row(&self, j: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.signal_count];
        for (l, col) in self.columns.iter().enumerate() {
            if let Ok(pos) = col.binary_search_by_key(&j, |&(r, _)| r) {
                row[l] = col[pos].1;
            }
        }
        row
    }

    /// `{"entries": [[row, col, value], ...], "shape": [K, L], "S": s}`
    pub fn to_json_string(&self) -> String {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (l, col) in self.columns.iter().enumerate() {
            for &(row, value) in col {
                entries.push((row, l, value));
            }
        }
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let doc = CoefficientDoc {
            entries,
            shape: (self.atom_count, self.signal_count),
            s: self.sparsity,
        };
        serde_json::to_string_pretty(&doc).expect("coefficients serialize")
    }

    pub fn from_json_str(text: &str) -> Result<CoefficientMatrix> {
        let doc: CoefficientDoc = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("malformed coefficient JSON: {e}")))?;
        let (k, l) = doc.shape;
        let mut columns = vec![Vec::new(); l];
        for (row, col, value) in doc.entries {
            if col >= l {
                return Err(Error::invalid(format!("column index {col} out of range")));
            }
            columns[col].push((row, value));
        }
        for col in &mut columns {
            col.sort_by_key(|&(r, _)| r);
        }
        CoefficientMatrix::new(k, l, doc.s, columns)
    }
}

#[derive(Serialize, Deserialize)]
struct CoefficientDoc {
    entries: Vec<(usize, usize, f64)>,
    shape: (usize, usize),
    #[serde(rename = "S")]
    s: usize,
}

/// How often one atom is used and by which signal columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomUsage {
    pub atom: usize,
    pub count: usize,
    pub columns: Vec<usize>,
}

/// Per-atom usage (nonzero coefficients per row), sorted by descending
/// count, ties by atom index.
pub fn atom_usage(z: &CoefficientMatrix) -> Vec<AtomUsage> {
    let mut usage: Vec<AtomUsage> = (0..z.atom_count())
        .map(|atom| AtomUsage { atom, count: 0, columns: Vec::new() })
        .collect();
    for l in 0..z.signal_count() {
        for &(row, value) in z.column(l) {
            if value != 0.0 {
                usage[row].count += 1;
                usage[row].columns.push(l);
            }
        }
    }
    usage.sort_by(|a, b| b.count.cmp(&a.count).then(a.atom.cmp(&b.atom)));
    usage
}

/// Top `k` most-used atoms.
pub fn common_events(usage: &[AtomUsage], k: usize) -> &[AtomUsage] {
    &usage[..k.min(usage.len())]
}

/// Atoms used at least once and at most `max_count` times.
pub fn special_events(usage: &[AtomUsage], max_count: usize) -> Vec<&AtomUsage> {
    usage.iter().filter(|u| u.count >= 1 && u.count <= max_count).collect()
}

/// Frobenius objective `||X - D Z||_F^2`.
pub fn frobenius_objective(x: &SignalMatrix, d: &PieceDictionary, z: &CoefficientMatrix) -> f64 {
    let mut total = 0.0;
    let mut model = vec![0.0; x.node_count()];
    for l in 0..x.signal_count() {
        model.iter_mut().for_each(|v| *v = 0.0);
        for &(row, value) in z.column(l) {
            d.piece(row).add_scaled_to(&mut model, value);
        }
        total += x
            .column(l)
            .iter()
            .zip(&model)
            .map(|(xi, mi)| (xi - mi) * (xi - mi))
            .sum::<f64>();
    }
    total
}

/// Cholesky solve of the SPD system `G w = b`; `None` when a pivot is not
/// safely positive (rank-deficient support).
fn cholesky_solve(g: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 1e-12 {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * y[k];
        }
        y[i] = sum / l[i][i];
    }
    let mut w = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l[k][i] * w[k];
        }
        w[i] = sum / l[i][i];
    }
    Some(w)
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn sum_over(col: &[f64], nodes: &[usize]) -> f64 {
    nodes.iter().map(|&u| col[u]).sum()
}

fn code_column(col: &[f64], d: &PieceDictionary, s: usize) -> Vec<(usize, f64)> {
    let k = d.atom_count();
    let sizes: Vec<f64> = d.pieces().iter().map(|p| p.len() as f64).collect();
    let mut support: Vec<usize> = Vec::new();
    let mut coeffs: Vec<f64> = Vec::new();
    let mut banned = vec![false; k];
    let mut residual = col.to_vec();

    while support.len() < s {
        let norm = residual.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < OMP_RESIDUAL_EPS {
            break;
        }
        // Selection on l2-normalized atom copies: |<1_C / sqrt(|C|), r>|.
        let mut best: Option<(f64, usize)> = None;
        for j in 0..k {
            if banned[j] || support.contains(&j) {
                continue;
            }
            let corr = sum_over(&residual, d.piece(j).nodes()).abs() / sizes[j].sqrt();
            match best {
                Some((b, _)) if corr <= b => {}
                _ => best = Some((corr, j)),
            }
        }
        let Some((corr, j)) = best else { break };
        if corr == 0.0 {
            break;
        }
        support.push(j);

        // Least-squares refit on the raw (unnormalized) selected atoms.
        let gram: Vec<Vec<f64>> = support
            .iter()
            .map(|&a| {
                support
                    .iter()
                    .map(|&b| intersection_size(d.piece(a).nodes(), d.piece(b).nodes()) as f64)
                    .collect()
            })
            .collect();
        let rhs: Vec<f64> = support.iter().map(|&a| sum_over(col, d.piece(a).nodes())).collect();
        match cholesky_solve(&gram, &rhs) {
            Some(w) => coeffs = w,
            None => {
                // Rank-deficient with the newest atom; drop it and move on.
                log::debug!("omp: atom {j} made the support rank-deficient; dropped");
                support.pop();
                banned[j] = true;
                continue;
            }
        }
        residual.copy_from_slice(col);
        for (&a, &w) in support.iter().zip(&coeffs) {
            for &u in d.piece(a).nodes() {
                residual[u] -= w;
            }
        }
    }

    let mut entries: Vec<(usize, f64)> = support.into_iter().zip(coeffs).collect();
    entries.sort_by_key(|&(a, _)| a);
    entries
}

/// Orthogonal matching pursuit over every column of `x`.
///
/// After each column's refit the residual is orthogonal to the span of the
/// selected atoms. Columns whose coding would exceed `s` atoms never do;
/// a residual below `OMP_RESIDUAL_EPS` stops early.
pub fn omp_sparse_code(
    x: &SignalMatrix,
    d: &PieceDictionary,
    s: usize,
) -> Result<CoefficientMatrix> {
    if s == 0 {
        return Err(Error::invalid("sparsity must be at least 1"));
    }
    if d.pieces().iter().any(|p| p.nodes().last().map_or(false, |&u| u >= x.node_count())) {
        return Err(Error::invalid("dictionary atom references a node outside the signal matrix"));
    }
    let columns: Vec<Vec<(usize, f64)>> =
        (0..x.signal_count()).map(|l| code_column(x.column(l), d, s)).collect();
    CoefficientMatrix::new(d.atom_count(), x.signal_count(), s, columns)
}

/// Refits atom `j` against the residual of the others.
///
/// Builds the rank-one surrogate `x_j = R_j z_j / (z_j^T z_j)` with
/// `R_j = X - sum_{i != j} 1_{C_i} z_i^T`, localizes it with the unit
/// solver, and returns the new piece if the Frobenius objective does not
/// increase, the old piece otherwise. Errors if row `j` of `z` is zero.
pub fn update_atom(
    graph: &Graph,
    x: &SignalMatrix,
    z: &CoefficientMatrix,
    d: &PieceDictionary,
    j: usize,
    grid: &LambdaGrid,
) -> Result<Piece> {
    let z_j = z.row(j);
    let z_norm_sq: f64 = z_j.iter().map(|v| v * v).sum();
    if z_norm_sq <= DEAD_ROW_EPS {
        return Err(Error::invalid(format!("coefficient row {j} is zero; replace the atom instead")));
    }

    // x_j = (X z_j - sum_{i != j} (z_i . z_j) 1_{C_i}) / ||z_j||^2
    let n = x.node_count();
    let mut surrogate = vec![0.0; n];
    for l in 0..x.signal_count() {
        let w = z_j[l];
        if w != 0.0 {
            for (slot, &v) in surrogate.iter_mut().zip(x.column(l)) {
                *slot += w * v;
            }
        }
    }
    for i in 0..d.atom_count() {
        if i == j {
            continue;
        }
        let cross: f64 = z.row(i).iter().zip(&z_j).map(|(a, b)| a * b).sum();
        if cross != 0.0 {
            d.piece(i).add_scaled_to(&mut surrogate, -cross);
        }
    }
    for v in &mut surrogate {
        *v /= z_norm_sq;
    }

    let old_objective = frobenius_objective(x, d, z);
    let candidate = match crate::signal::GraphSignal::new(surrogate)
        .and_then(|sig| localize_unit(graph, &sig, grid))
    {
        Ok(res) => res.piece,
        Err(e) => {
            log::debug!("atom {j} update found no piece ({e}); keeping the old atom");
            return Ok(d.piece(j).clone());
        }
    };

    let mut pieces = d.pieces().to_vec();
    pieces[j] = candidate.clone();
    let updated = PieceDictionary { pieces };
    let new_objective = frobenius_objective(x, &updated, z);
    if new_objective <= old_objective {
        Ok(candidate)
    } else {
        Ok(d.piece(j).clone())
    }
}

#[derive(Debug, Clone)]
pub struct LearnOptions {
    pub outer_iters: usize,
    /// Relative objective change across one outer iteration below which the
    /// loop stops.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for LearnOptions {
    fn default() -> LearnOptions {
        LearnOptions { outer_iters: 30, rel_tol: 1e-5, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub dictionary: PieceDictionary,
    pub coefficients: CoefficientMatrix,
    /// `||X - D Z||_F^2` after every half-step (coding, then atom pass).
    pub objective_trace: Vec<f64>,
}

fn seed_atom_from_column(graph: &Graph, col: &[f64], grid: &LambdaGrid) -> Piece {
    let signal = crate::signal::GraphSignal::new(col.to_vec()).expect("matrix entries are finite");
    match localize_unknown(graph, &signal, grid) {
        Ok(fit) => Piece::new(fit.result.piece.nodes().to_vec()).expect("piece is nonempty"),
        Err(_) => {
            let node = col
                .iter()
                .enumerate()
                .max_by(|(i, a), (j, b)| a.abs().total_cmp(&b.abs()).then(j.cmp(i)))
                .map(|(i, _)| i)
                .unwrap_or(0);
            Piece::new(vec![node]).expect("singleton piece")
        }
    }
}

fn replace_dead_atom(
    graph: &Graph,
    x: &SignalMatrix,
    z: &CoefficientMatrix,
    d: &mut PieceDictionary,
    j: usize,
    grid: &LambdaGrid,
) {
    // Largest-residual-norm column seeds the replacement; with a zero
    // coefficient row the swap cannot change the objective.
    let n = x.node_count();
    let mut best: Option<(f64, usize)> = None;
    let mut model = vec![0.0; n];
    for l in 0..x.signal_count() {
        model.iter_mut().for_each(|v| *v = 0.0);
        for &(row, value) in z.column(l) {
            d.piece(row).add_scaled_to(&mut model, value);
        }
        let norm: f64 = x
            .column(l)
            .iter()
            .zip(&model)
            .map(|(xi, mi)| (xi - mi) * (xi - mi))
            .sum();
        match best {
            Some((b, _)) if norm <= b => {}
            _ => best = Some((norm, l)),
        }
    }
    let Some((_, l)) = best else { return };
    let residual: Vec<f64> = {
        model.iter_mut().for_each(|v| *v = 0.0);
        for &(row, value) in z.column(l) {
            d.piece(row).add_scaled_to(&mut model, value);
        }
        x.column(l).iter().zip(&model).map(|(xi, mi)| xi - mi).collect()
    };
    match crate::signal::GraphSignal::new(residual).and_then(|sig| localize_unit(graph, &sig, grid))
    {
        Ok(res) => {
            log::debug!("atom {j} unused; replaced from residual column {l}");
            d.pieces[j] = Piece::new(res.piece.nodes().to_vec()).expect("piece is nonempty");
        }
        Err(e) => log::debug!("atom {j} unused and replacement failed ({e}); kept as is"),
    }
}

/// Alternating dictionary learning: OMP coding then a full atom-update
/// pass, `outer_iters` times or until the objective settles. Deterministic
/// given `options.seed`.
pub fn learn_dictionary(
    graph: &Graph,
    x: &SignalMatrix,
    k: usize,
    s: usize,
    grid: &LambdaGrid,
    options: &LearnOptions,
) -> Result<LearnOutcome> {
    if x.node_count() != graph.node_count() {
        return Err(Error::invalid(format!(
            "signal matrix has {} rows but the graph has {} nodes",
            x.node_count(),
            graph.node_count()
        )));
    }
    if k == 0 {
        return Err(Error::invalid("atom count must be at least 1"));
    }
    if s == 0 {
        return Err(Error::invalid("sparsity must be at least 1"));
    }
    if x.signal_count() == 0 {
        return Err(Error::invalid("signal matrix must contain at least one column"));
    }
    if x.is_all_zero() {
        return Err(Error::invalid("signal matrix is identically zero"));
    }
    if options.outer_iters == 0 {
        return Err(Error::invalid("outer iteration count must be at least 1"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let l = x.signal_count();
    let chosen: Vec<usize> = if k <= l {
        let mut idx = sample(&mut rng, l, k).into_vec();
        idx.sort_unstable();
        idx
    } else {
        (0..k).map(|_| rng.gen_range(0..l)).collect()
    };
    let pieces: Vec<Piece> =
        chosen.iter().map(|&col| seed_atom_from_column(graph, x.column(col), grid)).collect();
    let mut dictionary = PieceDictionary::new(graph, pieces)?;

    let mut trace: Vec<f64> = Vec::new();
    let mut coefficients = None;
    let mut previous_end: Option<f64> = None;

    for _ in 0..options.outer_iters {
        let z = omp_sparse_code(x, &dictionary, s)?;
        trace.push(frobenius_objective(x, &dictionary, &z));

        for j in 0..k {
            let row_norm_sq: f64 = z.row(j).iter().map(|v| v * v).sum();
            if row_norm_sq <= DEAD_ROW_EPS {
                replace_dead_atom(graph, x, &z, &mut dictionary, j, grid);
            } else {
                let piece = update_atom(graph, x, &z, &dictionary, j, grid)?;
                dictionary.pieces[j] = piece;
            }
        }
        let end = frobenius_objective(x, &dictionary, &z);
        trace.push(end);
        coefficients = Some(z);

        if let Some(prev) = previous_end {
            let denom = prev.max(f64::MIN_POSITIVE);
            if ((prev - end) / denom).abs() < options.rel_tol {
                break;
            }
        }
        previous_end = Some(end);
    }

    Ok(LearnOutcome {
        dictionary,
        coefficients: coefficients.expect("at least one outer iteration ran"),
        objective_trace: trace,
    })
}
