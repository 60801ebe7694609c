//! Synthetic graphs, pieces, and signals for experiments.
//!
//! Everything here is deterministic given a seed; the generator is a
//! counter-based stream cipher whose output is stable across platforms,
//! so a (seed, parameters) pair names the same instance everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::piece::Piece;
use crate::signal::{model_signal, GraphSignal};

/// A random geometric graph restricted to its largest connected component.
#[derive(Debug, Clone)]
pub struct GeometricGraph {
    pub graph: Graph,
    /// Unit-square position of each (relabeled) node.
    pub positions: Vec<(f64, f64)>,
    /// Original index of each relabeled node, strictly increasing, so the
    /// relabeling preserves sampling order.
    pub kept: Vec<usize>,
}

/// Samples `n` points uniformly in the unit square, connects pairs within
/// `radius`, and keeps the largest connected component with an
/// order-preserving relabeling.
///
/// Errors when the surviving component has fewer than `min(n, 10)` nodes;
/// such an instance is too fragmented to be useful.
pub fn gen_geometric_graph(n: usize, radius: f64, seed: u64) -> Result<GeometricGraph> {
    if n == 0 {
        return Err(Error::invalid("geometric graph needs at least one node"));
    }
    if !radius.is_finite() || radius < 0.0 {
        return Err(Error::invalid(format!("radius must be nonnegative, got {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();

    let r_sq = radius * radius;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            if dx * dx + dy * dy <= r_sq {
                edges.push((i, j));
            }
        }
    }
    let full = Graph::new(n, edges.iter().copied())?;

    let all_nodes: Vec<usize> = (0..n).collect();
    let components = full.connected_components(&all_nodes);
    let largest = components
        .iter()
        .fold(&components[0], |best, c| if c.len() > best.len() { c } else { best });
    let need = n.min(10);
    if largest.len() < need {
        return Err(Error::invalid(format!(
            "geometric graph (n = {n}, radius = {radius}) kept only {} of the {need} required nodes",
            largest.len()
        )));
    }

    let mut new_id = vec![usize::MAX; n];
    for (new, &old) in largest.iter().enumerate() {
        new_id[old] = new;
    }
    let kept_edges = edges
        .into_iter()
        .filter(|&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
        .map(|(u, v)| (new_id[u], new_id[v]));
    let graph = Graph::new(largest.len(), kept_edges)?;
    let positions = largest.iter().map(|&old| points[old]).collect();
    Ok(GeometricGraph { graph, positions, kept: largest.clone() })
}

/// All nodes within `hops` of `center` (always contains the center).
pub fn gen_ball_piece(graph: &Graph, center: usize, hops: u32) -> Result<Piece> {
    if center >= graph.node_count() {
        return Err(Error::NodeOutOfRange { node: center, node_count: graph.node_count() });
    }
    let dist = graph.bfs_distances(center);
    let nodes: Vec<usize> = (0..graph.node_count())
        .filter(|&v| dist[v].map_or(false, |d| d <= hops))
        .collect();
    Piece::new(nodes)
}

/// A shortest path from `s` to `t` by hop count.
///
/// Ties resolve by walking back from `t` through the smallest-index
/// predecessor at each step, so the node set is deterministic. A path has
/// two distinct endpoints, so `s == t` is rejected.
pub fn gen_path_piece(graph: &Graph, s: usize, t: usize) -> Result<Piece> {
    let n = graph.node_count();
    if s >= n {
        return Err(Error::NodeOutOfRange { node: s, node_count: n });
    }
    if t >= n {
        return Err(Error::NodeOutOfRange { node: t, node_count: n });
    }
    if s == t {
        return Err(Error::invalid("a path needs two distinct endpoints"));
    }
    let dist = graph.bfs_distances(s);
    if dist[t].is_none() {
        return Err(Error::Disconnected { s, t });
    }
    let mut nodes = vec![t];
    let mut current = t;
    while current != s {
        let d = dist[current].expect("every node on the walk is reachable");
        let pred = graph
            .neighbors(current)
            .iter()
            .copied()
            .find(|&u| dist[u] == Some(d - 1))
            .expect("a node at distance d has a neighbor at distance d - 1");
        nodes.push(pred);
        current = pred;
    }
    Piece::new(nodes)
}

/// Additive white Gaussian noise: variance `sigma2` per node, drawn from
/// the stream named by `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    sigma2: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn gaussian(sigma2: f64, seed: u64) -> Result<NoiseSpec> {
        if !sigma2.is_finite() || sigma2 < 0.0 {
            return Err(Error::invalid(format!(
                "noise variance must be nonnegative, got {sigma2}"
            )));
        }
        Ok(NoiseSpec { sigma2, seed })
    }

    pub fn noiseless() -> NoiseSpec {
        NoiseSpec { sigma2: 0.0, seed: 0 }
    }

    /// Same variance, different stream; trial harnesses derive per-trial
    /// specs this way.
    pub fn with_seed(&self, seed: u64) -> NoiseSpec {
        NoiseSpec { seed, ..*self }
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Piecewise-constant model plus noise, drawn with the provided generator.
///
/// Noise is sampled one draw per node in node order; a zero-variance spec
/// returns the model exactly and consumes no randomness.
pub fn gen_signal_with<R: Rng + ?Sized>(
    node_count: usize,
    pieces: &[Piece],
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<GraphSignal> {
    for piece in pieces {
        if let Some(&max) = piece.nodes().last() {
            if max >= node_count {
                return Err(Error::NodeOutOfRange { node: max, node_count });
            }
        }
    }
    let mut values = model_signal(node_count, pieces);
    if noise.sigma2 > 0.0 {
        let sigma = noise.sigma();
        for v in &mut values {
            let draw: f64 = rng.sample(StandardNormal);
            *v += sigma * draw;
        }
    }
    GraphSignal::new(values)
}

/// Piecewise-constant model plus the noise stream named by `noise.seed`.
pub fn gen_signal(node_count: usize, pieces: &[Piece], noise: &NoiseSpec) -> Result<GraphSignal> {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    gen_signal_with(node_count, pieces, noise, &mut rng)
}

/// Ball of radius `hops` around a uniformly chosen center.
pub fn sample_ball<R: Rng + ?Sized>(graph: &Graph, hops: u32, rng: &mut R) -> Piece {
    let center = rng.gen_range(0..graph.node_count());
    gen_ball_piece(graph, center, hops).expect("center is in range")
}

/// Shortest path between random endpoints, retried until its node count
/// lands in `[min_nodes, max_nodes]`.
pub fn sample_path_in_band<R: Rng + ?Sized>(
    graph: &Graph,
    min_nodes: usize,
    max_nodes: usize,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Piece> {
    if min_nodes == 0 || max_nodes < min_nodes {
        return Err(Error::invalid(format!(
            "path band [{min_nodes}, {max_nodes}] is empty"
        )));
    }
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::invalid("path sampling needs at least two nodes"));
    }
    for _ in 0..max_attempts {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        if s == t {
            continue;
        }
        let Ok(piece) = gen_path_piece(graph, s, t) else { continue };
        if (min_nodes..=max_nodes).contains(&piece.len()) {
            return Ok(piece);
        }
    }
    Err(Error::invalid(format!(
        "no path with {min_nodes}..={max_nodes} nodes found in {max_attempts} attempts"
    )))
}

/// `count` balls of radius `hops` whose centers sit at least
/// `min_center_separation` hops apart; the balls themselves must come out
/// node-disjoint or the draw is retried.
pub fn sample_disjoint_balls<R: Rng + ?Sized>(
    graph: &Graph,
    count: usize,
    hops: u32,
    min_center_separation: u32,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Vec<Piece>> {
    if count == 0 {
        return Err(Error::invalid("ball count must be at least 1"));
    }
    let n = graph.node_count();
    'attempt: for _ in 0..max_attempts {
        let mut distance_maps: Vec<Vec<Option<u32>>> = Vec::with_capacity(count);
        for _ in 0..count {
            let candidates: Vec<usize> = (0..n)
                .filter(|&v| {
                    distance_maps
                        .iter()
                        .all(|dm| dm[v].map_or(true, |d| d >= min_center_separation))
                })
                .collect();
            if candidates.is_empty() {
                continue 'attempt;
            }
            let center = candidates[rng.gen_range(0..candidates.len())];
            distance_maps.push(graph.bfs_distances(center));
        }
        let pieces: Vec<Piece> = distance_maps
            .iter()
            .map(|dist| {
                let nodes: Vec<usize> =
                    (0..n).filter(|&v| dist[v].map_or(false, |d| d <= hops)).collect();
                Piece::new(nodes).expect("ball contains its center")
            })
            .collect();
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                if pieces[i].nodes().iter().any(|&u| pieces[j].contains(u)) {
                    continue 'attempt;
                }
            }
        }
        return Ok(pieces);
    }
    Err(Error::invalid(format!(
        "could not place {count} disjoint balls (hops = {hops}, separation = \
         {min_center_separation}) in {max_attempts} attempts"
    )))
}
