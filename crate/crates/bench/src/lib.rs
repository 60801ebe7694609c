//! Shared fixtures for the solver benchmarks.

use pcgraph::synth::{gen_geometric_graph, gen_signal_with, sample_ball, sample_disjoint_balls};
use pcgraph::{Graph, GraphSignal, NoiseSpec, Piece};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A planted localization instance on a random geometric graph.
pub struct Instance {
    pub graph: Graph,
    pub signal: GraphSignal,
    pub truth: Piece,
}

/// Builds a geometric graph with one noisy planted ball.
pub fn ball_instance(nodes: usize, radius: f64, hops: u32, sigma2: f64, seed: u64) -> Instance {
    let geo = gen_geometric_graph(nodes, radius, seed).expect("geometric graph");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let truth = sample_ball(&geo.graph, hops, &mut rng);
    let noise = NoiseSpec::gaussian(sigma2, 0).expect("noise spec");
    let signal = gen_signal_with(geo.graph.node_count(), &[truth.clone()], &noise, &mut rng)
        .expect("signal");
    Instance { graph: geo.graph, signal, truth }
}

/// Builds a signal holding `k` disjoint noisy balls for decomposition runs.
pub fn multi_ball_instance(nodes: usize, radius: f64, k: usize, seed: u64) -> Instance {
    let geo = gen_geometric_graph(nodes, radius, seed).expect("geometric graph");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdead_beef);
    let mut pieces = sample_disjoint_balls(&geo.graph, k, 2, 5, &mut rng, 400).expect("balls");
    for (i, piece) in pieces.iter_mut().enumerate() {
        piece.magnitude = 1.0 + i as f64 * 0.5;
    }
    let noise = NoiseSpec::gaussian(0.02, 0).expect("noise spec");
    let signal = gen_signal_with(geo.graph.node_count(), &pieces, &noise, &mut rng)
        .expect("signal");
    let truth = pieces.into_iter().next().expect("at least one piece");
    Instance { graph: geo.graph, signal, truth }
}
