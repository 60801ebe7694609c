//! Single-source shortest paths with nonnegative edge weights.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Distances and predecessors from one source. `dist` is `f64::INFINITY`
/// for unreachable nodes; `pred` is `None` for the source and unreachable
/// nodes.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub source: usize,
    pub dist: Vec<f64>,
    pub pred: Vec<Option<usize>>,
}

impl ShortestPaths {
    /// Node sequence from `source` to `target`, or `None` if unreachable.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        debug_assert_eq!(path[0], self.source);
        Some(path)
    }
}

struct QueueEntry {
    dist: f64,
    node: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for QueueEntry {}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QueueEntry {
    // Reversed so the max-heap pops the smallest distance; node id breaks
    // ties for a deterministic pop order.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Weighted adjacency `(neighbor, weight)` per node, reusable across many
/// Dijkstra runs with the same weights.
pub(crate) fn weighted_adjacency(graph: &Graph, edge_weights: &[f64]) -> Result<Vec<Vec<(usize, f64)>>> {
    if edge_weights.len() != graph.edge_count() {
        return Err(Error::invalid(format!(
            "expected {} edge weights, got {}",
            graph.edge_count(),
            edge_weights.len()
        )));
    }
    for &w in edge_weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::BadEdgeWeight { value: w });
        }
    }
    let mut adj = vec![Vec::new(); graph.node_count()];
    for (&(u, v), &w) in graph.edges().iter().zip(edge_weights) {
        adj[u].push((v, w));
        adj[v].push((u, w));
    }
    Ok(adj)
}

pub(crate) fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> ShortestPaths {
    let n = adj.len();
    assert!(source < n, "source {source} out of range");
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![None; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(QueueEntry { dist: 0.0, node: source });
    while let Some(QueueEntry { dist: d, node: u }) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let next = d + w;
            // Strict improvement only: every predecessor was finalized
            // before its child, so the tree stays acyclic even across
            // zero-weight cycles. The pop order (distance, then node id)
            // and the fixed adjacency order make the tree deterministic.
            if next < dist[v] {
                dist[v] = next;
                pred[v] = Some(u);
                heap.push(QueueEntry { dist: next, node: v });
            }
        }
    }
    ShortestPaths { source, dist, pred }
}

/// Dijkstra from `source` with one nonnegative finite weight per edge of
/// `graph`, aligned with `graph.edges()`.
pub fn shortest_paths_from(graph: &Graph, source: usize, edge_weights: &[f64]) -> Result<ShortestPaths> {
    if source >= graph.node_count() {
        return Err(Error::NodeOutOfRange { node: source, node_count: graph.node_count() });
    }
    let adj = weighted_adjacency(graph, edge_weights)?;
    Ok(dijkstra(&adj, source))
}
