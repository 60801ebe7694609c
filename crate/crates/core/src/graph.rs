//! Undirected graph with contiguous node ids.
//!
//! Nodes are `0..node_count`. Edges are unweighted, deduplicated, and stored
//! with the smaller endpoint first; self-loops are rejected. A `Graph` is
//! immutable after construction and can be shared freely across threads.

use crate::error::{Error, Result};
use crate::piece::Piece;

#[derive(Debug, Clone)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Edges are normalized to `u < v` and
    /// deduplicated; self-loops and out-of-range endpoints are errors.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        let mut normalized: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= node_count {
                return Err(Error::NodeOutOfRange { node: a, node_count });
            }
            if b >= node_count {
                return Err(Error::NodeOutOfRange { node: b, node_count });
            }
            if a == b {
                return Err(Error::invalid(format!("self-loop at node {a}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        normalized.dedup();

        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { node_count, edges: normalized, adjacency })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges normalized to `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `u` in ascending order.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    fn check_mask(&self, mask: &[usize]) {
        for &u in mask {
            assert!(
                u < self.node_count,
                "mask node {u} out of range for graph with {} nodes",
                self.node_count
            );
        }
    }

    /// Connected components of the subgraph induced by `mask`.
    ///
    /// Component node lists are sorted ascending and components are ordered
    /// by their smallest contained node id. An empty mask yields an empty
    /// list. Panics if `mask` contains an out-of-range node.
    pub fn connected_components(&self, mask: &[usize]) -> Vec<Vec<usize>> {
        self.check_mask(mask);
        let mut in_mask = vec![false; self.node_count];
        for &u in mask {
            in_mask[u] = true;
        }
        let mut sorted: Vec<usize> = mask.to_vec();
        sorted.sort_unstable();
        sorted.dedup();

        let mut seen = vec![false; self.node_count];
        let mut components = Vec::new();
        for &start in &sorted {
            if seen[start] {
                continue;
            }
            let mut component = vec![start];
            seen[start] = true;
            let mut queue = std::collections::VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u) {
                    if in_mask[v] && !seen[v] {
                        seen[v] = true;
                        component.push(v);
                        queue.push_back(v);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    /// Largest connected component of `mask` as a unit-magnitude piece, or
    /// `None` for an empty mask. Size ties resolve to the component with the
    /// smallest contained node id.
    pub fn project_to_piece(&self, mask: &[usize]) -> Option<Piece> {
        let components = self.connected_components(mask);
        let mut best: Option<Vec<usize>> = None;
        for component in components {
            match &best {
                Some(b) if component.len() <= b.len() => {}
                _ => best = Some(component),
            }
        }
        best.map(|nodes| Piece::new(nodes).expect("component is nonempty"))
    }

    /// Number of boundary edges of `c`: edges with exactly one endpoint in
    /// `c`. Panics if `c` contains an out-of-range node.
    pub fn cut_count(&self, c: &[usize]) -> usize {
        self.check_mask(c);
        let mut in_c = vec![false; self.node_count];
        for &u in c {
            in_c[u] = true;
        }
        self.edges.iter().filter(|&&(u, v)| in_c[u] != in_c[v]).count()
    }

    /// Hop distances from `source`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<u32>> {
        assert!(source < self.node_count, "source {source} out of range");
        let mut dist = vec![None; self.node_count];
        dist[source] = Some(0);
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in self.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// True when the subgraph induced by `nodes` is connected and nonempty.
    pub fn induces_connected(&self, nodes: &[usize]) -> bool {
        if nodes.is_empty() {
            return false;
        }
        self.connected_components(nodes).len() == 1
    }
}
