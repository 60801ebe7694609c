//! A piece: a nonempty set of nodes with an attached magnitude.
//!
//! Node lists are kept sorted and deduplicated. Connectivity is a property
//! relative to a graph and is checked where pieces enter the system from
//! outside (files, dictionaries); pieces produced by the solvers are
//! connected by construction.

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    nodes: Vec<usize>,
    pub magnitude: f64,
}

impl Piece {
    /// Unit-magnitude piece over `nodes`. Sorts and deduplicates; errors on
    /// an empty node list.
    pub fn new(nodes: Vec<usize>) -> Result<Piece> {
        Piece::with_magnitude(nodes, 1.0)
    }

    pub fn with_magnitude(mut nodes: Vec<usize>, magnitude: f64) -> Result<Piece> {
        if nodes.is_empty() {
            return Err(Error::invalid("piece must contain at least one node"));
        }
        if !magnitude.is_finite() {
            return Err(Error::invalid(format!("piece magnitude must be finite, got {magnitude}")));
        }
        nodes.sort_unstable();
        nodes.dedup();
        Ok(Piece { nodes, magnitude })
    }

    /// Nodes in ascending order.
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    pub fn min_node(&self) -> usize {
        self.nodes[0]
    }

    /// 0/1 indicator vector of length `node_count`, ignoring the magnitude.
    pub fn indicator(&self, node_count: usize) -> Vec<f64> {
        let mut v = vec![0.0; node_count];
        for &u in &self.nodes {
            assert!(u < node_count, "piece node {u} out of range");
            v[u] = 1.0;
        }
        v
    }

    /// Adds `scale` times the indicator into `buffer`.
    pub fn add_scaled_to(&self, buffer: &mut [f64], scale: f64) {
        for &u in &self.nodes {
            buffer[u] += scale;
        }
    }

    /// Checks that every node is in range and the induced subgraph is
    /// connected.
    pub fn validate_on(&self, graph: &Graph) -> Result<()> {
        for &u in &self.nodes {
            if u >= graph.node_count() {
                return Err(Error::NodeOutOfRange { node: u, node_count: graph.node_count() });
            }
        }
        if !graph.induces_connected(&self.nodes) {
            return Err(Error::invalid(format!(
                "piece with {} nodes is not connected on the graph",
                self.nodes.len()
            )));
        }
        Ok(())
    }
}
