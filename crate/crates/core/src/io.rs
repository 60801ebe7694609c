//! Text formats: edge lists and signal CSVs.
//!
//! Edge list: one edge per line as two whitespace-separated 0-based node
//! ids; `#` starts a comment line; an optional leading header `N <count>`
//! pins the node count, otherwise it is inferred as one past the largest
//! id. Signal CSV: header `node,sig0,sig1,...`, then one row per node
//! with its id and one value per signal.

use std::fs;
use std::path::Path;

use crate::dictlearn::SignalMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::signal::GraphSignal;

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut saw_content = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        let first = tokens.next().expect("non-empty line has a token");

        if first == "N" {
            if saw_content || declared.is_some() {
                return Err(Error::invalid(format!(
                    "line {lineno}: header must be the first content line"
                )));
            }
            let count = tokens
                .next()
                .ok_or_else(|| Error::invalid(format!("line {lineno}: header needs a count")))?
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("line {lineno}: bad node count")))?;
            if tokens.next().is_some() {
                return Err(Error::invalid(format!("line {lineno}: trailing tokens after header")));
            }
            declared = Some(count);
            continue;
        }

        saw_content = true;
        let u = first
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("line {lineno}: bad node id {first:?}")))?;
        let second = tokens
            .next()
            .ok_or_else(|| Error::invalid(format!("line {lineno}: edge needs two node ids")))?;
        let v = second
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("line {lineno}: bad node id {second:?}")))?;
        if tokens.next().is_some() {
            return Err(Error::invalid(format!("line {lineno}: more than two tokens on edge line")));
        }
        edges.push((u, v));
    }

    let node_count = match declared {
        Some(count) => count,
        None => {
            let max = edges
                .iter()
                .map(|&(u, v)| u.max(v))
                .max()
                .ok_or_else(|| Error::invalid("edge list has no edges and no header"))?;
            max + 1
        }
    };
    Graph::new(node_count, edges)
}

/// Always writes the `N` header so isolated trailing nodes survive a
/// round trip.
pub fn format_edge_list(graph: &Graph) -> String {
    let mut out = String::new();
    out.push_str(&format!("N {}\n", graph.node_count()));
    for &(u, v) in graph.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

pub fn write_edge_list(path: impl AsRef<Path>, graph: &Graph) -> Result<()> {
    fs::write(path, format_edge_list(graph))?;
    Ok(())
}

pub fn parse_signal_csv(text: &str) -> Result<SignalMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::invalid("signal CSV is empty"))?;
    let mut cols = header.trim().split(',');
    if cols.next().map(str::trim) != Some("node") {
        return Err(Error::invalid("signal CSV must start with a 'node,sig0,...' header"));
    }
    let signal_count = cols.count();
    if signal_count == 0 {
        return Err(Error::invalid("signal CSV header lists no signal columns"));
    }

    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let mut fields = raw.trim().split(',');
        let id_tok = fields.next().expect("non-empty line has a field");
        let node = id_tok
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("line {lineno}: bad node id {id_tok:?}")))?;
        let values = fields
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| {
                    Error::invalid(format!("line {lineno}: bad value {:?}", f.trim()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if values.len() != signal_count {
            return Err(Error::invalid(format!(
                "line {lineno}: expected {signal_count} values, got {}",
                values.len()
            )));
        }
        rows.push((node, values));
    }

    let node_count = rows.len();
    if node_count == 0 {
        return Err(Error::invalid("signal CSV has no data rows"));
    }
    // Rows may arrive in any order but must cover 0..N exactly once.
    let mut table: Vec<Option<Vec<f64>>> = vec![None; node_count];
    for (node, values) in rows {
        let slot = table.get_mut(node).ok_or_else(|| {
            Error::invalid(format!("node id {node} outside 0..{node_count}"))
        })?;
        if slot.is_some() {
            return Err(Error::invalid(format!("duplicate row for node {node}")));
        }
        *slot = Some(values);
    }
    let mut data = vec![0.0; node_count * signal_count];
    for (node, values) in table.into_iter().enumerate() {
        let values = values.expect("every slot filled once");
        for (l, v) in values.into_iter().enumerate() {
            data[l * node_count + node] = v;
        }
    }
    SignalMatrix::new(node_count, signal_count, data)
}

pub fn format_signal_csv(matrix: &SignalMatrix) -> String {
    let mut out = String::from("node");
    for l in 0..matrix.signal_count() {
        out.push_str(&format!(",sig{l}"));
    }
    out.push('\n');
    for node in 0..matrix.node_count() {
        out.push_str(&format!("{node}"));
        for l in 0..matrix.signal_count() {
            out.push_str(&format!(",{}", matrix.column(l)[node]));
        }
        out.push('\n');
    }
    out
}

/// Single-column CSV to one graph signal.
pub fn parse_single_signal_csv(text: &str) -> Result<GraphSignal> {
    let matrix = parse_signal_csv(text)?;
    if matrix.signal_count() != 1 {
        return Err(Error::invalid(format!(
            "expected one signal column, found {}",
            matrix.signal_count()
        )));
    }
    GraphSignal::new(matrix.column(0).to_vec())
}

pub fn format_single_signal_csv(signal: &GraphSignal) -> String {
    let matrix = SignalMatrix::new(signal.len(), 1, signal.values().to_vec())
        .expect("signal entries are finite");
    format_signal_csv(&matrix)
}

pub fn read_signal_csv(path: impl AsRef<Path>) -> Result<SignalMatrix> {
    parse_signal_csv(&fs::read_to_string(path)?)
}

pub fn write_signal_csv(path: impl AsRef<Path>, matrix: &SignalMatrix) -> Result<()> {
    fs::write(path, format_signal_csv(matrix))?;
    Ok(())
}

pub fn read_single_signal_csv(path: impl AsRef<Path>) -> Result<GraphSignal> {
    parse_single_signal_csv(&fs::read_to_string(path)?)
}

pub fn write_single_signal_csv(path: impl AsRef<Path>, signal: &GraphSignal) -> Result<()> {
    fs::write(path, format_single_signal_csv(signal))?;
    Ok(())
}
