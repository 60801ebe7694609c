//! Exact binary labeling via minimum s-t cut.
//!
//! `min_st_cut` minimizes `sum_i u_i(t_i) + sum_{(i,j)} w_ij * [t_i != t_j]`
//! over binary labelings `t`. Each node is attached to the source with
//! capacity `u_i(0)` and to the sink with capacity `u_i(1)` (after
//! subtracting the per-node minimum, which keeps capacities nonnegative and
//! only shifts the cut value by a constant); every pairwise term becomes a
//! pair of opposed arcs of capacity `w_ij`. Nodes on the source side of the
//! minimum cut are labeled 1. The flow itself is computed with Dinic's
//! algorithm.

use crate::error::{Error, Result};

const RESIDUAL_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct MinCut {
    /// `labels[i]` is true when node `i` is labeled 1 (source side).
    pub labels: Vec<bool>,
    /// Value of the minimum cut: the minimized energy minus
    /// `sum_i min(u_i(0), u_i(1))`.
    pub cut_value: f64,
}

struct FlowNetwork {
    // Paired arcs: edge `e` and `e ^ 1` are mutual reverses.
    first: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> FlowNetwork {
        FlowNetwork { first: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn add_arc_pair(&mut self, u: usize, v: usize, cap_uv: f64, cap_vu: f64) {
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(cap_uv);
        self.first[u].push(id);
        self.to.push(u);
        self.cap.push(cap_vu);
        self.first[v].push(id + 1);
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1; self.first.len()];
        level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.first[u] {
                let v = self.to[e];
                if level[v] < 0 && self.cap[e] > RESIDUAL_EPS {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if level[t] < 0 {
            None
        } else {
            Some(level)
        }
    }

    fn dfs_push(
        &mut self,
        u: usize,
        t: usize,
        pushed: f64,
        level: &[i32],
        iter: &mut [usize],
    ) -> f64 {
        if u == t {
            return pushed;
        }
        while iter[u] < self.first[u].len() {
            let e = self.first[u][iter[u]];
            let v = self.to[e];
            if level[v] == level[u] + 1 && self.cap[e] > RESIDUAL_EPS {
                let amount = self.dfs_push(v, t, pushed.min(self.cap[e]), level, iter);
                if amount > RESIDUAL_EPS {
                    self.cap[e] -= amount;
                    self.cap[e ^ 1] += amount;
                    return amount;
                }
            }
            iter[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        while let Some(level) = self.bfs_levels(s, t) {
            let mut iter = vec![0usize; self.first.len()];
            loop {
                let pushed = self.dfs_push(s, t, f64::INFINITY, &level, &mut iter);
                if pushed <= RESIDUAL_EPS {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut reach = vec![false; self.first.len()];
        reach[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.first[u] {
                let v = self.to[e];
                if !reach[v] && self.cap[e] > RESIDUAL_EPS {
                    reach[v] = true;
                    queue.push_back(v);
                }
            }
        }
        reach
    }
}

/// Minimizes the labeling energy described in the module docs.
///
/// `terminal[i] = (u_i(0), u_i(1))` are the per-node label costs and
/// `pairwise` lists `(i, j, w_ij)` mismatch penalties. All costs must be
/// finite and nonnegative.
pub fn min_st_cut(
    node_count: usize,
    terminal: &[(f64, f64)],
    pairwise: &[(usize, usize, f64)],
) -> Result<MinCut> {
    if terminal.len() != node_count {
        return Err(Error::invalid(format!(
            "expected {node_count} terminal capacity pairs, got {}",
            terminal.len()
        )));
    }
    for &(a, b) in terminal {
        for v in [a, b] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::BadCapacity { value: v });
            }
        }
    }
    for &(u, v, w) in pairwise {
        if u >= node_count {
            return Err(Error::NodeOutOfRange { node: u, node_count });
        }
        if v >= node_count {
            return Err(Error::NodeOutOfRange { node: v, node_count });
        }
        if u == v {
            return Err(Error::invalid(format!("pairwise term with equal endpoints {u}")));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::BadCapacity { value: w });
        }
    }

    let source = node_count;
    let sink = node_count + 1;
    let mut net = FlowNetwork::new(node_count + 2);
    for (i, &(cost0, cost1)) in terminal.iter().enumerate() {
        let base = cost0.min(cost1);
        // Cutting source->i pays u_i(0) (label 0); cutting i->sink pays
        // u_i(1) (label 1). At most one of the reduced arcs is nonzero.
        net.add_arc_pair(source, i, cost0 - base, 0.0);
        net.add_arc_pair(i, sink, cost1 - base, 0.0);
    }
    for &(u, v, w) in pairwise {
        net.add_arc_pair(u, v, w, w);
    }

    let cut_value = net.max_flow(source, sink);
    let reach = net.source_side(source);
    Ok(MinCut { labels: reach[..node_count].to_vec(), cut_value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn energy(terminal: &[(f64, f64)], pairwise: &[(usize, usize, f64)], labels: &[bool]) -> f64 {
        let unary: f64 = terminal
            .iter()
            .zip(labels)
            .map(|(&(c0, c1), &t)| if t { c1 } else { c0 })
            .sum();
        let mismatch: f64 = pairwise
            .iter()
            .map(|&(u, v, w)| if labels[u] != labels[v] { w } else { 0.0 })
            .sum();
        unary + mismatch
    }

    fn brute_force_min(terminal: &[(f64, f64)], pairwise: &[(usize, usize, f64)]) -> f64 {
        let n = terminal.len();
        let mut best = f64::INFINITY;
        for bits in 0u32..(1 << n) {
            let labels: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            best = best.min(energy(terminal, pairwise, &labels));
        }
        best
    }

    #[test]
    fn single_node_picks_cheaper_label() {
        let cut = min_st_cut(1, &[(0.9, 0.1)], &[]).unwrap();
        assert_eq!(cut.labels, vec![true]);
        assert_abs_diff_eq!(cut.cut_value, 0.1 - 0.1, epsilon = 1e-12);
        let cut = min_st_cut(1, &[(0.1, 0.9)], &[]).unwrap();
        assert_eq!(cut.labels, vec![false]);
    }

    #[test]
    fn strong_pairwise_term_overrides_weak_preference() {
        // Node 0 strongly favors 1, node 1 weakly favors 0, tied by weight 10.
        let terminal = [(10.0, 0.1), (0.4, 0.6)];
        let pairwise = [(0, 1, 10.0)];
        let cut = min_st_cut(2, &terminal, &pairwise).unwrap();
        assert_eq!(cut.labels, vec![true, true]);
        let base: f64 = terminal.iter().map(|&(a, b)| a.min(b)).sum();
        assert_abs_diff_eq!(
            energy(&terminal, &pairwise, &cut.labels),
            cut.cut_value + base,
            epsilon = 1e-9
        );
    }

    #[test]
    fn rejects_bad_capacities() {
        assert!(matches!(min_st_cut(1, &[(-1.0, 0.0)], &[]), Err(Error::BadCapacity { .. })));
        assert!(matches!(
            min_st_cut(2, &[(0.0, 0.0); 2], &[(0, 1, f64::NAN)]),
            Err(Error::BadCapacity { .. })
        ));
        assert!(min_st_cut(2, &[(0.0, 0.0); 2], &[(0, 0, 1.0)]).is_err());
        assert!(min_st_cut(2, &[(0.0, 0.0); 2], &[(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..60 {
            let n = rng.gen_range(1..=8);
            let terminal: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0))).collect();
            let mut pairwise = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.4) {
                        pairwise.push((u, v, rng.gen_range(0.0..2.0)));
                    }
                }
            }
            let cut = min_st_cut(n, &terminal, &pairwise).unwrap();
            let achieved = energy(&terminal, &pairwise, &cut.labels);
            let optimal = brute_force_min(&terminal, &pairwise);
            assert_abs_diff_eq!(achieved, optimal, epsilon = 1e-9);
            let base: f64 = terminal.iter().map(|&(a, b)| a.min(b)).sum();
            assert_abs_diff_eq!(cut.cut_value, achieved - base, epsilon = 1e-9);
        }
    }
}
