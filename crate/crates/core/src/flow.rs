//! Max-flow on small real-capacity networks and the bipartite transportation
//! network used by both the polyhedral membership oracle and the weight
//! decomposition.
//!
//! The bipartite network has a source, one left node per set `S_j` with
//! supply 1, one right node per coordinate `i` with capacity `sigma_i`, a
//! sink, and infinite-capacity edges `j -> i` for `i ∈ S_j`. By max-flow /
//! min-cut its value is `m + min(0, min_K (sigma(S_K) - |K|))`, where `S_K`
//! is the union of the sets indexed by `K`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::matrix::{iter_bits, SupportVector};

/// Absolute tolerance for comparing flow values.
pub const FLOW_TOL: f64 = 1e-9;

/// Residual capacities at or below this are treated as saturated.
const RESIDUAL_EPS: f64 = 1e-13;

#[derive(Clone, Debug)]
struct Edge {
    to: usize,
    cap: f64,
}

/// Dinic's algorithm over `f64` capacities. Infinite capacities are allowed.
#[derive(Clone, Debug)]
pub(crate) struct Dinic {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl Dinic {
    pub(crate) fn new(nodes: usize) -> Self {
        Self {
            adj: vec![Vec::new(); nodes],
            edges: Vec::new(),
            level: vec![0; nodes],
            next: vec![0; nodes],
        }
    }

    /// Adds `u -> v` and its reverse; returns the forward edge id.
    pub(crate) fn add_edge(&mut self, u: usize, v: usize, cap: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to: v, cap });
        self.edges.push(Edge { to: u, cap: 0.0 });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    /// Flow currently carried by a forward edge.
    pub(crate) fn flow(&self, id: usize) -> f64 {
        self.edges[id ^ 1].cap
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap, .. } = self.edges[e];
                if cap > RESIDUAL_EPS && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    queue.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64) -> f64 {
        if u == t {
            return pushed;
        }
        while self.next[u] < self.adj[u].len() {
            let e = self.adj[u][self.next[u]];
            let Edge { to, cap, .. } = self.edges[e];
            if cap > RESIDUAL_EPS && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0.0 {
                    self.edges[e].cap -= got;
                    self.edges[e ^ 1].cap += got;
                    return got;
                }
            }
            self.next[u] += 1;
        }
        0.0
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|n| *n = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= 0.0 || !f.is_finite() {
                    break;
                }
                total += f;
            }
        }
        total
    }

    /// Nodes reachable from `s` in the residual graph: the source side of a
    /// minimum cut once `max_flow` has run.
    pub(crate) fn residual_reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap, .. } = self.edges[e];
                if cap > RESIDUAL_EPS && !seen[to] {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
        seen
    }
}

/// Solution of a [`FlowNetwork`].
#[derive(Clone, Debug)]
pub struct FlowSolution {
    /// Total flow from the source.
    pub value: f64,
    /// `assignment[j][i]`: flow on the edge from set `j` to coordinate `i`.
    pub assignment: Vec<Vec<f64>>,
    /// Left nodes on the source side of a minimum cut.
    pub source_side: Vec<bool>,
}

/// The bipartite transportation network of a set family and a capacity
/// vector.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    sets: Vec<SupportVector>,
    capacities: Vec<f64>,
}

impl FlowNetwork {
    pub fn new(sets: Vec<SupportVector>, capacities: Vec<f64>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::EmptySubset);
        }
        let n = capacities.len();
        for s in &sets {
            if s.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.dim(),
                });
            }
        }
        if let Some(i) = capacities.iter().position(|c| c.is_nan() || *c < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "capacity of coordinate {} must be non-negative, got {}",
                i + 1,
                capacities[i]
            )));
        }
        Ok(Self { sets, capacities })
    }

    pub fn sets(&self) -> &[SupportVector] {
        &self.sets
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    /// Solves with unit supply on every left node, except that the left node
    /// `forced` (if any) gets infinite supply and so always sits on the source
    /// side of the minimum cut.
    pub fn solve_with(&self, forced: Option<usize>) -> FlowSolution {
        let m = self.sets.len();
        let n = self.capacities.len();
        let source = m + n;
        let sink = source + 1;
        let mut g = Dinic::new(m + n + 2);
        for j in 0..m {
            let supply = if forced == Some(j) {
                f64::INFINITY
            } else {
                1.0
            };
            g.add_edge(source, j, supply);
        }
        let mut set_edges = Vec::with_capacity(m);
        for (j, s) in self.sets.iter().enumerate() {
            let ids: Vec<(usize, usize)> = iter_bits(s.bits())
                .map(|i| (i, g.add_edge(j, m + i, f64::INFINITY)))
                .collect();
            set_edges.push(ids);
        }
        for (i, &c) in self.capacities.iter().enumerate() {
            g.add_edge(m + i, sink, c);
        }
        let value = g.max_flow(source, sink);
        let mut assignment = vec![vec![0.0; n]; m];
        for (j, ids) in set_edges.iter().enumerate() {
            for &(i, e) in ids {
                assignment[j][i] = g.flow(e);
            }
        }
        let reach = g.residual_reachable(source);
        FlowSolution {
            value,
            assignment,
            source_side: reach[..m].to_vec(),
        }
    }

    pub fn solve(&self) -> FlowSolution {
        self.solve_with(None)
    }

    /// True when every left node can ship its unit of supply.
    pub fn is_saturating(&self) -> bool {
        self.solve().value >= self.sets.len() as f64 - FLOW_TOL
    }

    /// `min over non-empty K of (sigma(S_K) - |K|)` together with a minimizing
    /// `K` (as 0-based set indices), computed with one forced cut per set.
    pub fn min_hall_slack(&self) -> (f64, Vec<usize>) {
        let m = self.sets.len();
        let mut best: Option<(f64, Vec<usize>)> = None;
        for j in 0..m {
            let sol = self.solve_with(Some(j));
            let k: Vec<usize> = (0..m).filter(|&l| sol.source_side[l]).collect();
            // Re-evaluate the cut exactly from the recovered subset.
            let slack = self.hall_slack_of(&k);
            let flow_slack = sol.value - m as f64;
            let slack = if (slack - flow_slack).abs() <= FLOW_TOL {
                slack
            } else {
                flow_slack
            };
            if best.as_ref().is_none_or(|(b, _)| slack < *b) {
                best = Some((slack, k));
            }
        }
        best.expect("at least one set")
    }

    /// `sigma(S_K) - |K|` for the given 0-based set indices.
    pub fn hall_slack_of(&self, k: &[usize]) -> f64 {
        let union = k.iter().fold(0u64, |acc, &j| acc | self.sets[j].bits());
        let mass: f64 = iter_bits(union).map(|i| self.capacities[i]).sum();
        mass - k.len() as f64
    }
}
