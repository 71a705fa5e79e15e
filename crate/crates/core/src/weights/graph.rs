//! Redistribution along the intersection graph of the sets.
//!
//! The decomposition is built by induction on the number of sets. With
//! `sigma_1..sigma_{t-1}` valid for the first `t - 1` sets and `sigma_t = 0`,
//! mass flows towards `t` along shortest paths of the intersection graph:
//! every vertex passes on at most its excess over 1, taken from the
//! coordinates it shares with the next vertex of the path. An edge is cut once
//! a vertex has no mass left on the coordinates it shares with vertices closer
//! to `t`, and distances are recomputed. Finally the mass each earlier part
//! holds outside its own set is moved to `sigma_t`.
//!
//! Vertices at equal distance are visited in increasing index order, paths in
//! lexicographic order, and each transfer drains the shared coordinates in
//! increasing index order. If one pass over the graph leaves `sigma_t` short
//! of unit mass, the pass is repeated on a freshly built graph while it keeps
//! moving mass, up to `m · |E| · n` passes.

use crate::error::{Error, Result};
use crate::matrix::{iter_bits, SupportVector};
use crate::registry::Named;

use super::hall::check_hall_condition;
use super::{Decomposer, Decomposition, WeightInstance, BOUND_TOL, SUM_TOL};

/// Shared mass at or below this triggers an edge cut.
pub const CUT_TOL: f64 = 1e-12;

/// Transfers at or below this are skipped as rounding noise.
const MOVE_EPS: f64 = 1e-14;

/// Graph on the sets with an edge wherever two sets intersect, and the BFS
/// distance of every vertex to a target vertex.
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    sets: Vec<SupportVector>,
    adj: Vec<u64>,
    target: usize,
    dist: Vec<Option<usize>>,
}

impl IntersectionGraph {
    pub fn new(sets: &[SupportVector], target: usize) -> Self {
        assert!(target < sets.len() && sets.len() <= 64);
        let k = sets.len();
        let adj = (0..k)
            .map(|a| {
                (0..k)
                    .filter(|&b| b != a && sets[a].intersects(&sets[b]))
                    .fold(0u64, |acc, b| acc | 1 << b)
            })
            .collect();
        let mut g = Self {
            sets: sets.to_vec(),
            adj,
            target,
            dist: Vec::new(),
        };
        g.recompute();
        g
    }

    fn recompute(&mut self) {
        let mut dist = vec![None; self.sets.len()];
        dist[self.target] = Some(0);
        let mut frontier = 1u64 << self.target;
        let mut seen = frontier;
        let mut d = 0;
        while frontier != 0 {
            d += 1;
            let next = iter_bits(frontier).fold(0u64, |acc, v| acc | self.adj[v]) & !seen;
            for v in iter_bits(next) {
                dist[v] = Some(d);
            }
            seen |= next;
            frontier = next;
        }
        self.dist = dist;
    }

    pub fn vertex_count(&self) -> usize {
        self.sets.len()
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.sets.len())
            .flat_map(|a| {
                iter_bits(self.adj[a])
                    .filter(move |&b| b > a)
                    .map(move |b| (a, b))
            })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj
            .iter()
            .map(|a| a.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// Distance to the target, `None` when disconnected.
    pub fn distance(&self, v: usize) -> Option<usize> {
        self.dist[v]
    }

    pub fn distances(&self) -> &[Option<usize>] {
        &self.dist
    }

    pub fn max_finite_distance(&self) -> usize {
        self.dist.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Removes the edge `{a, b}` and recomputes distances.
    pub fn cut(&mut self, a: usize, b: usize) {
        self.adj[a] &= !(1 << b);
        self.adj[b] &= !(1 << a);
        self.recompute();
    }

    /// `S_{v,<}`: coordinates of `S_v` lying in some `S_l` with
    /// `d(l) = d(v) - 1`, as a bitmask.
    pub fn closer_coordinates(&self, v: usize) -> u64 {
        let Some(d) = self.dist[v].filter(|&d| d > 0) else {
            return 0;
        };
        let closer = (0..self.sets.len())
            .filter(|&l| self.dist[l] == Some(d - 1))
            .fold(0u64, |acc, l| acc | self.sets[l].bits());
        closer & self.sets[v].bits()
    }

    /// All shortest paths from `v` to the target, each listing its vertices
    /// from `v` to the target, in lexicographic order.
    pub fn shortest_paths(&self, v: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        if self.dist[v].is_some() {
            let mut path = vec![v];
            self.extend_paths(&mut path, &mut out);
        }
        out
    }

    fn extend_paths(&self, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let v = *path.last().expect("non-empty path");
        let d = self.dist[v].expect("reachable");
        if d == 0 {
            out.push(path.clone());
            return;
        }
        for u in iter_bits(self.adj[v]) {
            if self.dist[u] == Some(d - 1) {
                path.push(u);
                self.extend_paths(path, out);
                path.pop();
            }
        }
    }
}

/// Counters from one induction level.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelStats {
    /// Passes over the graph.
    pub rounds: usize,
    pub cuts: usize,
    pub transfers: usize,
}

#[derive(Clone, Debug)]
pub struct GraphDecomposer {
    /// Re-checks `Σ_j sigma_j = sigma` after every transfer.
    pub check_conservation: bool,
}

impl Default for GraphDecomposer {
    fn default() -> Self {
        Self {
            check_conservation: cfg!(debug_assertions),
        }
    }
}

impl Named for GraphDecomposer {
    fn name(&self) -> &'static str {
        "graph"
    }
}

impl Decomposer for GraphDecomposer {
    fn decompose_non_strict(&self, inst: &WeightInstance) -> Result<Decomposition> {
        Ok(self.decompose_with_stats(inst)?.0)
    }
}

struct Level<'a> {
    inst: &'a WeightInstance,
    parts: &'a mut [Vec<f64>],
    target: usize,
    check: bool,
    stats: LevelStats,
}

impl GraphDecomposer {
    pub fn decompose_with_stats(
        &self,
        inst: &WeightInstance,
    ) -> Result<(Decomposition, Vec<LevelStats>)> {
        let mut parts = vec![vec![0.0; inst.n()]; inst.m()];
        parts[0] = inst.sigma().to_vec();
        let mut stats = Vec::with_capacity(inst.m().saturating_sub(1));
        for t in 1..inst.m() {
            stats.push(self.run_level(inst, &mut parts, t)?);
        }
        Ok((Decomposition { parts }, stats))
    }

    /// One induction step: given parts valid for the sets before `target`
    /// (and `parts[target]` holding no mass on their sets), redistributes so
    /// that `target` also meets its bound.
    pub fn run_level(
        &self,
        inst: &WeightInstance,
        parts: &mut [Vec<f64>],
        target: usize,
    ) -> Result<LevelStats> {
        let mut level = Level {
            inst,
            parts,
            target,
            check: self.check_conservation,
            stats: LevelStats::default(),
        };
        let edges = IntersectionGraph::new(&inst.sets()[..=target], target).edge_count();
        let max_rounds = (inst.m() * edges * inst.n()).max(1);
        loop {
            level.sweep()?;
            if level.target_mass() >= 1.0 - BOUND_TOL {
                return Ok(level.stats);
            }
            if level.stats.rounds >= max_rounds {
                return Err(Error::Internal(format!(
                    "graph redistribution exceeded {max_rounds} rounds at set {}",
                    target + 1
                )));
            }
            level.stats.rounds += 1;
            if level.pass()? <= 0.0 {
                level.sweep()?;
                if level.target_mass() >= 1.0 - BOUND_TOL {
                    return Ok(level.stats);
                }
                let prefix = WeightInstance::from_supports(
                    inst.sets()[..=target].to_vec(),
                    inst.sigma().to_vec(),
                    false,
                )?;
                let hall = check_hall_condition(&prefix)?;
                return Err(if hall.feasible {
                    Error::Internal(format!(
                        "graph redistribution stalled at set {} with mass {}",
                        target + 1,
                        level.target_mass()
                    ))
                } else {
                    hall.into_error()
                });
            }
        }
    }
}

impl Level<'_> {
    fn sets(&self) -> &[SupportVector] {
        &self.inst.sets()[..=self.target]
    }

    fn target_mass(&self) -> f64 {
        self.sets()[self.target].dot(&self.parts[self.target])
    }

    fn own_mass(&self, v: usize) -> f64 {
        self.sets()[v].dot(&self.parts[v])
    }

    /// Moves `min(excess over 1, mass on S_from ∩ S_to)` from `from` to `to`.
    fn transfer(&mut self, from: usize, to: usize) -> Result<f64> {
        let shared = self.sets()[from].bits() & self.sets()[to].bits();
        let available: f64 = iter_bits(shared).map(|i| self.parts[from][i]).sum();
        let amount = (self.own_mass(from) - 1.0).min(available);
        if amount <= MOVE_EPS {
            return Ok(0.0);
        }
        let mut remaining = amount;
        for i in iter_bits(shared) {
            let take = remaining.min(self.parts[from][i]);
            self.parts[from][i] -= take;
            self.parts[to][i] += take;
            remaining -= take;
            if remaining <= 0.0 {
                break;
            }
        }
        self.stats.transfers += 1;
        self.check_conservation()?;
        Ok(amount - remaining.max(0.0))
    }

    /// Moves mass held by earlier parts outside their own sets to the target.
    fn sweep(&mut self) -> Result<()> {
        for j in 0..self.target {
            let own = self.sets()[j].bits();
            for i in 0..self.inst.n() {
                if own >> i & 1 == 0 && self.parts[j][i] != 0.0 {
                    self.parts[self.target][i] += self.parts[j][i];
                    self.parts[j][i] = 0.0;
                }
            }
        }
        self.check_conservation()
    }

    fn check_conservation(&self) -> Result<()> {
        if !self.check {
            return Ok(());
        }
        for (i, &s) in self.inst.sigma().iter().enumerate() {
            let total: f64 = self.parts.iter().map(|p| p[i]).sum();
            let error = (total - s).abs();
            if error.is_nan() || error > SUM_TOL {
                return Err(Error::Internal(format!(
                    "mass not conserved at coordinate {}: {} != {}",
                    i + 1,
                    total,
                    s
                )));
            }
        }
        Ok(())
    }

    /// One pass over a fresh graph; returns the total mass moved.
    fn pass(&mut self) -> Result<f64> {
        let mut g = IntersectionGraph::new(self.sets(), self.target);
        let mut moved = 0.0;
        let mut alpha = 1;
        let mut done = 0u64;
        loop {
            if alpha > g.max_finite_distance() {
                return Ok(moved);
            }
            let next =
                (0..self.target).find(|&v| g.distance(v) == Some(alpha) && done >> v & 1 == 0);
            let Some(j) = next else {
                alpha += 1;
                done = 0;
                continue;
            };
            let mut restarted = false;
            'paths: for path in g.shortest_paths(j) {
                for w in path.windows(2) {
                    moved += self.transfer(w[0], w[1])?;
                }
                for b in (0..alpha).rev() {
                    let h = path[b];
                    let shared: f64 = iter_bits(g.closer_coordinates(h))
                        .map(|i| self.parts[h][i])
                        .sum();
                    if shared <= CUT_TOL {
                        g.cut(h, path[b + 1]);
                        self.stats.cuts += 1;
                        restarted = true;
                        break 'paths;
                    }
                }
            }
            if !restarted {
                done |= 1 << j;
            }
        }
    }
}
