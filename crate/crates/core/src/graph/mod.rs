//! Grid discretization of the movement segment and the fixed-hop shortest
//! path reformulation.
//!
//! Grid vertices are numbered `1..=N` with vertex `n` at `p_n = nD/N`; vertex
//! `N + 1` is the dummy terminal that every grid vertex links to. Vertex `i`
//! reaches `j` in one slot iff `|i − j| ≤ d_max`, self-loops included. Every
//! edge leaving `i` costs `W_i = −R(p_i)`, so a `(K + 1)`-hop path from the
//! start vertex to the terminal costs `−R(p_s) − Σ_{k=1..K} R(x[k])`.

pub mod oracle;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{achievable_rate, ChannelRealization, SystemParams, Trajectory, RATIO_SLACK};

pub use oracle::{brute_force_oracle, ORACLE_LIMIT};

/// Uniform grid of `N` centers on `(0, D]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    pub spacing_m: f64,
    /// `centers_m[n - 1]` is the center of vertex `n`.
    pub centers_m: Vec<f64>,
    /// Vertex nearest the start position, in `1..=N`.
    pub start_index: usize,
}

impl Grid {
    pub fn num_grids(&self) -> usize {
        self.centers_m.len()
    }

    /// Position of grid vertex `n` (1-based).
    pub fn center(&self, n: usize) -> f64 {
        self.centers_m[n - 1]
    }

    /// Nearest grid vertex to `x`, clamped to `1..=N`.
    pub fn snap_index(&self, x: f64) -> usize {
        let n = (x / self.spacing_m).round();
        (n.max(1.0) as usize).min(self.num_grids())
    }

    /// `p` with the start moved onto its grid center, i.e. the problem the
    /// graph actually solves.
    pub fn snapped_params(&self, p: &SystemParams) -> SystemParams {
        SystemParams {
            start_pos_m: self.center(self.start_index),
            ..*p
        }
    }

    /// Trajectory visiting the given grid vertices, `indices[0]` being x[0].
    pub fn trajectory_from_indices(&self, indices: &[usize], p: &SystemParams) -> Result<Trajectory> {
        if let Some(bad) = indices.iter().find(|&&n| n == 0 || n > self.num_grids()) {
            return Err(Error::InvalidGraph(format!(
                "vertex {bad} is not a grid vertex of 1..={}",
                self.num_grids()
            )));
        }
        let params = SystemParams {
            start_pos_m: indices.first().map_or(p.start_pos_m, |&n| self.center(n)),
            ..*p
        };
        let positions = indices.iter().map(|&n| self.center(n)).collect();
        Trajectory::new(positions, &params)
    }

    /// Snaps every position of `t` onto its nearest grid vertex.
    pub fn snap_trajectory(&self, t: &Trajectory) -> Vec<usize> {
        t.positions_m().iter().map(|&x| self.snap_index(x)).collect()
    }
}

/// Splits `[0, D]` into `N` cells with centers `p_n = nD/N` and snaps the
/// start position to the nearest center.
pub fn discretize(p: &SystemParams) -> Result<Grid> {
    p.validate()?;
    if p.num_grids < 2 {
        return Err(Error::InvalidParams(format!(
            "num_grids must be >= 2, got {}",
            p.num_grids
        )));
    }
    let n = p.num_grids;
    let d = p.region_length_m;
    let centers_m: Vec<f64> = (1..=n).map(|i| i as f64 * d / n as f64).collect();
    let spacing_m = d / n as f64;
    let start = ((p.start_pos_m / spacing_m).round().max(1.0) as usize).min(n);
    Ok(Grid {
        spacing_m,
        centers_m,
        start_index: start,
    })
}

/// Banded movement graph plus dummy terminal vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MovementGraph {
    d_max: usize,
    start_index: usize,
    vertex_weight: Vec<f64>,
}

impl MovementGraph {
    /// Graph over `weights.len()` grid vertices. Weights must be finite and
    /// non-positive.
    pub fn new(vertex_weight: Vec<f64>, d_max: usize, start_index: usize) -> Result<Self> {
        let n = vertex_weight.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no grid vertices".into()));
        }
        if d_max == 0 {
            return Err(Error::InvalidGraph("d_max must be >= 1".into()));
        }
        if !(1..=n).contains(&start_index) {
            return Err(Error::InvalidGraph(format!(
                "start vertex {start_index} outside 1..={n}"
            )));
        }
        if let Some(w) = vertex_weight.iter().find(|w| !(w.is_finite() && **w <= 0.0)) {
            return Err(Error::InvalidGraph(format!(
                "vertex weight {w} is not a finite non-positive number"
            )));
        }
        Ok(Self {
            d_max,
            start_index,
            vertex_weight,
        })
    }

    pub fn num_grids(&self) -> usize {
        self.vertex_weight.len()
    }

    /// Grid vertices plus the terminal.
    pub fn num_vertices(&self) -> usize {
        self.num_grids() + 1
    }

    pub fn terminal(&self) -> usize {
        self.num_grids() + 1
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn start_index(&self) -> usize {
        self.start_index
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weight
    }

    /// Weight `W_i` of every edge leaving vertex `i` (1-based).
    pub fn weight(&self, i: usize) -> f64 {
        self.vertex_weight[i - 1]
    }

    /// Directed edge test over the full vertex set `1..=N + 1`.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let n = self.num_grids();
        if !(1..=n).contains(&i) {
            return false;
        }
        j == n + 1 || ((1..=n).contains(&j) && i.abs_diff(j) <= self.d_max)
    }

    /// Sum of source weights along `vertices`, accumulated front to back.
    pub fn path_cost(&self, vertices: &[usize]) -> Result<f64> {
        let mut cost = 0.0;
        for w in vertices.windows(2) {
            if !self.has_edge(w[0], w[1]) {
                return Err(Error::InvalidGraph(format!("no edge ({}, {})", w[0], w[1])));
            }
            cost += self.weight(w[0]);
        }
        Ok(cost)
    }
}

/// d_max = ⌊v_max·τ / δ_s⌋, with a relative slack so exact integer ratios
/// survive rounding in the division.
pub fn reach_in_grid_steps(p: &SystemParams) -> usize {
    let ratio = p.grid_steps_per_slot();
    (ratio * (1.0 + RATIO_SLACK)).floor() as usize
}

/// Builds the movement graph with `W_i = −log₂(1 + P_t|h(p_i)|²/σ²)`.
pub fn build_graph(g: &Grid, ch: &ChannelRealization, p: &SystemParams) -> Result<MovementGraph> {
    let d_max = reach_in_grid_steps(p);
    if d_max < 1 {
        return Err(Error::ReachTooShort {
            ratio: p.grid_steps_per_slot(),
        });
    }
    let weights = g
        .centers_m
        .iter()
        .map(|&x| -achievable_rate(x, ch, p))
        .collect();
    MovementGraph::new(weights, d_max, g.start_index)
}

/// A path from the start vertex to the terminal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopPath {
    /// `hops + 1` vertices, first the start, last the terminal `N + 1`.
    pub vertices: Vec<usize>,
    pub total_cost: f64,
}

impl HopPath {
    pub fn hops(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// Minimum-cost path with exactly `hops` edges from the start vertex to the
/// terminal, by dynamic programming over hop layers.
///
/// Among equal-cost predecessors the smallest vertex index wins. Reading the
/// reconstructed path backwards, this picks the lexicographically smallest
/// optimal sequence. Runs in `O(hops · N · d_max)` time with `O(N)` values and
/// `O(hops · N)` predecessor entries.
pub fn fixed_hop_shortest_path(mg: &MovementGraph, hops: usize) -> Result<HopPath> {
    if hops == 0 {
        return Err(Error::InvalidGraph("hops must be >= 1".into()));
    }
    let n = mg.num_grids();
    let d = mg.d_max;
    let w = &mg.vertex_weight;
    let layers = hops - 1;

    let mut cost = vec![f64::INFINITY; n];
    cost[mg.start_index - 1] = 0.0;
    let mut next = vec![f64::INFINITY; n];
    let mut through = vec![0.0; n];
    let mut pred = vec![0u32; layers * n];

    for layer in pred.chunks_exact_mut(n) {
        for ((t, c), wi) in through.iter_mut().zip(&cost).zip(w) {
            *t = c + wi;
        }
        for (j, (value, back)) in next.iter_mut().zip(layer.iter_mut()).enumerate() {
            let lo = j.saturating_sub(d);
            let hi = (j + d).min(n - 1);
            let mut best = f64::INFINITY;
            let mut arg = lo;
            for (i, &t) in through[lo..=hi].iter().enumerate() {
                if t < best {
                    best = t;
                    arg = lo + i;
                }
            }
            *value = best;
            *back = arg as u32;
        }
        std::mem::swap(&mut cost, &mut next);
    }

    let mut best = f64::INFINITY;
    let mut last = 0;
    for (i, (c, wi)) in cost.iter().zip(w).enumerate() {
        let t = c + wi;
        if t < best {
            best = t;
            last = i;
        }
    }
    if !best.is_finite() {
        return Err(Error::NoFeasiblePath { hops });
    }

    let mut vertices = vec![0; hops + 1];
    vertices[hops] = n + 1;
    vertices[layers] = last + 1;
    for m in (0..layers).rev() {
        vertices[m] = pred[m * n + vertices[m + 1] - 1] as usize + 1;
    }
    debug_assert_eq!(vertices[0], mg.start_index);
    Ok(HopPath {
        vertices,
        total_cost: best,
    })
}

/// Drops the terminal vertex and maps grid vertices to their centers.
///
/// The trajectory starts at the grid center of the start vertex, so it is
/// built under [`Grid::snapped_params`].
pub fn path_to_trajectory(hp: &HopPath, g: &Grid, p: &SystemParams) -> Result<Trajectory> {
    let n = g.num_grids();
    let expected = p.num_slots + 2;
    if hp.vertices.len() != expected {
        return Err(Error::InvalidGraph(format!(
            "path has {} vertices, expected {expected} for K = {}",
            hp.vertices.len(),
            p.num_slots
        )));
    }
    if hp.vertices[0] != g.start_index || hp.vertices[expected - 1] != n + 1 {
        return Err(Error::InvalidGraph(format!(
            "path must run from vertex {} to terminal {}",
            g.start_index,
            n + 1
        )));
    }
    g.trajectory_from_indices(&hp.vertices[..expected - 1], p)
}

/// Everything produced by one graph solve.
#[derive(Debug, Clone)]
pub struct GraphSolution {
    pub grid: Grid,
    pub graph: MovementGraph,
    pub path: HopPath,
    pub trajectory: Trajectory,
}

impl GraphSolution {
    /// (P1) objective recovered from the path cost: −(cost − W_s)/K.
    pub fn average_rate(&self) -> f64 {
        let k = self.trajectory.num_slots() as f64;
        -(self.path.total_cost - self.graph.weight(self.grid.start_index)) / k
    }
}

/// Discretize, build the graph and solve the (K + 1)-hop problem.
pub fn solve_graph(ch: &ChannelRealization, p: &SystemParams) -> Result<GraphSolution> {
    let grid = discretize(p)?;
    let graph = build_graph(&grid, ch, p)?;
    solve_on(grid, graph, p)
}

/// Solves on an already built grid and graph.
pub fn solve_on(grid: Grid, graph: MovementGraph, p: &SystemParams) -> Result<GraphSolution> {
    let path = fixed_hop_shortest_path(&graph, p.num_slots + 1)?;
    let trajectory = path_to_trajectory(&path, &grid, p)?;
    Ok(GraphSolution {
        grid,
        graph,
        path,
        trajectory,
    })
}
