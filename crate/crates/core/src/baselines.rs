//! Benchmark movement policies: nearest crest (myopic), best reachable
//! position (far-sighted) and a fixed antenna at the segment center.
//!
//! All three move on the same grid as the graph solver and at most `d_max`
//! grid steps per slot, so their trajectories lie inside the solver's
//! feasible set.

use serde::Serialize;

use crate::error::Result;
use crate::graph::{reach_in_grid_steps, Grid};
use crate::model::{power_gain, ChannelRealization, SystemParams, Trajectory};

/// Relative tolerance under which two grid gains count as equal.
pub const GAIN_TIE_RTOL: f64 = 1e-12;

fn gains_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= GAIN_TIE_RTOL * a.abs().max(b.abs())
}

/// |h(p_n)|² at every grid center, index `n - 1`.
pub fn grid_gains(g: &Grid, ch: &ChannelRealization, p: &SystemParams) -> Vec<f64> {
    g.centers_m
        .iter()
        .map(|&x| power_gain(x, ch, p.wavelength_m))
        .collect()
}

/// Grid vertices (1-based, ascending) at local maxima of the power gain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrestSet {
    pub indices: Vec<usize>,
}

/// Local maxima of the gain over the grid. A run of equal gains counts once,
/// at its middle vertex (left middle for even runs); boundary vertices only
/// compare against their single neighbor.
pub fn find_crests(g: &Grid, ch: &ChannelRealization, p: &SystemParams) -> CrestSet {
    crests_of(&grid_gains(g, ch, p))
}

pub(crate) fn crests_of(gains: &[f64]) -> CrestSet {
    let n = gains.len();
    let mut indices = Vec::new();
    let mut a = 0;
    while a < n {
        let mut b = a;
        while b + 1 < n && gains_equal(gains[b], gains[b + 1]) {
            b += 1;
        }
        let rises = a == 0 || gains[a - 1] < gains[a];
        let falls = b == n - 1 || gains[b + 1] < gains[b];
        if rises && falls {
            indices.push((a + b) / 2 + 1);
        }
        a = b + 1;
    }
    CrestSet { indices }
}

/// Vertices visited when moving from `from` to `to` at `d_max` grid steps
/// per slot and holding on arrival; `slots + 1` entries.
pub fn grid_walk(from: usize, to: usize, d_max: usize, slots: usize) -> Vec<usize> {
    let mut at = from;
    let mut out = Vec::with_capacity(slots + 1);
    out.push(at);
    for _ in 0..slots {
        let gap = at.abs_diff(to).min(d_max);
        at = if to >= at { at + gap } else { at - gap };
        out.push(at);
    }
    out
}

/// Closest element of `candidates` to `s`, ties to the smaller index.
fn nearest_index(s: usize, candidates: &[usize]) -> Option<usize> {
    candidates
        .iter()
        .copied()
        .min_by_key(|&c| (c.abs_diff(s), c))
}

/// Myopic scheme: full speed to the crest nearest the start, then hold.
pub fn myopic_trajectory(g: &Grid, ch: &ChannelRealization, p: &SystemParams) -> Result<Trajectory> {
    let crests = find_crests(g, ch, p);
    let target = myopic_target(g, &crests);
    let path = grid_walk(g.start_index, target, reach_in_grid_steps(p), p.num_slots);
    g.trajectory_from_indices(&path, p)
}

/// Destination vertex of the myopic scheme.
pub fn myopic_target(g: &Grid, crests: &CrestSet) -> usize {
    // A grid always has at least one crest: its global maximum.
    nearest_index(g.start_index, &crests.indices).unwrap_or(g.start_index)
}

/// Destination vertex of the far-sighted scheme: the highest-gain vertex
/// within `K · d_max` grid steps of the start. The start itself wins a tie,
/// otherwise the smaller index does.
pub fn farsighted_target(g: &Grid, gains: &[f64], p: &SystemParams) -> usize {
    let s = g.start_index;
    let reach = p.num_slots.saturating_mul(reach_in_grid_steps(p));
    let lo = s.saturating_sub(reach).max(1);
    let hi = s.saturating_add(reach).min(g.num_grids());
    let best = gains[lo - 1..hi].iter().copied().fold(f64::MIN, f64::max);
    let ties = |n: usize| gains_equal(gains[n - 1], best);
    if ties(s) {
        s
    } else {
        (lo..=hi).find(|&n| ties(n)).unwrap_or(s)
    }
}

/// Far-sighted scheme: full speed to the best reachable vertex, then hold.
pub fn farsighted_trajectory(g: &Grid, ch: &ChannelRealization, p: &SystemParams) -> Result<Trajectory> {
    let gains = grid_gains(g, ch, p);
    let target = farsighted_target(g, &gains, p);
    let path = grid_walk(g.start_index, target, reach_in_grid_steps(p), p.num_slots);
    g.trajectory_from_indices(&path, p)
}

/// Grid vertex nearest the middle of the segment.
pub fn fpa_index(g: &Grid, p: &SystemParams) -> usize {
    g.snap_index(p.region_length_m / 2.0)
}

/// Fixed antenna at the segment center for the whole block. The trajectory
/// starts at the center rather than at x₀.
pub fn fpa_trajectory(g: &Grid, p: &SystemParams) -> Result<Trajectory> {
    let c = fpa_index(g, p);
    g.trajectory_from_indices(&vec![c; p.num_slots + 1], p)
}
