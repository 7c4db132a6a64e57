//! Shared fixtures for the solver benchmarks.

use matraj_core::montecarlo::draw_realization;
use matraj_core::{ChannelModelConfig, ChannelRealization, SystemParams};

/// Default parameters with `k` slots, `n` grids and reach `d_max` grid steps
/// per slot, plus a reproducible four-path channel.
pub fn fixture(k: usize, n: usize, d_max: usize) -> (SystemParams, ChannelRealization) {
    let mut p = SystemParams::defaults();
    p.num_slots = k;
    p.num_grids = n;
    p.v_max_mps = d_max as f64 * p.grid_spacing_m() / p.slot_s;
    let cfg = ChannelModelConfig::defaults(4, p.wavelength_m);
    let (start, ch) = draw_realization(2024, 0, &p, &cfg, true).expect("valid fixture");
    p.start_pos_m = start;
    (p, ch)
}
