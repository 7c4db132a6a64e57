//! Random channel generation, the average-rate objective, and Monte-Carlo
//! sweeps comparing the graph solver against the benchmark policies.
//!
//! Every realization `r` draws from its own ChaCha stream `r` under the sweep
//! seed, so all schemes and all sweep values at the same realization index
//! see the same start position and the same channel paths (common random
//! numbers). Realizations run in parallel, then results are reduced in index
//! order, so a sweep is bit-for-bit reproducible.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{farsighted_trajectory, fpa_trajectory, grid_gains, myopic_trajectory};
use crate::error::{Error, Result};
use crate::graph::{build_graph, discretize, reach_in_grid_steps, solve_on, GraphSolution, Grid};
use crate::model::{check_motion, rate_from_gain, ChannelRealization, SystemParams, Trajectory};
use crate::twopath::{solve_twopath, twopath_target, TwoPathTarget};

/// How per-path complex coefficients are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffModel {
    /// Circularly-symmetric complex Gaussian with variance g₀/L.
    ComplexGaussian,
    /// Fixed magnitude √(g₀/L) with a uniform random phase.
    UniformPhase,
}

/// Statistical channel model used by [`sample_channel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModelConfig {
    pub num_paths: usize,
    pub link_distance_m: f64,
    pub pathloss_exponent: f64,
    /// Power gain β₀ at 1 m.
    pub reference_gain: f64,
    pub coeff_model: CoeffModel,
}

impl ChannelModelConfig {
    /// 100 m link, path-loss exponent 2.8 and free-space reference gain
    /// (λ/4π)² at 1 m.
    pub fn defaults(num_paths: usize, wavelength_m: f64) -> Self {
        Self {
            num_paths,
            link_distance_m: 100.0,
            pathloss_exponent: 2.8,
            reference_gain: (wavelength_m / (4.0 * PI)).powi(2),
            coeff_model: CoeffModel::ComplexGaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_paths == 0 {
            return Err(Error::InvalidParams("num_paths must be >= 1".into()));
        }
        if !(self.link_distance_m.is_finite() && self.link_distance_m > 0.0) {
            return Err(Error::InvalidParams(format!(
                "link_distance_m must be > 0, got {}",
                self.link_distance_m
            )));
        }
        if !(self.pathloss_exponent.is_finite() && self.pathloss_exponent >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "pathloss_exponent must be >= 0, got {}",
                self.pathloss_exponent
            )));
        }
        if !(self.reference_gain.is_finite() && self.reference_gain > 0.0) {
            return Err(Error::InvalidParams(format!(
                "reference_gain must be > 0, got {}",
                self.reference_gain
            )));
        }
        Ok(())
    }

    /// Average total power gain g₀ = β₀·d^(−α).
    pub fn mean_total_gain(&self) -> f64 {
        self.reference_gain * self.link_distance_m.powf(-self.pathloss_exponent)
    }
}

/// Draws one channel. Paths are drawn one at a time (angle, then
/// coefficient), so channels with more paths extend the same stream.
pub fn sample_channel<R: Rng + ?Sized>(rng: &mut R, cfg: &ChannelModelConfig) -> Result<ChannelRealization> {
    cfg.validate()?;
    let per_path = cfg.mean_total_gain() / cfg.num_paths as f64;
    let amplitude = per_path.sqrt();
    let mut aod = Vec::with_capacity(cfg.num_paths);
    let mut coeff = Vec::with_capacity(cfg.num_paths);
    for _ in 0..cfg.num_paths {
        aod.push(rng.random_range(0.0..=PI));
        let a = match cfg.coeff_model {
            CoeffModel::ComplexGaussian => {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * (amplitude * FRAC_1_SQRT_2)
            }
            CoeffModel::UniformPhase => Complex64::from_polar(amplitude, rng.random_range(0.0..TAU)),
        };
        coeff.push(a);
    }
    ChannelRealization::new(aod, coeff)
}

/// (1/K)·Σ_{k=1..K} R(x[k]); x[0] does not contribute.
pub fn average_rate(t: &Trajectory, ch: &ChannelRealization, p: &SystemParams) -> Result<f64> {
    check_motion(t.positions_m(), p)?;
    Ok(slot_rates(t, ch, p)[1..].iter().sum::<f64>() / p.num_slots as f64)
}

/// Rate at every position of `t`, including x[0].
pub fn slot_rates(t: &Trajectory, ch: &ChannelRealization, p: &SystemParams) -> Vec<f64> {
    t.positions_m()
        .iter()
        .map(|&x| crate::model::achievable_rate(x, ch, p))
        .collect()
}

/// Movement policies compared by the sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Fixed-hop shortest path on the grid.
    Proposed,
    Myopic,
    Farsighted,
    Fpa,
    /// Continuous closed form, two-path channels only.
    ClosedForm,
}

impl Scheme {
    /// Schemes evaluated by every sweep, in output order.
    pub const SWEEP: [Scheme; 4] = [Scheme::Proposed, Scheme::Myopic, Scheme::Farsighted, Scheme::Fpa];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Myopic => "myopic",
            Scheme::Farsighted => "farsighted",
            Scheme::Fpa => "fpa",
            Scheme::ClosedForm => "closed_form",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Scheme::Proposed, Scheme::Myopic, Scheme::Farsighted, Scheme::Fpa, Scheme::ClosedForm]
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown scheme {s:?}")))
    }
}

/// One channel realization under one parameter set, with the grid and graph
/// solution shared by all schemes.
#[derive(Debug, Clone)]
pub struct Instance<'a> {
    pub channel: &'a ChannelRealization,
    pub params: SystemParams,
    pub solution: GraphSolution,
}

impl<'a> Instance<'a> {
    pub fn new(channel: &'a ChannelRealization, params: &SystemParams) -> Result<Self> {
        let grid = discretize(params)?;
        let graph = build_graph(&grid, channel, params)?;
        let solution = solve_on(grid, graph, params)?;
        Ok(Self {
            channel,
            params: *params,
            solution,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.solution.grid
    }

    pub fn trajectory(&self, scheme: Scheme) -> Result<Trajectory> {
        let (g, ch, p) = (self.grid(), self.channel, &self.params);
        match scheme {
            Scheme::Proposed => Ok(self.solution.trajectory.clone()),
            Scheme::Myopic => myopic_trajectory(g, ch, p),
            Scheme::Farsighted => farsighted_trajectory(g, ch, p),
            Scheme::Fpa => fpa_trajectory(g, p),
            Scheme::ClosedForm => solve_twopath(ch, p),
        }
    }

    pub fn average_rate(&self, scheme: Scheme) -> Result<f64> {
        average_rate(&self.trajectory(scheme)?, self.channel, &self.params)
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Block duration T in seconds; K = round(T/τ).
    #[serde(rename = "duration_T")]
    DurationT,
    #[serde(rename = "num_paths")]
    NumPaths,
    /// Maximum velocity in m/s.
    #[serde(rename = "v_max")]
    VMax,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::DurationT => "duration_T",
            SweepVariable::NumPaths => "num_paths",
            SweepVariable::VMax => "v_max",
        }
    }

    /// Base configuration with this variable set to `value`.
    pub fn apply(self, value: f64, base: &SweepConfig) -> Result<(SystemParams, ChannelModelConfig)> {
        let mut params = base.params;
        let mut channel = base.channel;
        match self {
            SweepVariable::DurationT => params.num_slots = params.slots_for_duration(value),
            SweepVariable::NumPaths => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidSweep(format!("num_paths must be a positive integer, got {value}")));
                }
                channel.num_paths = value as usize;
            }
            SweepVariable::VMax => params.v_max_mps = value,
        }
        params.validate()?;
        channel.validate()?;
        if reach_in_grid_steps(&params) < 1 {
            return Err(Error::ReachTooShort {
                ratio: params.grid_steps_per_slot(),
            });
        }
        Ok((params, channel))
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fixed part of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub params: SystemParams,
    pub channel: ChannelModelConfig,
    /// Draw the start as a uniformly random grid center per realization;
    /// otherwise use `params.start_pos_m`.
    pub random_start: bool,
}

impl SweepConfig {
    pub fn defaults(num_paths: usize) -> Self {
        let params = SystemParams::defaults();
        Self {
            params,
            channel: ChannelModelConfig::defaults(num_paths, params.wavelength_m),
            random_start: true,
        }
    }
}

/// Start position and channel of realization `index` under `seed`.
pub fn draw_realization(
    seed: u64,
    index: u64,
    params: &SystemParams,
    channel: &ChannelModelConfig,
    random_start: bool,
) -> Result<(f64, ChannelRealization)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let u: f64 = rng.random();
    let start = if random_start {
        let n = params.num_grids;
        let idx = ((u * n as f64).floor() as usize).min(n - 1) + 1;
        idx as f64 * params.region_length_m / n as f64
    } else {
        params.start_pos_m
    };
    Ok((start, sample_channel(&mut rng, channel)?))
}

/// Average rate of each of [`Scheme::SWEEP`] on one realization.
pub fn evaluate_realization(ch: &ChannelRealization, params: &SystemParams) -> Result<[f64; 4]> {
    let inst = Instance::new(ch, params)?;
    let mut out = [0.0; 4];
    for (slot, scheme) in out.iter_mut().zip(Scheme::SWEEP) {
        *slot = inst.average_rate(scheme)?;
    }
    Ok(out)
}

/// Closed form against the grid solver on one two-path realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPathCheck {
    pub target: TwoPathTarget,
    /// Continuous closed form started from the grid-snapped start.
    pub closed_form_rate: f64,
    /// Closed form with every position snapped to its nearest grid center.
    pub snapped_rate: f64,
    /// Whether the snapped closed form moves at most `d_max` grid steps per slot.
    pub snapped_feasible: bool,
    pub dp_rate: f64,
    /// |dp − closed form| / closed form.
    pub relative_gap: f64,
}

/// Compares the two-path closed form with the graph solution of `inst`.
pub fn two_path_check(inst: &Instance<'_>) -> Result<TwoPathCheck> {
    let grid = inst.grid();
    let p = grid.snapped_params(&inst.params);
    let ch = inst.channel;
    let target = twopath_target(ch, &p)?;
    let closed = solve_twopath(ch, &p)?;
    let closed_form_rate = average_rate(&closed, ch, &p)?;
    let snapped = grid.snap_trajectory(&closed);
    let d_max = inst.solution.graph.d_max();
    let snapped_feasible = snapped.windows(2).all(|w| w[0].abs_diff(w[1]) <= d_max);
    let snapped_rate = snapped[1..]
        .iter()
        .map(|&n| -inst.solution.graph.weight(n))
        .sum::<f64>()
        / p.num_slots as f64;
    let dp_rate = inst.average_rate(Scheme::Proposed)?;
    Ok(TwoPathCheck {
        target,
        closed_form_rate,
        snapped_rate,
        snapped_feasible,
        dp_rate,
        relative_gap: (dp_rate - closed_form_rate).abs() / closed_form_rate,
    })
}

/// Mean and standard deviation of one scheme along a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeSeries {
    pub scheme: Scheme,
    pub mean_rate: Vec<f64>,
    pub std_rate: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub sweep_value: f64,
    pub message: String,
}

/// Aggregated sweep output. Values that failed carry NaN statistics and an
/// entry in `failures`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub sweep_name: String,
    pub sweep_values: Vec<f64>,
    pub series: Vec<SchemeSeries>,
    pub num_realizations: usize,
    pub seed: u64,
    pub failures: Vec<SweepFailure>,
    /// `per_realization[v][r]` holds the rates of [`Scheme::SWEEP`] for
    /// value `v` and realization `r`; empty for failed values.
    #[serde(skip)]
    pub per_realization: Vec<Vec<[f64; 4]>>,
}

impl SweepResult {
    pub fn series(&self, scheme: Scheme) -> Option<&SchemeSeries> {
        self.series.iter().find(|s| s.scheme == scheme)
    }

    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs all sweep schemes for every value and realization.
pub fn run_sweep(
    variable: SweepVariable,
    values: &[f64],
    base: &SweepConfig,
    num_realizations: usize,
    seed: u64,
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::InvalidSweep("no sweep values given".into()));
    }
    if num_realizations == 0 {
        return Err(Error::InvalidSweep("num_realizations must be >= 1".into()));
    }

    let mut failures = Vec::new();
    let mut per_realization = Vec::with_capacity(values.len());
    for &value in values {
        let outcome = variable.apply(value, base).and_then(|(params, channel)| {
            (0..num_realizations)
                .into_par_iter()
                .map(|r| {
                    let (start, ch) = draw_realization(seed, r as u64, &params, &channel, base.random_start)?;
                    let p = SystemParams {
                        start_pos_m: start,
                        ..params
                    };
                    evaluate_realization(&ch, &p)
                })
                .collect::<Result<Vec<_>>>()
        });
        match outcome {
            Ok(rates) => per_realization.push(rates),
            Err(e) => {
                failures.push(SweepFailure {
                    sweep_value: value,
                    message: e.to_string(),
                });
                per_realization.push(Vec::new());
            }
        }
    }

    let series = Scheme::SWEEP
        .iter()
        .enumerate()
        .map(|(i, &scheme)| {
            let (mean_rate, std_rate) = per_realization
                .iter()
                .map(|rows| mean_std(rows.iter().map(|r| r[i])))
                .unzip();
            SchemeSeries {
                scheme,
                mean_rate,
                std_rate,
            }
        })
        .collect();

    Ok(SweepResult {
        sweep_name: variable.name().to_string(),
        sweep_values: values.to_vec(),
        series,
        num_realizations,
        seed,
        failures,
        per_realization,
    })
}

/// Sample mean and standard deviation (n − 1 denominator, 0 for n = 1); NaN
/// for an empty input.
pub fn mean_std(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// One slot of a trajectory trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub time_s: f64,
    pub position_m: f64,
    pub gain: f64,
    pub rate_bpshz: f64,
}

/// Power gain at one grid center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandscapePoint {
    pub grid_index: usize,
    pub position_m: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub scheme: Scheme,
    pub rows: Vec<TraceRow>,
    pub landscape: Vec<LandscapePoint>,
}

/// Per-slot trace of one scheme plus the gain landscape over the grid.
pub fn trajectory_trace(scheme: Scheme, ch: &ChannelRealization, p: &SystemParams) -> Result<Trace> {
    let inst = Instance::new(ch, p)?;
    let t = inst.trajectory(scheme)?;
    Ok(trace_of(scheme, &t, &inst))
}

/// Builds the trace of an already computed trajectory.
pub fn trace_of(scheme: Scheme, t: &Trajectory, inst: &Instance<'_>) -> Trace {
    let p = &inst.params;
    let rows = t
        .positions_m()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let gain = crate::model::power_gain(x, inst.channel, p.wavelength_m);
            TraceRow {
                k,
                time_s: k as f64 * p.slot_s,
                position_m: x,
                gain,
                rate_bpshz: rate_from_gain(gain, p),
            }
        })
        .collect();
    let grid = inst.grid();
    let landscape = grid_gains(grid, inst.channel, p)
        .into_iter()
        .enumerate()
        .map(|(i, gain)| LandscapePoint {
            grid_index: i + 1,
            position_m: grid.centers_m[i],
            gain,
        })
        .collect();
    Trace {
        scheme,
        rows,
        landscape,
    }
}
