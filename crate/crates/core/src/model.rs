//! Physical parameters, the multipath field-response channel and the
//! per-slot achievable rate.
//!
//! Positions are absolute coordinates on the movement segment `[0, D]`, and
//! the segment origin is the phase reference point of every path.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack on the per-slot displacement bound and on region membership.
pub const FEASIBILITY_EPS: f64 = 1e-12;

/// Physical and discretization constants of one transmission block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Carrier wavelength λ.
    pub wavelength_m: f64,
    /// Length D of the movement segment.
    pub region_length_m: f64,
    pub v_max_mps: f64,
    /// Slot length τ.
    pub slot_s: f64,
    /// Number of slots K in the block.
    pub num_slots: usize,
    /// Number of grid cells N used by the graph solver.
    pub num_grids: usize,
    pub tx_power_w: f64,
    pub noise_power_w: f64,
    /// Initial antenna position x₀.
    pub start_pos_m: f64,
}

impl SystemParams {
    /// Simulation defaults: λ = 6 cm, D = 6λ, v_max = 2λ per second,
    /// τ = 10 ms, T = 2 s, N = 600, 40 W transmit power and 10⁻¹¹ W noise.
    /// The start position defaults to the segment center.
    pub fn defaults() -> Self {
        Self {
            wavelength_m: 0.06,
            region_length_m: 0.36,
            v_max_mps: 0.12,
            slot_s: 0.01,
            num_slots: 200,
            num_grids: 600,
            tx_power_w: 40.0,
            noise_power_w: 1e-11,
            start_pos_m: 0.18,
        }
    }

    /// Checks every invariant, returning the first one violated.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength_m", self.wavelength_m),
            ("region_length_m", self.region_length_m),
            ("v_max_mps", self.v_max_mps),
            ("slot_s", self.slot_s),
            ("tx_power_w", self.tx_power_w),
            ("noise_power_w", self.noise_power_w),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite and > 0, got {value}"
                )));
            }
        }
        if self.num_slots == 0 {
            return Err(Error::InvalidParams("num_slots must be >= 1".into()));
        }
        if self.num_grids == 0 {
            return Err(Error::InvalidParams("num_grids must be >= 1".into()));
        }
        if !(0.0..=self.region_length_m).contains(&self.start_pos_m) {
            return Err(Error::InvalidParams(format!(
                "start_pos_m must lie in [0, {}], got {}",
                self.region_length_m, self.start_pos_m
            )));
        }
        if self.grid_steps_per_slot() < 1.0 - RATIO_SLACK {
            return Err(Error::InvalidParams(format!(
                "v_max_mps * slot_s = {} is shorter than one grid spacing {}",
                self.max_step_m(),
                self.grid_spacing_m()
            )));
        }
        Ok(())
    }

    /// Largest displacement allowed in one slot, v_max·τ.
    pub fn max_step_m(&self) -> f64 {
        self.v_max_mps * self.slot_s
    }

    /// Block duration T = K·τ.
    pub fn duration_s(&self) -> f64 {
        self.num_slots as f64 * self.slot_s
    }

    pub fn grid_spacing_m(&self) -> f64 {
        self.region_length_m / self.num_grids as f64
    }

    /// v_max·τ / δ_s before flooring.
    pub fn grid_steps_per_slot(&self) -> f64 {
        self.max_step_m() / self.grid_spacing_m()
    }

    /// Linear SNR scale P_t / σ².
    pub fn snr_scale(&self) -> f64 {
        self.tx_power_w / self.noise_power_w
    }

    /// Number of slots for a block of `duration_s` seconds, rounded to the
    /// nearest integer.
    pub fn slots_for_duration(&self, duration_s: f64) -> usize {
        (duration_s / self.slot_s).round() as usize
    }
}

/// Relative slack when flooring ratios such as v_max·τ/δ_s, which are
/// integers in exact arithmetic for the usual parameter choices.
pub(crate) const RATIO_SLACK: f64 = 1e-9;

/// Angles of departure and complex path coefficients of one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct ChannelRealization {
    aod_rad: Vec<f64>,
    coeff: Vec<Complex64>,
    cos_aod: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    aod_rad: Vec<f64>,
    coeff: Vec<Complex64>,
}

impl TryFrom<ChannelRepr> for ChannelRealization {
    type Error = Error;

    fn try_from(repr: ChannelRepr) -> Result<Self> {
        Self::new(repr.aod_rad, repr.coeff)
    }
}

impl From<ChannelRealization> for ChannelRepr {
    fn from(ch: ChannelRealization) -> Self {
        Self {
            aod_rad: ch.aod_rad,
            coeff: ch.coeff,
        }
    }
}

impl ChannelRealization {
    pub fn new(aod_rad: Vec<f64>, coeff: Vec<Complex64>) -> Result<Self> {
        if aod_rad.is_empty() {
            return Err(Error::InvalidChannel("at least one path is required".into()));
        }
        if aod_rad.len() != coeff.len() {
            return Err(Error::InvalidChannel(format!(
                "{} angles but {} coefficients",
                aod_rad.len(),
                coeff.len()
            )));
        }
        if let Some(bad) = aod_rad.iter().find(|a| !(0.0..=PI).contains(*a)) {
            return Err(Error::InvalidChannel(format!(
                "angle of departure {bad} outside [0, pi]"
            )));
        }
        if let Some(bad) = coeff.iter().find(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidChannel(format!("non-finite coefficient {bad}")));
        }
        let cos_aod = aod_rad.iter().map(|a| a.cos()).collect();
        Ok(Self {
            aod_rad,
            coeff,
            cos_aod,
        })
    }

    pub fn num_paths(&self) -> usize {
        self.aod_rad.len()
    }

    pub fn aod_rad(&self) -> &[f64] {
        &self.aod_rad
    }

    pub fn coeff(&self) -> &[Complex64] {
        &self.coeff
    }

    pub fn cos_aod(&self) -> &[f64] {
        &self.cos_aod
    }

    /// Sum of per-path power gains Σ|a_l|².
    pub fn total_power(&self) -> f64 {
        self.coeff.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Per-path phase factors exp(j·2π/λ·x·cos θ_l) at position `x`.
pub fn field_response_vector(x: f64, ch: &ChannelRealization, wavelength_m: f64) -> Vec<Complex64> {
    let k = TAU / wavelength_m;
    ch.cos_aod
        .iter()
        .map(|c| Complex64::from_polar(1.0, k * x * c))
        .collect()
}

/// Overall channel h(x) = aᴴ g(x).
pub fn channel_gain(x: f64, ch: &ChannelRealization, wavelength_m: f64) -> Complex64 {
    let k = TAU / wavelength_m;
    ch.coeff
        .iter()
        .zip(&ch.cos_aod)
        .map(|(a, c)| a.conj() * Complex64::from_polar(1.0, k * x * c))
        .sum()
}

/// Channel power gain |h(x)|².
pub fn power_gain(x: f64, ch: &ChannelRealization, wavelength_m: f64) -> f64 {
    channel_gain(x, ch, wavelength_m).norm_sqr()
}

/// log₂(1 + P_t·gain/σ²).
pub fn rate_from_gain(gain: f64, p: &SystemParams) -> f64 {
    (p.snr_scale() * gain).ln_1p() / std::f64::consts::LN_2
}

/// Achievable rate in bits/s/Hz with the antenna at `x`.
pub fn achievable_rate(x: f64, ch: &ChannelRealization, p: &SystemParams) -> f64 {
    rate_from_gain(power_gain(x, ch, p.wavelength_m), p)
}

/// Phase difference φ(x) between the two paths of a two-path channel.
pub fn two_path_phase(x: f64, ch: &ChannelRealization, wavelength_m: f64) -> Result<f64> {
    require_two_paths(ch)?;
    let (c1, c2) = (ch.cos_aod[0], ch.cos_aod[1]);
    let delta_phase = ch.coeff[1].arg() - ch.coeff[0].arg();
    Ok(TAU / wavelength_m * x * (c1 - c2) + delta_phase)
}

/// Closed-form power gain |a₁|² + |a₂|² + 2|a₁||a₂|cos φ(x) of a two-path
/// channel.
pub fn two_path_gain(x: f64, ch: &ChannelRealization, wavelength_m: f64) -> Result<f64> {
    let phi = two_path_phase(x, ch, wavelength_m)?;
    let (m1, m2) = (ch.coeff[0].norm(), ch.coeff[1].norm());
    Ok(m1 * m1 + m2 * m2 + 2.0 * m1 * m2 * phi.cos())
}

pub(crate) fn require_two_paths(ch: &ChannelRealization) -> Result<()> {
    if ch.num_paths() != 2 {
        return Err(Error::PathCount {
            expected: 2,
            found: ch.num_paths(),
        });
    }
    Ok(())
}

/// Antenna positions x[0..=K] over one block.
///
/// Construction enforces the start position, the per-slot displacement bound
/// v_max·τ and region membership, each up to [`FEASIBILITY_EPS`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    positions_m: Vec<f64>,
    params: SystemParams,
}

impl Trajectory {
    pub fn new(positions_m: Vec<f64>, params: &SystemParams) -> Result<Self> {
        check_motion(&positions_m, params)?;
        let first = positions_m[0];
        if (first - params.start_pos_m).abs() > FEASIBILITY_EPS {
            return Err(Error::InfeasibleTrajectory(format!(
                "x[0] = {first} differs from start position {}",
                params.start_pos_m
            )));
        }
        Ok(Self {
            positions_m,
            params: *params,
        })
    }

    /// Antenna parked at the start position for the whole block.
    pub fn constant(params: &SystemParams) -> Self {
        Self {
            positions_m: vec![params.start_pos_m; params.num_slots + 1],
            params: *params,
        }
    }

    pub fn positions_m(&self) -> &[f64] {
        &self.positions_m
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn num_slots(&self) -> usize {
        self.positions_m.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.positions_m[0]
    }

    pub fn end(&self) -> f64 {
        self.positions_m[self.positions_m.len() - 1]
    }

    /// Largest per-slot displacement |x[k] − x[k−1]|.
    pub fn max_step_m(&self) -> f64 {
        self.positions_m
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }
}

/// Length, velocity and region checks shared by [`Trajectory::new`] and the
/// rate evaluation; the start position is checked separately.
pub(crate) fn check_motion(positions_m: &[f64], params: &SystemParams) -> Result<()> {
    if positions_m.len() != params.num_slots + 1 {
        return Err(Error::InfeasibleTrajectory(format!(
            "expected {} positions for K = {}, got {}",
            params.num_slots + 1,
            params.num_slots,
            positions_m.len()
        )));
    }
    let region = -FEASIBILITY_EPS..=params.region_length_m + FEASIBILITY_EPS;
    if let Some((k, x)) = positions_m
        .iter()
        .enumerate()
        .find(|(_, x)| !region.contains(*x))
    {
        return Err(Error::InfeasibleTrajectory(format!(
            "x[{k}] = {x} outside [0, {}]",
            params.region_length_m
        )));
    }
    let bound = params.max_step_m() + FEASIBILITY_EPS;
    if let Some((k, w)) = positions_m
        .windows(2)
        .enumerate()
        .find(|(_, w)| (w[1] - w[0]).abs() > bound)
    {
        return Err(Error::InfeasibleTrajectory(format!(
            "step into slot {} moves {} m, more than v_max*tau = {} m",
            k + 1,
            (w[1] - w[0]).abs(),
            params.max_step_m()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn single(theta: f64, a: Complex64) -> ChannelRealization {
        ChannelRealization::new(vec![theta], vec![a]).unwrap()
    }

    #[test]
    fn defaults_are_valid() {
        let p = SystemParams::defaults();
        p.validate().unwrap();
        assert!(close(p.grid_spacing_m(), 0.0006, 1e-12));
        assert!(close(p.grid_steps_per_slot(), 2.0, 1e-12));
        assert!(close(p.duration_s(), 2.0, 1e-12));
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = SystemParams::defaults();
        p.start_pos_m = 0.5;
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));

        let mut p = SystemParams::defaults();
        p.v_max_mps = 0.01;
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("shorter than one grid spacing"), "{err}");

        let mut p = SystemParams::defaults();
        p.noise_power_w = 0.0;
        assert!(p.validate().unwrap_err().to_string().contains("noise_power_w"));
    }

    #[test]
    fn rejects_bad_channels() {
        assert!(ChannelRealization::new(vec![], vec![]).is_err());
        assert!(ChannelRealization::new(vec![0.1, 0.2], vec![Complex64::ONE]).is_err());
        assert!(ChannelRealization::new(vec![-0.1], vec![Complex64::ONE]).is_err());
        assert!(ChannelRealization::new(vec![3.2], vec![Complex64::ONE]).is_err());
    }

    #[test]
    fn frv_at_origin_is_all_ones() {
        let ch = ChannelRealization::new(
            vec![0.3, 1.1, 2.9],
            vec![Complex64::ONE, Complex64::I, Complex64::new(0.2, -0.4)],
        )
        .unwrap();
        for g in field_response_vector(0.0, &ch, 0.06) {
            assert_eq!(g, Complex64::ONE);
        }
    }

    #[test]
    fn frv_broadside_path_has_zero_phase() {
        let ch = single(PI / 2.0, Complex64::ONE);
        for x in [0.0, 0.01, 0.17, 0.36] {
            let g = field_response_vector(x, &ch, 0.06)[0];
            assert!((g - Complex64::ONE).norm() < 1e-12, "{g}");
        }
    }

    #[test]
    fn frv_half_wavelength_flips_sign() {
        let ch = single(0.0, Complex64::ONE);
        let g = field_response_vector(0.03, &ch, 0.06)[0];
        assert!((g + Complex64::ONE).norm() < 1e-12, "{g}");
    }

    #[test]
    fn single_path_magnitude_is_position_independent() {
        let c = Complex64::new(0.3, -0.7);
        let ch = single(1.234, c);
        for i in 0..50 {
            let x = i as f64 * 0.0071;
            assert!(close(channel_gain(x, &ch, 0.06).norm(), c.norm(), 1e-12));
        }
    }

    #[test]
    fn equal_cosines_give_constant_gain() {
        let ch = ChannelRealization::new(
            vec![0.8, 0.8],
            vec![Complex64::new(1.0, 0.5), Complex64::new(-0.2, 0.9)],
        )
        .unwrap();
        let g0 = power_gain(0.0, &ch, 0.06);
        for i in 0..50 {
            assert!(close(power_gain(i as f64 * 0.0073, &ch, 0.06), g0, 1e-12));
        }
    }

    #[test]
    fn channel_gain_matches_real_arithmetic_sum() {
        // Independent route: expand conj(a)·e^{jΦ} into real and imaginary
        // parts by hand instead of using complex multiplication.
        let aod = [0.4, 1.3, 2.2, 2.95];
        let coeff = [
            Complex64::new(0.7, -0.1),
            Complex64::new(-0.3, 0.45),
            Complex64::new(0.05, 0.9),
            Complex64::new(-0.6, -0.6),
        ];
        let ch = ChannelRealization::new(aod.to_vec(), coeff.to_vec()).unwrap();
        let lambda = 0.06;
        for i in 0..50 {
            let x = 0.36 * i as f64 / 49.0;
            let (mut re, mut im) = (0.0, 0.0);
            for (theta, a) in aod.iter().zip(&coeff) {
                let phase = 2.0 * PI * x * theta.cos() / lambda;
                let (s, c) = phase.sin_cos();
                re += a.re * c + a.im * s;
                im += a.re * s - a.im * c;
            }
            let h = channel_gain(x, &ch, lambda);
            let scale = (re * re + im * im).sqrt().max(1e-300);
            assert!((h.re - re).abs() / scale < 1e-10, "x={x}");
            assert!((h.im - im).abs() / scale < 1e-10, "x={x}");
        }
    }

    #[test]
    fn rate_examples() {
        let mut p = SystemParams::defaults();
        p.tx_power_w = 1.0;
        p.noise_power_w = 1.0;
        assert_eq!(rate_from_gain(1.0, &p), 1.0);
        assert!(close(rate_from_gain(3.0, &p), 2.0, 1e-15));

        let p = SystemParams::defaults();
        let a = (1e-11f64 / 40.0).sqrt();
        let ch = single(0.7, Complex64::new(a, 0.0));
        assert!(close(achievable_rate(0.1, &ch, &p), 1.0, 1e-12));
    }

    #[test]
    fn two_path_gain_extremes() {
        let (m1, m2) = (0.8, 0.3);
        // θ₁ = π/2, θ₂ = 0 gives cos θ₁ − cos θ₂ = −1.
        let ch = ChannelRealization::new(
            vec![PI / 2.0, 0.0],
            vec![Complex64::new(m1, 0.0), Complex64::new(m2, 0.0)],
        )
        .unwrap();
        let coherent = two_path_gain(0.0, &ch, 0.06).unwrap();
        assert!(close(coherent, (m1 + m2) * (m1 + m2), 1e-14));
        let destructive = two_path_gain(0.03, &ch, 0.06).unwrap();
        assert!(close(destructive, (m1 - m2) * (m1 - m2), 1e-12));
    }

    #[test]
    fn two_path_gain_rejects_other_path_counts() {
        let ch = single(0.2, Complex64::ONE);
        assert_eq!(
            two_path_gain(0.0, &ch, 0.06),
            Err(Error::PathCount { expected: 2, found: 1 })
        );
    }

    #[test]
    fn trajectory_invariants() {
        let mut p = SystemParams::defaults();
        p.num_slots = 3;
        p.start_pos_m = 0.1;
        assert!(Trajectory::new(vec![0.1, 0.1012, 0.1024, 0.1024], &p).is_ok());
        // wrong start
        assert!(Trajectory::new(vec![0.2, 0.2, 0.2, 0.2], &p).is_err());
        // too fast
        assert!(Trajectory::new(vec![0.1, 0.1013, 0.1013, 0.1013], &p).is_err());
        // wrong length
        assert!(Trajectory::new(vec![0.1, 0.1], &p).is_err());
        p.start_pos_m = 0.0;
        assert!(Trajectory::new(vec![0.0, -0.001, 0.0, 0.0], &p).is_err());
    }

    #[test]
    fn deserialized_channel_is_revalidated() {
        let repr = ChannelRepr {
            aod_rad: vec![4.0],
            coeff: vec![Complex64::ONE],
        };
        assert!(ChannelRealization::try_from(repr).is_err());
    }

    fn two_path_strategy() -> impl Strategy<Value = (ChannelRealization, f64)> {
        (
            0.0..=PI,
            0.0..=PI,
            0.01f64..2.0,
            0.01f64..2.0,
            -PI..PI,
            -PI..PI,
            0.0f64..0.36,
        )
            .prop_map(|(t1, t2, m1, m2, p1, p2, x)| {
                let ch = ChannelRealization::new(
                    vec![t1, t2],
                    vec![Complex64::from_polar(m1, p1), Complex64::from_polar(m2, p2)],
                )
                .unwrap();
                (ch, x)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn frv_entries_have_unit_modulus(x in 0.0f64..0.36, theta in 0.0..=PI) {
            let ch = single(theta, Complex64::ONE);
            let g = field_response_vector(x, &ch, 0.06)[0];
            prop_assert!((g.norm() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn two_path_closed_form_matches_channel_sum((ch, x) in two_path_strategy()) {
            let direct = power_gain(x, &ch, 0.06);
            let closed = two_path_gain(x, &ch, 0.06).unwrap();
            let scale = ch.total_power();
            prop_assert!((direct - closed).abs() <= 1e-10 * scale);
        }

        #[test]
        fn two_path_gain_is_periodic((ch, x) in two_path_strategy()) {
            let dc = (ch.cos_aod()[0] - ch.cos_aod()[1]).abs();
            prop_assume!(dc > 1e-3);
            let period = 0.06 / dc;
            let g0 = two_path_gain(x, &ch, 0.06).unwrap();
            let g1 = two_path_gain(x + period, &ch, 0.06).unwrap();
            prop_assert!((g0 - g1).abs() <= 1e-9 * ch.total_power());
        }

        #[test]
        fn rate_is_strictly_increasing_in_gain(g in 0.0f64..1e-9, dg in 1e-14f64..1e-9) {
            let p = SystemParams::defaults();
            prop_assert!(rate_from_gain(g + dg, &p) > rate_from_gain(g, &p));
            prop_assert!(rate_from_gain(g, &p) >= 0.0);
        }
    }
}
