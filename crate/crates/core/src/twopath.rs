//! Closed-form optimal trajectory for a two-path channel.
//!
//! The two-path power gain is a cosine in the antenna position. Every peak
//! reaches the same maximum (|a₁| + |a₂|)², so the optimal policy is to move
//! at full speed to the coherent position closest to the start and park there.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    power_gain, require_two_paths, ChannelRealization, SystemParams, Trajectory, FEASIBILITY_EPS,
};

/// |cos θ₁ − cos θ₂| below this is treated as a position-independent gain.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// Slack when rounding the number of slots needed to reach the target.
const ARRIVAL_SLACK: f64 = 1e-10;

/// Positions in `[0, D]` where both paths add in phase.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentSet {
    /// Sorted ascending.
    pub positions_m: Vec<f64>,
    /// λ/|cos θ₁ − cos θ₂|; `None` when the gain does not depend on position.
    pub period_m: Option<f64>,
}

impl CoherentSet {
    pub fn is_degenerate(&self) -> bool {
        self.period_m.is_none()
    }
}

/// Enumerates x̂ = (2nπ − Δφ)λ / (2π(cos θ₁ − cos θ₂)) over all integers n
/// with x̂ in `[0, D]`.
pub fn coherent_positions(ch: &ChannelRealization, p: &SystemParams) -> Result<CoherentSet> {
    require_two_paths(ch)?;
    let dc = ch.cos_aod()[0] - ch.cos_aod()[1];
    if dc.abs() < DEGENERATE_EPS {
        return Ok(CoherentSet {
            positions_m: Vec::new(),
            period_m: None,
        });
    }
    let delta_phase = ch.coeff()[1].arg() - ch.coeff()[0].arg();
    let step = p.wavelength_m / dc;
    let offset = -delta_phase / TAU * step;
    let region = p.region_length_m;

    let a = (-FEASIBILITY_EPS - offset) / step;
    let b = (region + FEASIBILITY_EPS - offset) / step;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let (n_lo, n_hi) = (lo.ceil() as i64, hi.floor() as i64);

    let mut positions_m: Vec<f64> = (n_lo..=n_hi)
        .map(|n| (offset + n as f64 * step).clamp(0.0, region))
        .collect();
    positions_m.sort_by(f64::total_cmp);
    Ok(CoherentSet {
        positions_m,
        period_m: Some(step.abs()),
    })
}

/// Coherent position closest to `x0`; equidistant candidates resolve to the
/// smaller coordinate. `None` for an empty or degenerate set.
pub fn nearest_coherent(x0: f64, cs: &CoherentSet) -> Option<f64> {
    if cs.is_degenerate() {
        return None;
    }
    let mut best: Option<(f64, f64)> = None;
    for &x in &cs.positions_m {
        let d = (x - x0).abs();
        match best {
            Some((_, bd)) if d >= bd - FEASIBILITY_EPS => {}
            _ => best = Some((x, d)),
        }
    }
    best.map(|(x, _)| x)
}

/// Number of slots k₁ = ⌈|x* − x₀| / (v_max·τ)⌉ needed to reach `x_star`.
pub fn arrival_slot(x0: f64, x_star: f64, p: &SystemParams) -> usize {
    let ratio = (x_star - x0).abs() / p.max_step_m();
    (ratio - ARRIVAL_SLACK).ceil().max(0.0) as usize
}

/// Moves from `x0` towards `x_star` at v_max and parks on arrival.
///
/// The step into slot k₁ is shortened so the antenna lands exactly on
/// `x_star`. When k₁ > K the antenna is still travelling at the end of the
/// block. The returned trajectory carries `p` with its start position
/// replaced by `x0`.
pub fn closed_form_trajectory(x0: f64, x_star: f64, p: &SystemParams) -> Result<Trajectory> {
    let region = 0.0..=p.region_length_m;
    if !region.contains(&x0) || !region.contains(&x_star) {
        return Err(Error::InvalidParams(format!(
            "closed-form endpoints {x0} and {x_star} must lie in [0, {}]",
            p.region_length_m
        )));
    }
    let params = SystemParams {
        start_pos_m: x0,
        ..*p
    };
    let k1 = arrival_slot(x0, x_star, &params);
    let dir = (x_star - x0).signum();
    let step = params.max_step_m();
    let positions = (0..=params.num_slots)
        .map(|k| {
            if k >= k1 {
                x_star
            } else {
                x0 + dir * step * k as f64
            }
        })
        .collect();
    Trajectory::new(positions, &params)
}

/// Where the closed-form policy sends the antenna.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "position_m", rename_all = "snake_case")]
pub enum TwoPathTarget {
    /// Gain does not depend on position; stay put.
    Degenerate,
    Coherent(f64),
    /// No coherent position inside the region; head for the better end.
    Boundary(f64),
}

impl TwoPathTarget {
    pub fn position(&self) -> Option<f64> {
        match *self {
            Self::Degenerate => None,
            Self::Coherent(x) | Self::Boundary(x) => Some(x),
        }
    }
}

pub fn twopath_target(ch: &ChannelRealization, p: &SystemParams) -> Result<TwoPathTarget> {
    let cs = coherent_positions(ch, p)?;
    if cs.is_degenerate() {
        return Ok(TwoPathTarget::Degenerate);
    }
    if let Some(x) = nearest_coherent(p.start_pos_m, &cs) {
        return Ok(TwoPathTarget::Coherent(x));
    }
    let left = power_gain(0.0, ch, p.wavelength_m);
    let right = power_gain(p.region_length_m, ch, p.wavelength_m);
    let end = if right > left { p.region_length_m } else { 0.0 };
    Ok(TwoPathTarget::Boundary(end))
}

/// Optimal trajectory for a two-path channel under `p`.
pub fn solve_twopath(ch: &ChannelRealization, p: &SystemParams) -> Result<Trajectory> {
    p.validate()?;
    match twopath_target(ch, p)?.position() {
        None => Ok(Trajectory::constant(p)),
        Some(x_star) => closed_form_trajectory(p.start_pos_m, x_star, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{achievable_rate, two_path_gain};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn params(k: usize, x0: f64) -> SystemParams {
        SystemParams {
            num_slots: k,
            start_pos_m: x0,
            ..SystemParams::defaults()
        }
    }

    fn random_channel(rng: &mut ChaCha8Rng) -> ChannelRealization {
        let mut coeff = || Complex64::from_polar(rng.random_range(0.1..1.0), rng.random_range(-PI..PI));
        let a = [coeff(), coeff()];
        ChannelRealization::new(
            vec![rng.random_range(0.0..=PI), rng.random_range(0.0..=PI)],
            a.to_vec(),
        )
        .unwrap()
    }

    fn mean_rate(t: &Trajectory, ch: &ChannelRealization, p: &SystemParams) -> f64 {
        let xs = &t.positions_m()[1..];
        xs.iter().map(|&x| achievable_rate(x, ch, p)).sum::<f64>() / xs.len() as f64
    }

    #[test]
    fn coherent_positions_on_wavelength_lattice() {
        // θ₁ = 0, θ₂ = π/2: cos difference 1; real positive coefficients.
        let ch = ChannelRealization::new(
            vec![0.0, PI / 2.0],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)],
        )
        .unwrap();
        let cs = coherent_positions(&ch, &params(10, 0.0)).unwrap();
        let expected = [0.0, 0.06, 0.12, 0.18, 0.24, 0.30, 0.36];
        assert_eq!(cs.positions_m.len(), expected.len(), "{cs:?}");
        for (x, e) in cs.positions_m.iter().zip(expected) {
            assert!((x - e).abs() < 1e-12, "{x} vs {e}");
        }
        assert!((cs.period_m.unwrap() - 0.06).abs() < 1e-15);
    }

    #[test]
    fn identical_angles_are_degenerate() {
        let ch = ChannelRealization::new(vec![1.0, 1.0], vec![Complex64::ONE, Complex64::I]).unwrap();
        let cs = coherent_positions(&ch, &params(10, 0.1)).unwrap();
        assert!(cs.is_degenerate());
        assert!(cs.positions_m.is_empty());
        assert_eq!(nearest_coherent(0.1, &cs), None);
    }

    #[test]
    fn rejects_wrong_path_count() {
        let ch = ChannelRealization::new(vec![1.0], vec![Complex64::ONE]).unwrap();
        assert!(matches!(
            coherent_positions(&ch, &params(10, 0.1)),
            Err(Error::PathCount { .. })
        ));
        assert!(solve_twopath(&ch, &params(10, 0.1)).is_err());
    }

    #[test]
    fn coherent_positions_maximize_dense_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = params(10, 0.0);
        for _ in 0..50 {
            let ch = random_channel(&mut rng);
            let cs = coherent_positions(&ch, &p).unwrap();
            let scan_max = (0..10_000)
                .map(|i| two_path_gain(p.region_length_m * i as f64 / 9_999.0, &ch, p.wavelength_m).unwrap())
                .fold(f64::MIN, f64::max);
            let m = ch.coeff()[0].norm() + ch.coeff()[1].norm();
            for &x in &cs.positions_m {
                let g = two_path_gain(x, &ch, p.wavelength_m).unwrap();
                assert!(g >= scan_max * (1.0 - 1e-9), "x={x} g={g} scan={scan_max}");
                assert!((g - m * m).abs() <= 1e-9 * m * m);
            }
            let dc = ch.cos_aod()[0] - ch.cos_aod()[1];
            let dphi = ch.coeff()[1].arg() - ch.coeff()[0].arg();
            for &x in &cs.positions_m {
                // x̂·2π·dc/λ + Δφ must be a multiple of 2π.
                let n = (x * TAU * dc / p.wavelength_m + dphi) / TAU;
                let xn = (TAU * n.round() - dphi) * p.wavelength_m / (TAU * dc);
                assert!((x - xn).abs() < 1e-12);
            }
            for w in cs.positions_m.windows(2) {
                assert!((w[1] - w[0] - cs.period_m.unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nearest_coherent_examples() {
        let cs = CoherentSet {
            positions_m: vec![0.0, 0.06, 0.12],
            period_m: Some(0.06),
        };
        assert_eq!(nearest_coherent(0.05, &cs), Some(0.06));
        assert_eq!(nearest_coherent(0.03, &cs), Some(0.0));
        assert_eq!(nearest_coherent(0.12, &cs), Some(0.12));
        let empty = CoherentSet {
            positions_m: vec![],
            period_m: Some(1.0),
        };
        assert_eq!(nearest_coherent(0.1, &empty), None);
    }

    #[test]
    fn closed_form_reaches_target_and_holds() {
        let p = SystemParams {
            num_slots: 5,
            ..params(5, 0.0)
        };
        let t = closed_form_trajectory(0.0, 0.0036, &p).unwrap();
        let expected = [0.0, 0.0012, 0.0024, 0.0036, 0.0036, 0.0036];
        for (x, e) in t.positions_m().iter().zip(expected) {
            assert!((x - e).abs() < 1e-15, "{:?}", t.positions_m());
        }
        assert_eq!(arrival_slot(0.0, 0.0036, &p), 3);
    }

    #[test]
    fn closed_form_stationary_when_already_there() {
        let p = params(7, 0.2);
        let t = closed_form_trajectory(0.2, 0.2, &p).unwrap();
        assert!(t.positions_m().iter().all(|&x| x == 0.2));
    }

    #[test]
    fn closed_form_clips_landing_step() {
        let p = params(10, 0.1);
        let t = closed_form_trajectory(0.1, 0.1030, &p).unwrap();
        let xs = t.positions_m();
        assert!((xs[1] - 0.1012).abs() < 1e-15);
        assert!((xs[2] - 0.1024).abs() < 1e-15);
        assert_eq!(xs[3], 0.1030);
        assert!(xs[3..].iter().all(|&x| x == 0.1030));
    }

    #[test]
    fn closed_form_unreachable_target_ramps_all_block() {
        let p = params(10, 0.0);
        let t = closed_form_trajectory(0.0, 0.36, &p).unwrap();
        let xs = t.positions_m();
        assert!(xs.windows(2).all(|w| w[1] > w[0]));
        assert!((t.end() - 0.012).abs() < 1e-15);

        // and the same moving left
        let p = params(10, 0.36);
        let t = closed_form_trajectory(0.36, 0.0, &p).unwrap();
        assert!((t.end() - 0.348).abs() < 1e-12);
    }

    #[test]
    fn degenerate_channel_stays_put() {
        let ch = ChannelRealization::new(vec![0.5, 0.5], vec![Complex64::ONE, Complex64::I]).unwrap();
        let p = params(20, 0.123);
        let t = solve_twopath(&ch, &p).unwrap();
        assert!(t.positions_m().iter().all(|&x| x == 0.123));
        let r0 = achievable_rate(0.123, &ch, &p);
        assert!((mean_rate(&t, &ch, &p) - r0).abs() < 1e-12);
    }

    #[test]
    fn empty_coherent_set_heads_for_better_boundary() {
        // dc small => period 0.06/0.05 = 1.2 m > D. Choose the phase so the
        // peak sits just right of D.
        let t1 = (0.05f64).acos();
        let dc = 0.05;
        let period = 0.06 / dc;
        // Peak at x = D + 0.1: offset = -Δφ/2π·λ/dc  =>  Δφ = -2π(D+0.1)/period
        let dphi = -TAU * (0.46 / period);
        let ch = ChannelRealization::new(
            vec![t1, PI / 2.0],
            vec![Complex64::ONE, Complex64::from_polar(0.7, dphi)],
        )
        .unwrap();
        let p = params(50, 0.1);
        let cs = coherent_positions(&ch, &p).unwrap();
        assert!(cs.positions_m.is_empty(), "{cs:?}");
        assert_eq!(twopath_target(&ch, &p).unwrap(), TwoPathTarget::Boundary(0.36));
        let t = solve_twopath(&ch, &p).unwrap();
        assert!((t.end() - (0.1 + 50.0 * 0.0012)).abs() < 1e-12);
    }

    #[test]
    fn long_block_ends_on_coherent_peak() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let ch = random_channel(&mut rng);
            let x0 = rng.random_range(0.0..0.36);
            let p = params(400, x0);
            let cs = coherent_positions(&ch, &p).unwrap();
            if cs.positions_m.is_empty() {
                continue;
            }
            let t = solve_twopath(&ch, &p).unwrap();
            let m = ch.coeff()[0].norm() + ch.coeff()[1].norm();
            let g = two_path_gain(t.end(), &ch, p.wavelength_m).unwrap();
            assert!(cs.positions_m.contains(&t.end()));
            assert!((g - m * m).abs() <= 1e-9 * m * m);
        }
    }

    #[test]
    fn output_moves_at_full_speed_until_arrival() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let ch = random_channel(&mut rng);
            let p = params(rng.random_range(1..150), rng.random_range(0.0..0.36));
            let t = solve_twopath(&ch, &p).unwrap();
            let Some(x_star) = twopath_target(&ch, &p).unwrap().position() else {
                continue;
            };
            let k1 = arrival_slot(p.start_pos_m, x_star, &p);
            let xs = t.positions_m();
            for k in 1..=p.num_slots.min(k1.saturating_sub(1)) {
                assert!(((xs[k] - xs[k - 1]).abs() - p.max_step_m()).abs() < 1e-12);
            }
            assert!(t.max_step_m() <= p.max_step_m() + FEASIBILITY_EPS);
        }
    }

    #[test]
    fn gain_increases_en_route_without_intervening_valley() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        while checked < 200 {
            let ch = random_channel(&mut rng);
            let x0 = rng.random_range(0.0..0.36);
            let p = params(100, x0);
            let TwoPathTarget::Coherent(x_star) = twopath_target(&ch, &p).unwrap() else {
                continue;
            };
            // x* must also be the nearest peak of the unrestricted cosine,
            // otherwise a valley separates it from x0.
            let period = coherent_positions(&ch, &p).unwrap().period_m.unwrap();
            if (x_star - x0).abs() > period / 2.0 {
                continue;
            }
            checked += 1;
            let t = solve_twopath(&ch, &p).unwrap();
            let k1 = arrival_slot(x0, x_star, &p).min(p.num_slots);
            let gains: Vec<f64> = t.positions_m()[..=k1]
                .iter()
                .map(|&x| two_path_gain(x, &ch, p.wavelength_m).unwrap())
                .collect();
            for w in gains.windows(2) {
                assert!(w[1] >= w[0] - 1e-12 * ch.total_power(), "{gains:?}");
            }
        }
    }

    fn random_walk(rng: &mut ChaCha8Rng, p: &SystemParams) -> Trajectory {
        let step = p.max_step_m();
        // mix of diffusive and persistent walks
        let persistence: f64 = rng.random_range(0.0..1.0);
        let mut v: f64 = rng.random_range(-1.0..1.0);
        let mut xs = vec![p.start_pos_m];
        for _ in 0..p.num_slots {
            if rng.random_range(0.0..1.0) > persistence {
                v = rng.random_range(-1.0..1.0);
            }
            let last = *xs.last().unwrap();
            xs.push((last + v * step).clamp(0.0, p.region_length_m));
        }
        Trajectory::new(xs, p).unwrap()
    }

    #[test]
    fn closed_form_beats_random_feasible_trajectories() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut tested = 0;
        while tested < 20 {
            let ch = random_channel(&mut rng);
            let x0 = rng.random_range(0.0..0.36);
            let p = params(100, x0);
            // Restrict to the setting covered by the optimality argument:
            // a non-degenerate channel whose nearest lattice peak is in range.
            let TwoPathTarget::Coherent(x_star) = twopath_target(&ch, &p).unwrap() else {
                continue;
            };
            let period = coherent_positions(&ch, &p).unwrap().period_m.unwrap();
            if (x_star - x0).abs() > period / 2.0 {
                continue;
            }
            tested += 1;
            let best = mean_rate(&solve_twopath(&ch, &p).unwrap(), &ch, &p);
            for _ in 0..500 {
                let other = mean_rate(&random_walk(&mut rng, &p), &ch, &p);
                assert!(best >= other - 1e-12, "closed form {best} < random {other}");
            }
        }
    }
}
