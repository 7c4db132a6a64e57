use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use matraj_core::{ChannelModelConfig, Scheme, SweepConfig, SweepVariable, SystemParams};
use serde::Serialize;

use crate::args::{ModelArgs, SolveArgs, SweepArgs};

/// Fully resolved configuration of one command, echoed into the JSON summary.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub params: SystemParams,
    pub channel: ChannelModelConfig,
    /// Start drawn from the seed rather than given on the command line.
    pub random_start: bool,
    pub schemes: Vec<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_realizations: Option<usize>,
    pub seed: u64,
    #[serde(skip)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

impl RunConfig {
    pub fn for_solve(out_dir: &Path, args: &SolveArgs) -> Result<Self> {
        let mut schemes: Vec<Scheme> = args.schemes.iter().map(|&s| s.into()).collect();
        schemes.dedup();
        let cfg = Self::base(out_dir, &args.model, args.seed, schemes)?;
        cfg.prepare_out_dir()?;
        Ok(cfg)
    }

    pub fn for_sweep(out_dir: &Path, args: &SweepArgs) -> Result<Self> {
        let mut cfg = Self::base(out_dir, &args.model, args.seed, Scheme::SWEEP.to_vec())?;
        anyhow::ensure!(args.realizations >= 1, "realizations must be >= 1");
        cfg.sweep = Some(SweepSpec {
            variable: args.variable.into(),
            values: args.values.clone(),
        });
        cfg.num_realizations = Some(args.realizations);
        cfg.prepare_out_dir()?;
        Ok(cfg)
    }

    fn base(out_dir: &Path, m: &ModelArgs, seed: u64, schemes: Vec<Scheme>) -> Result<Self> {
        let mut params = SystemParams {
            wavelength_m: m.wavelength,
            region_length_m: m.region,
            v_max_mps: m.v_max,
            slot_s: m.slot,
            num_slots: 0,
            num_grids: m.grids,
            tx_power_w: m.power,
            noise_power_w: m.noise,
            start_pos_m: m.start_pos.unwrap_or(m.region / 2.0),
        };
        anyhow::ensure!(
            m.duration.is_finite() && m.duration > 0.0,
            "duration must be > 0, got {}",
            m.duration
        );
        params.num_slots = params.slots_for_duration(m.duration);
        params.validate()?;

        let mut channel = ChannelModelConfig::defaults(m.paths, m.wavelength);
        channel.link_distance_m = m.distance;
        channel.pathloss_exponent = m.pathloss;
        if let Some(g) = m.reference_gain {
            channel.reference_gain = g;
        }
        channel.coeff_model = m.coeff_model.into();
        channel.validate()?;

        Ok(Self {
            params,
            channel,
            random_start: m.start_pos.is_none(),
            schemes,
            sweep: None,
            num_realizations: None,
            seed,
            out_dir: out_dir.to_path_buf(),
        })
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            params: self.params,
            channel: self.channel,
            random_start: self.random_start,
        }
    }

    fn prepare_out_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("output directory {} is not writable", self.out_dir.display()))
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}
