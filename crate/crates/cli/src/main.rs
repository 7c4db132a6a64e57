mod args;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;
use matraj_core::montecarlo::{draw_realization, trace_of, two_path_check, Instance, TwoPathCheck};
use matraj_core::{average_rate, run_sweep, ChannelRealization, Scheme, SweepResult};
use serde::Serialize;

use crate::args::{Cli, Command, SolveArgs, SweepArgs};
use crate::config::RunConfig;

#[derive(Serialize)]
struct SolveSummary<'a> {
    config: &'a RunConfig,
    channel: &'a ChannelRealization,
    start_index: usize,
    grid_start_m: f64,
    d_max: usize,
    dp_total_cost: f64,
    schemes: Vec<SchemeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_path: Option<TwoPathCheck>,
}

#[derive(Serialize)]
struct SchemeSummary {
    scheme: Scheme,
    average_rate_bpshz: f64,
    final_position_m: f64,
    file: String,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    config: &'a RunConfig,
    result: &'a SweepResult,
}

fn solve(out_dir: &std::path::Path, args: &SolveArgs, with_landscape: bool) -> Result<()> {
    let mut cfg = RunConfig::for_solve(out_dir, args)?;
    let (start, ch) = draw_realization(cfg.seed, 0, &cfg.params, &cfg.channel, cfg.random_start)?;
    cfg.params.start_pos_m = start;
    let inst = Instance::new(&ch, &cfg.params)?;

    let mut schemes = Vec::with_capacity(cfg.schemes.len());
    let mut landscape = None;
    for &scheme in &cfg.schemes {
        let t = inst.trajectory(scheme)?;
        let rate = average_rate(&t, &ch, &cfg.params)?;
        let trace = trace_of(scheme, &t, &inst);
        let file = format!("trajectory_{}.csv", scheme.name());
        output::write_trajectory(&cfg.out_path(&file), &trace.rows)?;
        landscape.get_or_insert(trace.landscape);
        schemes.push(SchemeSummary {
            scheme,
            average_rate_bpshz: rate,
            final_position_m: t.end(),
            file,
        });
    }
    if with_landscape {
        if let Some(points) = &landscape {
            output::write_landscape(&cfg.out_path("gain_landscape.csv"), points)?;
        }
    }

    let two_path = if ch.num_paths() == 2 {
        Some(two_path_check(&inst)?)
    } else {
        None
    };
    let grid = inst.grid();
    let summary = SolveSummary {
        config: &cfg,
        channel: &ch,
        start_index: grid.start_index,
        grid_start_m: grid.center(grid.start_index),
        d_max: inst.solution.graph.d_max(),
        dp_total_cost: inst.solution.path.total_cost,
        schemes,
        two_path,
    };
    output::write_json(&cfg.out_path("summary.json"), &summary)
}

fn sweep(out_dir: &std::path::Path, args: &SweepArgs) -> Result<()> {
    let cfg = RunConfig::for_sweep(out_dir, args)?;
    let spec = cfg.sweep.as_ref().expect("sweep spec");
    let res = run_sweep(
        spec.variable,
        &spec.values,
        &cfg.sweep_config(),
        cfg.num_realizations.unwrap_or(1),
        cfg.seed,
    )?;
    let stem = format!("sweep_{}", spec.variable.name());
    output::write_sweep(&cfg.out_path(&format!("{stem}.csv")), &res)?;
    output::write_realizations(&cfg.out_path(&format!("{stem}_realizations.csv")), &res)?;
    output::write_json(
        &cfg.out_path(&format!("{stem}.json")),
        &SweepSummary {
            config: &cfg,
            result: &res,
        },
    )?;
    if !res.is_complete() {
        for f in &res.failures {
            eprintln!("{} = {}: {}", res.sweep_name, f.sweep_value, f.message);
        }
        bail!("{} of {} sweep values failed", res.failures.len(), res.sweep_values.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => solve(&cli.out_dir, args, false),
        Command::Trace(args) => solve(&cli.out_dir, args, true),
        Command::Sweep(args) => sweep(&cli.out_dir, args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
