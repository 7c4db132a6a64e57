//! CSV and JSON writers. Headers are fixed; floats use the shortest
//! representation that parses back to the same value.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use matraj_core::montecarlo::{LandscapePoint, TraceRow};
use matraj_core::{Scheme, SweepResult};
use serde::Serialize;

pub const TRAJECTORY_HEADER: &str = "k,time_s,position_m,gain,rate_bpshz";
pub const SWEEP_HEADER: &str = "sweep_name,sweep_value,scheme,mean_rate_bpshz,std_rate_bpshz,n_realizations,seed";
pub const LANDSCAPE_HEADER: &str = "grid_index,position_m,gain";
pub const REALIZATIONS_HEADER: &str = "sweep_name,sweep_value,realization,scheme,rate_bpshz";

#[derive(Debug, Serialize)]
struct SweepRow<'a> {
    sweep_name: &'a str,
    sweep_value: f64,
    scheme: Scheme,
    mean_rate_bpshz: f64,
    std_rate_bpshz: f64,
    n_realizations: usize,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct RealizationRow<'a> {
    sweep_name: &'a str,
    sweep_value: f64,
    realization: usize,
    scheme: Scheme,
    rate_bpshz: f64,
}

fn write_rows<T: Serialize>(path: &Path, header: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    w.write_record(header.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trajectory(path: &Path, rows: &[TraceRow]) -> Result<()> {
    write_rows(path, TRAJECTORY_HEADER, rows)
}

pub fn write_landscape(path: &Path, points: &[LandscapePoint]) -> Result<()> {
    write_rows(path, LANDSCAPE_HEADER, points)
}

/// One row per (value, scheme). Values that failed are skipped.
pub fn write_sweep(path: &Path, res: &SweepResult) -> Result<()> {
    let mut rows = Vec::new();
    for (v, &value) in res.sweep_values.iter().enumerate() {
        if res.per_realization[v].is_empty() {
            continue;
        }
        for s in &res.series {
            rows.push(SweepRow {
                sweep_name: &res.sweep_name,
                sweep_value: value,
                scheme: s.scheme,
                mean_rate_bpshz: s.mean_rate[v],
                std_rate_bpshz: s.std_rate[v],
                n_realizations: res.num_realizations,
                seed: res.seed,
            });
        }
    }
    write_rows(path, SWEEP_HEADER, rows)
}

pub fn write_realizations(path: &Path, res: &SweepResult) -> Result<()> {
    let rows = res
        .sweep_values
        .iter()
        .zip(&res.per_realization)
        .flat_map(|(&value, runs)| {
            runs.iter().enumerate().flat_map(move |(r, rates)| {
                Scheme::SWEEP.iter().zip(rates).map(move |(&scheme, &rate)| RealizationRow {
                    sweep_name: &res.sweep_name,
                    sweep_value: value,
                    realization: r,
                    scheme,
                    rate_bpshz: rate,
                })
            })
        });
    write_rows(path, REALIZATIONS_HEADER, rows)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
