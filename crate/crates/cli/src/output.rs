//! Report files: `report.json`, `timings.json`, `checks.csv`, `plotdata_*.csv`.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ethavg::bounds::BoundCheck;
use serde::Serialize;

use crate::runner::{ExperimentReport, Timings};

/// Column order of `checks.csv`.
pub const CHECKS_HEADER: [&str; 10] = [
    "check_name",
    "seed",
    "d",
    "d_eff",
    "k",
    "N_M_or_d_S",
    "lhs",
    "rhs",
    "margin",
    "status",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn check_record(c: &BoundCheck) -> [String; 10] {
    [
        c.name.to_string(),
        opt(c.context.seed),
        c.context.d.to_string(),
        opt(c.context.d_eff),
        opt(c.context.k),
        opt(c.context.capacity),
        c.lhs.to_string(),
        c.rhs.to_string(),
        c.margin.to_string(),
        c.status.to_string(),
    ]
}

pub fn write_checks_csv<W: Write>(checks: &[BoundCheck], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CHECKS_HEADER)?;
    for c in checks {
        w.write_record(check_record(c))?;
    }
    w.flush()?;
    Ok(())
}

/// D(ρ_n, Ω) against eigenstate index and energy, per instance.
pub fn write_eigenstate_plotdata<W: Write>(report: &ExperimentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "n", "energy", "distance"])?;
    for inst in &report.instances {
        for (i, (e, v)) in inst.energies.iter().zip(&inst.per_eigenstate).enumerate() {
            w.write_record([
                inst.seed.to_string(),
                (inst.band_lo + i).to_string(),
                e.to_string(),
                v.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Bound margin against d_eff/d for every applicable check that records d_eff.
pub fn write_margin_plotdata<W: Write>(checks: &[BoundCheck], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check_name", "seed", "d_eff_over_d", "margin"])?;
    for c in checks.iter().filter(|c| c.margin.is_finite()) {
        let Some(d_eff) = c.context.d_eff else { continue };
        w.write_record([
            c.name.to_string(),
            opt(c.context.seed),
            (d_eff / c.context.d as f64).to_string(),
            c.margin.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

pub fn write_report(dir: &Path, report: &ExperimentReport, timings: &Timings) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_json(&dir.join("report.json"), report)?;
    write_json(&dir.join("timings.json"), timings)?;
    write_checks_csv(&report.checks, create(&dir.join("checks.csv"))?)?;
    write_eigenstate_plotdata(report, create(&dir.join("plotdata_eigenstate.csv"))?)?;
    write_margin_plotdata(&report.checks, create(&dir.join("plotdata_margin.csv"))?)?;
    Ok(())
}

pub fn write_json_file<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_json(&dir.join(name), value)
}
