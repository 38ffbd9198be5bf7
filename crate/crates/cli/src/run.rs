//! Dispatch and output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use hammerlip_core::experiments::{
    run_coupling_check, run_crossing, run_fluctuation, run_localization, run_noncentral_drift, run_parallelogram_gap,
    run_shape, run_stationarity, run_wandering, ExperimentReport,
};
use hammerlip_core::geometry::max_inscribed_rectangle;
use hammerlip_core::sampler::{sample_poisson_rect, write_cloud_csv};
use serde_json::{json, Map, Value};

use crate::config::{Job, RunConfig};
use crate::CliError;

fn core(e: hammerlip_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// 17 significant digits.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_table(path: &Path, report: &ExperimentReport) -> Result<(), CliError> {
    let mut w = create(path)?;
    write!(w, "t,replicate,child_seed")?;
    for c in &report.columns {
        write!(w, ",{c}")?;
    }
    writeln!(w)?;
    for row in &report.rows {
        write!(w, "{},{},{}", real(row.t), row.replicate, row.child_seed)?;
        for v in &row.values {
            write!(w, ",{}", real(*v))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn summary(report: &ExperimentReport, seed: u64) -> Value {
    let cells: Vec<Value> = report
        .cells
        .iter()
        .map(|c| {
            let mut m = Map::new();
            m.insert("t".into(), json!(c.t));
            m.insert("n".into(), json!(c.n));
            m.insert("mean".into(), json!(c.mean));
            m.insert("sd".into(), json!(c.sd));
            m.insert("median".into(), json!(c.median));
            m.insert("iqr".into(), json!(c.iqr));
            for (k, v) in &c.extra {
                m.insert(k.clone(), json!(v));
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "experiment": report.name,
        "statistic": report.statistic,
        "seed": seed,
        "cells": cells,
        "fit": report.fit.map(|f| json!({"slope": f.slope, "stderr": f.stderr, "intercept": f.intercept})),
        "verdicts": report.verdicts.iter().map(|v| json!({
            "name": v.name, "pass": v.pass, "value": v.value, "band": v.band,
        })).collect::<Vec<_>>(),
        "notes": report.notes,
        "scalars": report.scalars,
    })
}

fn print_report(report: &ExperimentReport) {
    println!("{} ({})", report.name, report.statistic);
    for c in &report.cells {
        println!(
            "  t={:<8} n={:<5} mean={:.6} sd={:.6} median={:.6} iqr={:.6}",
            c.t, c.n, c.mean, c.sd, c.median, c.iqr
        );
    }
    if let Some(f) = report.fit {
        println!("  fit: slope={:.4} stderr={:.4} intercept={:.4}", f.slope, f.stderr, f.intercept);
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
    for v in &report.verdicts {
        println!("  {} {} = {:.6}  [{}]", if v.pass { "PASS" } else { "FAIL" }, v.name, v.value, v.band);
    }
}

fn finish_report(cfg: &RunConfig, report: &ExperimentReport) -> Result<bool, CliError> {
    write_table(&cfg.out_dir.join(format!("{}.csv", cfg.command)), report)?;
    write_json(&cfg.out_dir.join("summary.json"), &summary(report, cfg.seed))?;
    print_report(report);
    Ok(report.all_pass())
}

fn dispatch(cfg: &RunConfig) -> Result<bool, CliError> {
    let report = match &cfg.job {
        Job::Shape(s) => run_shape(s),
        Job::Fluct(s) => run_fluctuation(s),
        Job::Drift(s) => run_noncentral_drift(s),
        Job::Localize(s) => run_localization(s),
        Job::Wander(s) => run_wandering(s),
        Job::Gap(s) => run_parallelogram_gap(s),
        Job::Stationarity { lambda, window, reps } => run_stationarity(*lambda, *window, *reps, cfg.seed),
        Job::Coupling { trials, points_max } => {
            let out = run_coupling_check(*trials, *points_max, cfg.seed).map_err(core)?;
            let pass = out.fails == 0;
            write_json(
                &cfg.out_dir.join("summary.json"),
                &json!({
                    "experiment": "coupling", "seed": cfg.seed,
                    "trials": out.trials, "passes": out.passes, "fails": out.fails, "failing": out.failing,
                    "verdicts": [{"name": "zero_failures", "pass": pass, "value": out.fails,
                                  "band": "exact identity: no failing trial allowed"}],
                }),
            )?;
            println!("coupling: {} trials, {} passes, {} fails", out.trials, out.passes, out.fails);
            return Ok(pass);
        }
        Job::Crossing { configs } => {
            let out = run_crossing(*configs, cfg.seed).map_err(core)?;
            let pass = out.violations == 0;
            write_json(
                &cfg.out_dir.join("summary.json"),
                &json!({
                    "experiment": "crossing", "seed": cfg.seed,
                    "retained": out.retained, "skipped_zero": out.skipped_zero,
                    "probes": out.probes, "violations": out.violations,
                    "verdicts": [{"name": "zero_violations", "pass": pass, "value": out.violations,
                                  "band": "deterministic inequality: no violation allowed"}],
                }),
            )?;
            println!(
                "crossing: {} configurations retained, {} skipped with Z = 0, {} probes, {} violations",
                out.retained, out.skipped_zero, out.probes, out.violations
            );
            return Ok(pass);
        }
        Job::Rect(par) => {
            let best = max_inscribed_rectangle(par);
            let w = best.witness;
            let d = best.family.direction;
            println!("parallelogram: sigma={} rho={} mu={} c={} cprime={}", par.sigma, par.rho, par.mu, par.c, par.cprime);
            println!("area = {}", best.area);
            println!("witness = [{}, {}] x [{}, {}]", w.x0, w.x1, w.y0, w.y1);
            println!("translations: u * ({}, {}), 0 <= u <= {}", d.x, d.y, best.family.max_shift);
            write_json(
                &cfg.out_dir.join("rect.json"),
                &json!({
                    "sigma": par.sigma, "rho": par.rho, "mu": par.mu, "c": par.c, "cprime": par.cprime,
                    "area": best.area,
                    "witness": {"x0": w.x0, "x1": w.x1, "y0": w.y0, "y1": w.y1},
                    "direction": [d.x, d.y], "max_shift": best.family.max_shift,
                }),
            )?;
            return Ok(true);
        }
        Job::DumpCloud { rect, intensity } => {
            let cloud = sample_poisson_rect(rect, *intensity, cfg.seed).map_err(core)?;
            let path = cfg.out_dir.join("cloud.csv");
            let mut w = create(&path)?;
            write_cloud_csv(&cloud, &mut w)?;
            w.flush()?;
            println!("{} points written to {}", cloud.len(), path.display());
            return Ok(true);
        }
    }
    .map_err(core)?;
    finish_report(cfg, &report)
}

/// Runs the job; `Ok(false)` means some verdict failed.
pub fn execute(cfg: &RunConfig) -> Result<bool, CliError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out_dir.display())))?;
    fs::write(cfg.out_dir.join("config.resolved"), cfg.resolved_text())
        .map_err(|e| CliError::Io(format!("{}: {e}", cfg.out_dir.display())))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cfg.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(cfg))
}
