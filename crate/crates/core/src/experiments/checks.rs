use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{replicate, CellStats, ExperimentReport, ReplicateRow, Verdict};
use crate::chains::{boundary_increment_sinks, boundary_increment_sources, crossing_margins, longest_chain_bruteforce, z_statistic};
use crate::error::{invalid, Error, Result};
use crate::geometry::{order_holds, phi_map, PlanarPoint, Rect, SlopeBand};
use crate::sampler::{child_seed, rng_from_seed, sample_poisson_rect, sample_sources_sinks, SimRng};
use crate::stats::{correlation, mean, variance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingOutcome {
    pub trials: usize,
    pub passes: usize,
    pub fails: usize,
    /// Indices of the failing trials.
    pub failing: Vec<usize>,
}

fn log_uniform(rng: &mut SimRng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp()
}

/// One random finite band and uniform cloud. Trial 0 is empty, trial 1 a
/// single point.
fn coupling_trial(index: usize, n_points_max: usize, seed: u64) -> Result<bool> {
    let mut rng = rng_from_seed(seed);
    let alpha = log_uniform(&mut rng, 0.05, 5.0);
    let beta = alpha * log_uniform(&mut rng, 1.05, 20.0);
    let band = SlopeBand::new(alpha, beta)?;
    let n = match index {
        0 => 0,
        1 => 1.min(n_points_max),
        _ => rng.random_range(0..=n_points_max),
    };
    let (w, h) = (rng.random_range(1.0..100.0), rng.random_range(1.0..100.0));
    let points: Vec<PlanarPoint> = (0..n)
        .map(|_| PlanarPoint::new(w * rng.random::<f64>(), h * rng.random::<f64>()))
        .collect();
    let phi = phi_map(band)?;
    let image: Vec<PlanarPoint> = points.iter().map(|p| phi.apply(*p)).collect();
    let direct = longest_chain_bruteforce(&points, |p, q| order_holds(*p, *q, band))?;
    let coupled = longest_chain_bruteforce(&image, |p, q| p.dominated_by(q))?;
    Ok(direct == coupled)
}

/// Compares the band-order chain length with the dominance chain length of
/// the image, both by quadratic DP, on random clouds of at most
/// `n_points_max` points.
pub fn run_coupling_check(n_trials: usize, n_points_max: usize, seed: u64) -> Result<CouplingOutcome> {
    if n_points_max > 300 {
        return Err(invalid(format!("n_points_max must be <= 300, got {n_points_max}")));
    }
    let out = replicate(n_trials, |i| child_seed(seed, i as u64), |i, s| coupling_trial(i, n_points_max, s));
    let mut failing = Vec::new();
    for (i, _, ok) in out {
        if !ok? {
            failing.push(i);
        }
    }
    Ok(CouplingOutcome {
        trials: n_trials,
        passes: n_trials - failing.len(),
        fails: failing.len(),
        failing,
    })
}

/// Source and sink increments over `[w, 2w]` from the base point `(w, w)`.
///
/// Each replicate draws a unit-intensity cloud on `[0, 2w]^2` with sources
/// and sinks, and records the source increment (Poisson with mean
/// `lambda w`) and the sink increment (Poisson with mean `w / lambda`).
pub fn run_stationarity(lambda: f64, window: f64, reps: usize, seed: u64) -> Result<ExperimentReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if !(window > 0.0 && window.is_finite()) {
        return Err(invalid(format!("window must be positive, got {window}")));
    }
    if reps == 0 {
        return Err(invalid("reps must be >= 1"));
    }
    let side = 2.0 * window;
    let out = replicate(
        reps,
        |r| child_seed(seed, r as u64),
        |_, s| -> Result<(f64, f64)> {
            let cloud = sample_poisson_rect(&Rect::origin(side, side)?, 1.0, child_seed(s, 0))?;
            let ss = sample_sources_sinks(side, side, lambda, child_seed(s, 1))?;
            let s1 = boundary_increment_sources(&cloud, &ss, window, side, window)?;
            let s2 = boundary_increment_sinks(&cloud, &ss, window, window, side)?;
            Ok((s1 as f64, s2 as f64))
        },
    );
    let mut report = ExperimentReport::new("stationarity", "source_increment", &["source_increment", "sink_increment"]);
    let mut s1 = Vec::with_capacity(reps);
    let mut s2 = Vec::with_capacity(reps);
    for (r, s, v) in out {
        let (a, b) = v?;
        s1.push(a);
        s2.push(b);
        report.rows.push(ReplicateRow { t: window, replicate: r, child_seed: s, values: vec![a, b] });
    }
    let (m1, m2) = (mean(&s1), mean(&s2));
    let (v1, v2) = (variance(&s1), variance(&s2));
    let corr = correlation(&s1, &s2);
    report.cells.push(
        CellStats::new(window, &s1)
            .with("sink_mean", m2)
            .with("sink_var", v2)
            .with("source_var", v1)
            .with("correlation", corr),
    );
    report.scalars.insert("lambda".into(), lambda);
    if reps < 2 {
        report.notes.push("insufficient-data: variances need at least 2 replicates".into());
        return Ok(report);
    }
    let n = reps as f64;
    let mean_verdict = |name: &str, m: f64, target: f64| {
        let se = (target / n).sqrt();
        Verdict::new(
            name,
            (m - target).abs() <= 3.0 * se,
            m,
            format!("within 3 standard errors ({:.4}) of the Poisson mean {target}", 3.0 * se),
        )
    };
    report.verdicts.push(mean_verdict("source_mean", m1, lambda * window));
    report.verdicts.push(mean_verdict("sink_mean", m2, window / lambda));
    let half = 4.0 * (2.0 / n).sqrt();
    for (name, v, m) in [("source_dispersion", v1, m1), ("sink_dispersion", v2, m2)] {
        let ratio = v / m;
        report.verdicts.push(Verdict::new(
            name,
            (ratio - 1.0).abs() <= half,
            ratio,
            format!("variance/mean within {half:.4} of 1 (Poisson; 4 standard errors of the sample variance)"),
        ));
    }
    let cap = (300.0 / n.sqrt()).ceil() / 100.0;
    report.verdicts.push(Verdict::new(
        "independence",
        corr.abs() <= cap,
        corr,
        format!("|correlation of the two increments| <= {cap} (3/sqrt(reps), rounded up)"),
    ));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingOutcome {
    pub retained: usize,
    pub skipped_zero: usize,
    pub probes: usize,
    pub violations: usize,
}

const CROSSING_SIDE: f64 = 20.0;
const CROSSING_PROBES: usize = 20;

enum Attempt {
    Skipped,
    Checked { violations: usize },
}

fn crossing_attempt(seed: u64) -> Result<Attempt> {
    let mut rng = rng_from_seed(seed);
    let lambda = log_uniform(&mut rng, 0.5, 2.0);
    let cloud = sample_poisson_rect(&Rect::origin(CROSSING_SIDE, CROSSING_SIDE)?, 1.0, rng.random())?;
    let ss = sample_sources_sinks(CROSSING_SIDE, CROSSING_SIDE, lambda, rng.random())?;
    let x = rng.random_range(1.0..CROSSING_SIDE - 1.0);
    let t = rng.random_range(1.0..CROSSING_SIDE);
    if z_statistic(&cloud, &ss, x, t) <= 0.0 {
        return Ok(Attempt::Skipped);
    }
    let probes: Vec<(f64, f64)> = (0..CROSSING_PROBES)
        .map(|_| (rng.random_range(x..=CROSSING_SIDE), rng.random_range(0.0..=t)))
        .collect();
    let margins = match crossing_margins(&cloud, &ss, x, t, &probes) {
        Err(Error::HypothesisNotMet) => return Ok(Attempt::Skipped),
        other => other?,
    };
    Ok(Attempt::Checked { violations: margins.iter().filter(|&&m| m < 0).count() })
}

/// Draws configurations until `n_configs` have `Z > 0`, then checks the
/// crossing inequality at 20 random probes in each.
pub fn run_crossing(n_configs: usize, seed: u64) -> Result<CrossingOutcome> {
    let mut out = CrossingOutcome { retained: 0, skipped_zero: 0, probes: 0, violations: 0 };
    let batch = n_configs.max(64);
    let limit = 50 * batch;
    let mut next = 0usize;
    while out.retained < n_configs {
        if next >= limit {
            return Err(Error::Internal(format!("only {} of {n_configs} configurations had Z > 0", out.retained)));
        }
        let attempts: Vec<Result<Attempt>> = (next..next + batch)
            .into_par_iter()
            .map(|k| crossing_attempt(child_seed(seed, k as u64)))
            .collect();
        next += batch;
        for a in attempts {
            if out.retained == n_configs {
                break;
            }
            match a? {
                Attempt::Skipped => out.skipped_zero += 1,
                Attempt::Checked { violations } => {
                    out.retained += 1;
                    out.probes += CROSSING_PROBES;
                    out.violations += violations;
                }
            }
        }
    }
    Ok(out)
}
