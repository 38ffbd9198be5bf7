use super::wandering::dominance_frame;
use super::{nested_sample, nonincreasing, replicate, CellStats, ExperimentReport, ExperimentSpec, ReplicateRow, Verdict};
use crate::chains::lnds_length;
use crate::error::{Error, Result};
use crate::geometry::{CaseLabel, Rect};
use crate::sampler::child_seed;
use crate::stats::median;

/// Excess of the parallelogram's longest chain over that of its optimal
/// rectangle, on the same realization.
///
/// The window `[0, at] x [0, bt]` under the band order is the parallelogram
/// under dominance, and its optimal rectangle is `[0, sigma t] x [0, rho t]`.
/// One realization per replicate on the largest window is restricted to the
/// smaller ones.
pub fn run_parallelogram_gap(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let case = spec.case();
    if case != CaseLabel::Central || !spec.band.is_finite() {
        return Err(Error::WrongCase { expected: "Central with a finite band", actual: case });
    }
    let (_, sigma, rho) = dominance_frame(spec.a, spec.b, spec.band)
        .ok_or_else(|| Error::Internal("no dominance frame for a finite band".into()))?;
    let out = replicate(
        spec.reps,
        |r| child_seed(spec.master_seed, r as u64),
        |_, seed| -> Result<Vec<(f64, f64)>> {
            let sample = nested_sample(spec, seed)?;
            Ok(spec
                .t_grid
                .iter()
                .map(|&t| {
                    let window = spec.window(t);
                    let rect = Rect { x0: 0.0, x1: sigma * t, y0: 0.0, y1: rho * t };
                    let inside = || sample.iter().filter(|(_, p)| window.contains(p)).map(|(q, _)| q);
                    let whole = lnds_length(inside().map(|q| q.y)) as f64;
                    let part = lnds_length(inside().filter(|q| rect.contains(q)).map(|q| q.y)) as f64;
                    (whole, part)
                })
                .collect())
        },
    );
    let mut report = ExperimentReport::new(
        "parallelogram_gap",
        "gap/t^(1/3)",
        &["L_parallelogram", "L_rectangle", "gap", "gap_over_cbrt_t"],
    );
    let mut per_t: Vec<Vec<f64>> = vec![Vec::new(); spec.t_grid.len()];
    let mut min_gap = f64::INFINITY;
    for (r, seed, v) in out {
        for (k, (&t, (whole, rect))) in spec.t_grid.iter().zip(v?).enumerate() {
            let gap = whole - rect;
            min_gap = min_gap.min(gap);
            per_t[k].push(gap / t.cbrt());
            report.rows.push(ReplicateRow {
                t,
                replicate: r,
                child_seed: seed,
                values: vec![whole, rect, gap, gap / t.cbrt()],
            });
        }
    }
    report.rows.sort_by(|x, y| x.t.total_cmp(&y.t).then(x.replicate.cmp(&y.replicate)));
    let medians: Vec<f64> = per_t.iter().map(|g| median(g)).collect();
    for (&t, g) in spec.t_grid.iter().zip(&per_t) {
        report.cells.push(CellStats::new(t, g));
    }
    report.scalars.insert("sigma".into(), sigma);
    report.scalars.insert("rho".into(), rho);
    report.verdicts.push(Verdict::new(
        "gap_nonnegative",
        min_gap >= 0.0,
        min_gap,
        "gap >= 0 in every replicate (the rectangle lies inside the parallelogram)",
    ));
    report.verdicts.push(Verdict::new(
        "gap_median_nonincreasing",
        nonincreasing(&medians),
        *medians.last().expect("non-empty"),
        "median gap/t^(1/3) nonincreasing in t (the gap is o(t^(1/3)) with high probability)",
    ));
    Ok(report)
}
