use super::{cell_seed, replicate, window_length, CellStats, ExperimentReport, ExperimentSpec, ReplicateRow, Verdict};
use crate::error::Result;
use crate::geometry::limiting_shape;

/// Mean of `L/t` per grid value, compared with the limiting shape at the
/// largest `t`.
///
/// Extras: `intensity` (default 1; the target scales by its square root),
/// `tol` (relative tolerance, default 0.05) or `tol_abs`.
pub fn run_shape(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let f = limiting_shape(spec.a, spec.b, spec.band)?;
    let target = f * spec.intensity().sqrt();
    let mut report = ExperimentReport::new("shape", "L/t", &["L", "L_over_t"]);
    for (i, &t) in spec.t_grid.iter().enumerate() {
        let out = replicate(
            spec.reps,
            |r| cell_seed(spec.master_seed, i, r),
            |_, seed| window_length(spec, t, seed),
        );
        let mut ratios = Vec::with_capacity(spec.reps);
        for (r, seed, len) in out {
            let l = len? as f64;
            ratios.push(l / t);
            report.rows.push(ReplicateRow { t, replicate: r, child_seed: seed, values: vec![l, l / t] });
        }
        report.cells.push(CellStats::new(t, &ratios).with("target", target));
    }
    let last = report.cells.last().expect("non-empty grid");
    let err = (last.mean - target).abs();
    let (ok, band) = match spec.extras.get("tol_abs") {
        Some(&tol) => (err <= tol, format!("|mean L/t - {target:.6}| <= {tol} (absolute tolerance)")),
        None => {
            let tol = spec.extra("tol", 0.05);
            (
                err <= tol * target,
                format!("|mean L/t - {target:.6}| <= {tol} x target (relative tolerance; finite-t bias plus Monte Carlo error)"),
            )
        }
    };
    report.verdicts.push(Verdict::new("shape_limit", ok, last.mean, band));
    report.scalars.insert("target".into(), target);
    report.notes.push(format!("case: {}", spec.case().name()));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SlopeBand;

    #[test]
    fn zero_intensity_gives_zero() {
        let spec = ExperimentSpec::new(1.0, 1.0, SlopeBand::new(0.5, 2.0).unwrap(), vec![50.0], 4, 3)
            .with("intensity", 0.0);
        let rep = run_shape(&spec).unwrap();
        assert_eq!(rep.cells[0].mean, 0.0);
        assert_eq!(rep.rows.len(), 4);
    }

    #[test]
    fn deterministic_and_zero_tolerance_fails() {
        let spec = ExperimentSpec::new(1.0, 1.0, SlopeBand::classical(), vec![20.0, 40.0], 5, 9)
            .with("tol", 0.0);
        let a = run_shape(&spec).unwrap();
        let b = run_shape(&spec).unwrap();
        assert_eq!(a, b);
        assert!(!a.all_pass());
        assert_eq!(a.column(40.0, "L").len(), 5);
    }
}
