//! Monte Carlo checks of the large-t behaviour of chain lengths.
//!
//! Every run is a pure function of its [`ExperimentSpec`]: replicate `r` at
//! grid index `i` draws from `child_seed(child_seed(master, i), r)` (or from
//! `child_seed(master, r)` when one realization is shared across the grid),
//! and results are gathered by index so the worker pool never changes the
//! output.

mod checks;
mod fluctuation;
mod gap;
mod localization;
mod shape;
mod wandering;

pub use checks::{
    run_coupling_check, run_crossing, run_stationarity, CouplingOutcome, CrossingOutcome,
};
pub use fluctuation::{run_fluctuation, run_noncentral_drift};
pub use gap::run_parallelogram_gap;
pub use localization::{run_localization, strip_deviation, LocalizationStat, StripOffset};
pub use shape::run_shape;
pub use wandering::run_wandering;

pub use crate::stats::ScalingFit;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::{lnds_length, longest_chain_length};
use crate::error::{invalid, Result};
use crate::geometry::{classify, order_embedding, CaseLabel, PlanarPoint, Rect, SlopeBand};
use crate::sampler::{child_seed, poisson_rect_points, sample_poisson_rect, PointCloud};
use crate::stats::Summary;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub a: f64,
    pub b: f64,
    pub band: SlopeBand,
    pub t_grid: Vec<f64>,
    pub reps: usize,
    pub master_seed: u64,
    /// Named scalar knobs (`delta`, `tol`, `intensity`, ...).
    pub extras: BTreeMap<String, f64>,
}

impl ExperimentSpec {
    pub fn new(a: f64, b: f64, band: SlopeBand, t_grid: Vec<f64>, reps: usize, master_seed: u64) -> Self {
        Self {
            a,
            b,
            band,
            t_grid,
            reps,
            master_seed,
            extras: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    pub fn extra(&self, key: &str, default: f64) -> f64 {
        self.extras.get(key).copied().unwrap_or(default)
    }

    pub fn case(&self) -> CaseLabel {
        classify(self.a, self.b, self.band)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0 && self.a.is_finite() && self.b.is_finite()) {
            return Err(invalid("a and b must be positive"));
        }
        if self.reps == 0 {
            return Err(invalid("reps must be >= 1"));
        }
        if self.t_grid.is_empty() {
            return Err(invalid("t grid must not be empty"));
        }
        if self.t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(invalid("t values must be positive"));
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("t grid must be strictly ascending"));
        }
        if self.intensity() < 0.0 || !self.intensity().is_finite() {
            return Err(invalid("intensity must be >= 0"));
        }
        Ok(())
    }

    pub fn intensity(&self) -> f64 {
        self.extra("intensity", 1.0)
    }

    fn window(&self, t: f64) -> Rect {
        Rect {
            x0: 0.0,
            x1: self.a * t,
            y0: 0.0,
            y1: self.b * t,
        }
    }

    fn max_t(&self) -> f64 {
        *self.t_grid.last().expect("validated non-empty")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    /// The acceptance band and where it comes from.
    pub band: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, value: f64, band: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            value,
            band: band.into(),
        }
    }
}

/// Statistics of the run's primary statistic at one grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub t: f64,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
    pub iqr: f64,
    /// Secondary per-cell numbers, keyed by name.
    pub extra: BTreeMap<String, f64>,
}

impl CellStats {
    fn new(t: f64, xs: &[f64]) -> Self {
        let s = Summary::of(xs);
        Self {
            t,
            n: s.n,
            mean: s.mean,
            sd: s.sd,
            median: s.median,
            iqr: s.iqr,
            extra: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub t: f64,
    pub replicate: usize,
    pub child_seed: u64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    /// Name of the statistic summarized in `cells`.
    pub statistic: String,
    /// Names of `ReplicateRow::values`.
    pub columns: Vec<String>,
    pub cells: Vec<CellStats>,
    pub fit: Option<ScalingFit>,
    pub verdicts: Vec<Verdict>,
    pub rows: Vec<ReplicateRow>,
    pub notes: Vec<String>,
    pub scalars: BTreeMap<String, f64>,
}

impl ExperimentReport {
    fn new(name: &str, statistic: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            statistic: statistic.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            cells: Vec::new(),
            fit: None,
            verdicts: Vec::new(),
            rows: Vec::new(),
            notes: Vec::new(),
            scalars: BTreeMap::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn cell(&self, t: f64) -> Option<&CellStats> {
        self.cells.iter().find(|c| c.t == t)
    }

    /// Column `name` of the replicate table restricted to grid value `t`.
    pub fn column(&self, t: f64, name: &str) -> Vec<f64> {
        let Some(k) = self.columns.iter().position(|c| c == name) else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter(|r| r.t == t)
            .map(|r| r.values[k])
            .collect()
    }
}

/// Runs `f(replicate, seed)` for every replicate, in parallel, ordered by index.
fn replicate<T, F>(reps: usize, seed_of: impl Fn(usize) -> u64 + Sync, f: F) -> Vec<(usize, u64, T)>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync + Send,
{
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = seed_of(r);
            (r, s, f(r, s))
        })
        .collect()
}

fn cell_seed(master: u64, grid_index: usize, rep: usize) -> u64 {
    child_seed(child_seed(master, grid_index as u64), rep as u64)
}

/// Length of the longest band-order chain, without path bookkeeping.
pub fn lipschitz_length(points: &[PlanarPoint], band: SlopeBand) -> usize {
    if band.is_classical() {
        return longest_chain_length(points);
    }
    let m = order_embedding(band);
    let mut img: Vec<PlanarPoint> = points.iter().map(|p| m.apply(*p)).collect();
    img.sort_unstable_by(PlanarPoint::lex_cmp);
    longest_chain_length(&img)
}

fn sample_window(spec: &ExperimentSpec, t: f64, seed: u64) -> Result<PointCloud> {
    sample_poisson_rect(&spec.window(t), spec.intensity(), seed)
}

/// Band-order chain length of the window at `t`, skipping the cloud's own sort.
fn window_length(spec: &ExperimentSpec, t: f64, seed: u64) -> Result<usize> {
    let pts = poisson_rect_points(&spec.window(t), spec.intensity(), seed)?;
    let m = order_embedding(spec.band);
    let mut img: Vec<PlanarPoint> = pts.into_iter().map(|p| m.apply(p)).collect();
    img.sort_unstable_by(PlanarPoint::lex_cmp);
    Ok(longest_chain_length(&img))
}

/// One realization on the largest window as `(image, original)` pairs,
/// sorted by image, so every smaller window is a filter of the same list.
fn nested_sample(spec: &ExperimentSpec, seed: u64) -> Result<Vec<(PlanarPoint, PlanarPoint)>> {
    let pts = poisson_rect_points(&spec.window(spec.max_t()), spec.intensity(), seed)?;
    let m = order_embedding(spec.band);
    let mut v: Vec<(PlanarPoint, PlanarPoint)> = pts.into_iter().map(|p| (m.apply(p), p)).collect();
    v.sort_unstable_by(|a, b| a.0.lex_cmp(&b.0));
    Ok(v)
}

fn nested_length(sample: &[(PlanarPoint, PlanarPoint)], window: &Rect) -> usize {
    lnds_length(sample.iter().filter(|(_, p)| window.contains(p)).map(|(q, _)| q.y))
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] > w[1])
}

fn nonincreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] >= w[1])
}
