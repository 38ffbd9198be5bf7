//! The Hammersley process with sources on the x-axis and sinks on the y-axis.

use serde::{Deserialize, Serialize};

use super::{lnds_lengths, lnds_path, longest_chain_length};
use crate::error::{invalid, Error, Result};
use crate::geometry::{PlanarPoint, Rect};
use crate::sampler::{PointCloud, SourceSinkSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryChainResult {
    pub length: usize,
    pub uses_sources: usize,
    pub uses_sinks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tag {
    Source,
    Sink,
    Cloud,
}

fn window(x: f64, y: f64) -> Rect {
    Rect {
        x0: 0.0,
        x1: x.max(0.0),
        y0: 0.0,
        y1: y.max(0.0),
    }
}

/// Sources as `(s, 0)`, sinks as `(0, t)` and cloud points, all inside
/// `[0, x] x [0, y]`, sorted by `(x, y)`.
fn merged(cloud: &PointCloud, ss: &SourceSinkSample, x: f64, y: f64) -> Vec<(PlanarPoint, Tag)> {
    let w = window(x, y);
    let inner = cloud.restrict_to_rect(&w);
    let mut v: Vec<(PlanarPoint, Tag)> = Vec::with_capacity(inner.len() + ss.sources.len() + ss.sinks.len());
    v.extend(
        ss.sinks
            .iter()
            .filter(|&&t| t >= 0.0 && t <= w.y1)
            .map(|&t| (PlanarPoint::new(0.0, t), Tag::Sink)),
    );
    v.extend(
        ss.sources
            .iter()
            .filter(|&&s| s >= 0.0 && s <= w.x1)
            .map(|&s| (PlanarPoint::new(s, 0.0), Tag::Source)),
    );
    v.extend(inner.points.into_iter().map(|p| (p, Tag::Cloud)));
    v.sort_by(|a, b| a.0.lex_cmp(&b.0));
    v
}

/// `L_lambda(x, y)`: longest non-strict dominance chain through cloud points,
/// sources and sinks of `[0, x] x [0, y]`.
pub fn length_with_boundary(cloud: &PointCloud, ss: &SourceSinkSample, x: f64, y: f64) -> BoundaryChainResult {
    let pts = merged(cloud, ss, x, y);
    let (length, path) = lnds_path(pts.iter().map(|(p, _)| p.y));
    let count = |tag| path.iter().filter(|&&i| pts[i].1 == tag).count();
    BoundaryChainResult {
        length,
        uses_sources: count(Tag::Source),
        uses_sinks: count(Tag::Sink),
    }
}

fn boundary_len(cloud: &PointCloud, ss: &SourceSinkSample, x: f64, y: f64) -> i64 {
    let pts = merged(cloud, ss, x, y);
    let ys: Vec<PlanarPoint> = pts.into_iter().map(|(p, _)| p).collect();
    longest_chain_length(&ys) as i64
}

/// `L_lambda(x1, y0) - L_lambda(x0, y0)`.
pub fn boundary_increment_sources(cloud: &PointCloud, ss: &SourceSinkSample, x0: f64, x1: f64, y0: f64) -> Result<i64> {
    if !(x0 > 0.0 && x1 >= x0) {
        return Err(invalid(format!("need 0 < x0 <= x1, got x0={x0}, x1={x1}")));
    }
    Ok(boundary_len(cloud, ss, x1, y0) - boundary_len(cloud, ss, x0, y0))
}

/// `L_lambda(x0, y1) - L_lambda(x0, y0)`.
pub fn boundary_increment_sinks(cloud: &PointCloud, ss: &SourceSinkSample, x0: f64, y0: f64, y1: f64) -> Result<i64> {
    if !(y0 > 0.0 && y1 >= y0) {
        return Err(invalid(format!("need 0 < y0 <= y1, got y0={y0}, y1={y1}")));
    }
    Ok(boundary_len(cloud, ss, x0, y1) - boundary_len(cloud, ss, x0, y0))
}

/// `Z_lambda(x, y)`: the largest `xi` in `[0, x]` such that some optimal
/// boundary path takes every source of `[0, xi]` and then a longest chain of
/// `[xi, x] x [0, y]`; `0` if there is none.
///
/// `card(sources <= xi) + L([xi, x] x [0, y])` is a step function that jumps
/// up at sources and down just after cloud abscissae, so its level set at
/// `L_lambda` is a union of intervals closed on the right at a cloud
/// abscissa or at `x`. Testing those points, the sources and 0 is exact.
pub fn z_statistic(cloud: &PointCloud, ss: &SourceSinkSample, x: f64, y: f64) -> f64 {
    let total = boundary_len(cloud, ss, x, y) as u32;
    let inner = cloud.restrict_to_rect(&window(x, y));
    let pts = &inner.points;
    // longest chain starting at each point, then suffix maxima by abscissa
    let mut starting = lnds_lengths(pts.iter().rev().map(|p| -p.y));
    starting.reverse();
    let mut suffix = vec![0u32; pts.len() + 1];
    for i in (0..pts.len()).rev() {
        suffix[i] = suffix[i + 1].max(starting[i]);
    }
    let sources: Vec<f64> = ss.sources.iter().copied().filter(|&s| s >= 0.0 && s <= x).collect();
    let objective = |xi: f64| -> u32 {
        let taken = sources.partition_point(|&s| s <= xi) as u32;
        let first = pts.partition_point(|p| p.x < xi);
        taken + suffix[first]
    };
    std::iter::once(0.0)
        .chain(sources.iter().copied())
        .chain(pts.iter().map(|p| p.x))
        .chain(std::iter::once(x.max(0.0)))
        .filter(|&xi| objective(xi) == total)
        .fold(0.0, f64::max)
}

/// A level line of `L_lambda`, as a South/East staircase from top-left to
/// bottom-right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HammersleyLine {
    pub level: usize,
    pub vertices: Vec<PlanarPoint>,
}

impl HammersleyLine {
    /// Height of the line just right of abscissa `x`, or `None` before it starts.
    pub fn height_after(&self, x: f64) -> Option<f64> {
        if self.vertices.first().is_none_or(|v| v.x > x) {
            return None;
        }
        let k = self.vertices.partition_point(|v| v.x <= x);
        Some(self.vertices[k - 1].y)
    }
}

/// Sweeps left to right keeping the sorted heights of the lines. Each
/// arrival `(x, y)` pulls the lowest line above `y` down to `y`, or opens a
/// new line from the top of the window.
pub fn hammersley_lines(cloud: &PointCloud, ss: &SourceSinkSample, x_max: f64, y_max: f64) -> Vec<HammersleyLine> {
    let pts = merged(cloud, ss, x_max, y_max);
    let mut heights: Vec<f64> = Vec::new();
    let mut lines: Vec<Vec<PlanarPoint>> = Vec::new();
    for (p, _) in &pts {
        let k = heights.partition_point(|&h| h <= p.y);
        if k == heights.len() {
            heights.push(p.y);
            lines.push(vec![PlanarPoint::new(p.x, y_max), *p]);
        } else {
            let line = &mut lines[k];
            let last = *line.last().expect("line has a vertex");
            if last.x < p.x {
                line.push(PlanarPoint::new(p.x, last.y));
            }
            line.push(*p);
            heights[k] = p.y;
        }
    }
    lines
        .into_iter()
        .enumerate()
        .map(|(i, mut vertices)| {
            let last = *vertices.last().expect("line has a vertex");
            if last.x < x_max {
                vertices.push(PlanarPoint::new(x_max, last.y));
            }
            HammersleyLine { level: i + 1, vertices }
        })
        .collect()
}

/// `(L_lambda(y, s) - L_lambda(x, t)) - (L(y, s) - L(x, t))` for each probe.
/// Fails if `Z_lambda(x, t) = 0`.
pub fn crossing_margins(
    cloud: &PointCloud,
    ss: &SourceSinkSample,
    x: f64,
    t: f64,
    probes: &[(f64, f64)],
) -> Result<Vec<i64>> {
    if z_statistic(cloud, ss, x, t) <= 0.0 {
        return Err(Error::HypothesisNotMet);
    }
    let empty = SourceSinkSample::empty(ss.lambda);
    let plain = |a: f64, b: f64| boundary_len(cloud, &empty, a, b);
    let base = plain(x, t);
    let base_lambda = boundary_len(cloud, ss, x, t);
    probes
        .iter()
        .map(|&(y, s)| {
            if !(y >= x && s <= t) {
                return Err(invalid(format!("probe ({y}, {s}) needs y >= {x} and s <= {t}")));
            }
            Ok((boundary_len(cloud, ss, y, s) - base_lambda) - (plain(y, s) - base))
        })
        .collect()
}

/// Whether `L(y, s) - L(x, t) <= L_lambda(y, s) - L_lambda(x, t)` for every probe.
pub fn crossing_check(cloud: &PointCloud, ss: &SourceSinkSample, x: f64, t: f64, probes: &[(f64, f64)]) -> Result<bool> {
    Ok(crossing_margins(cloud, ss, x, t, probes)?.into_iter().all(|m| m >= 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::longest_chain_standard;

    fn ss(sources: &[f64], sinks: &[f64]) -> SourceSinkSample {
        SourceSinkSample {
            sources: sources.to_vec(),
            sinks: sinks.to_vec(),
            lambda: 1.0,
        }
    }

    fn cloud(pts: &[(f64, f64)]) -> PointCloud {
        PointCloud::from_points(pts.iter().copied().map(PlanarPoint::from).collect())
    }

    #[test]
    fn sources_alone_chain() {
        let c = cloud(&[]);
        let r = length_with_boundary(&c, &ss(&[1.0, 2.0, 3.0, 7.0], &[]), 5.0, 5.0);
        assert_eq!(r.length, 3);
        assert_eq!(r.uses_sources, 3);
        assert_eq!(r.uses_sinks, 0);
    }

    #[test]
    fn no_boundary_equals_plain() {
        let c = cloud(&[(0.1, 0.2), (0.2, 0.1), (0.3, 0.5), (0.5, 0.4), (0.6, 0.7), (2.0, 2.0)]);
        let r = length_with_boundary(&c, &ss(&[], &[]), 1.0, 1.0);
        let w = c.restrict_to_rect(&Rect::origin(1.0, 1.0).unwrap());
        assert_eq!(r.length, longest_chain_standard(&w).length);
    }

    #[test]
    fn z_hand_built() {
        // source at 1, point (2, 1), window 3 x 2: L_lambda = 2 through source then point;
        // the defining equality holds for xi in [1, 2], so Z = 2.
        let c = cloud(&[(2.0, 1.0)]);
        let s = ss(&[1.0], &[]);
        assert_eq!(length_with_boundary(&c, &s, 3.0, 2.0).length, 2);
        assert_eq!(z_statistic(&c, &s, 3.0, 2.0), 2.0);
    }

    #[test]
    fn z_empty_is_x() {
        assert_eq!(z_statistic(&cloud(&[]), &ss(&[], &[]), 3.0, 2.0), 3.0);
    }

    #[test]
    fn z_zero_when_sinks_win() {
        // three sinks beat the single cloud point; no xi > 0 achieves 3
        let c = cloud(&[(1.0, 1.0)]);
        let s = ss(&[], &[0.5, 1.0, 1.5]);
        assert_eq!(length_with_boundary(&c, &s, 2.0, 2.0).length, 3);
        assert_eq!(z_statistic(&c, &s, 2.0, 2.0), 0.0);
        assert_eq!(crossing_check(&c, &s, 2.0, 2.0, &[(2.0, 2.0)]), Err(Error::HypothesisNotMet));
    }

    #[test]
    fn increments_of_zero_width() {
        let c = cloud(&[(1.0, 1.0), (2.0, 2.0)]);
        let s = ss(&[0.5], &[0.7]);
        assert_eq!(boundary_increment_sources(&c, &s, 1.5, 1.5, 3.0).unwrap(), 0);
        assert_eq!(boundary_increment_sinks(&c, &s, 1.5, 3.0, 3.0).unwrap(), 0);
        assert!(boundary_increment_sources(&c, &s, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn lines_for_single_point() {
        let c = cloud(&[(1.0, 2.0)]);
        let lines = hammersley_lines(&c, &ss(&[], &[]), 4.0, 5.0);
        assert_eq!(lines.len(), 1);
        let expect: Vec<PlanarPoint> = [(1.0, 5.0), (1.0, 2.0), (4.0, 2.0)]
            .into_iter()
            .map(PlanarPoint::from)
            .collect();
        assert_eq!(lines[0].vertices, expect);
        assert!(hammersley_lines(&cloud(&[]), &ss(&[], &[]), 4.0, 5.0).is_empty());
    }

    #[test]
    fn crossing_probe_at_base_is_zero() {
        let c = cloud(&[(1.0, 1.0), (2.0, 0.5), (2.5, 2.5)]);
        let s = ss(&[0.3, 0.6], &[]);
        assert!(z_statistic(&c, &s, 3.0, 3.0) > 0.0);
        assert_eq!(crossing_margins(&c, &s, 3.0, 3.0, &[(3.0, 3.0)]).unwrap(), vec![0]);
        assert!(crossing_margins(&c, &s, 3.0, 3.0, &[(2.0, 3.0)]).is_err());
    }
}
