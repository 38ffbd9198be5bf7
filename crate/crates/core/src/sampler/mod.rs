//! Seeded sampling of the planar Poisson process and of the boundary
//! source/sink processes.

mod poisson;

pub use poisson::sample_poisson_count;

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{ConvexPolygon, Parallelogram, PlanarPoint, Rect};

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent seed for replicate `index` of a run seeded with `master`.
pub fn child_seed(master: u64, index: u64) -> u64 {
    splitmix_finalize(master ^ index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Rect(Rect),
    Parallelogram(Parallelogram),
    Polygon(ConvexPolygon),
}

impl Domain {
    pub fn contains(&self, p: &PlanarPoint) -> bool {
        match self {
            Domain::Rect(r) => r.contains(p),
            Domain::Parallelogram(par) => par.contains(p, 0.0),
            Domain::Polygon(poly) => poly.contains(p, 0.0),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::Rect(r) => r.area(),
            Domain::Parallelogram(par) => par.area(),
            Domain::Polygon(poly) => poly.area(),
        }
    }
}

/// Points sorted by `(x, y)`, tagged with where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<PlanarPoint>,
    pub domain: Domain,
    pub intensity: f64,
    pub seed: u64,
}

impl PointCloud {
    /// Wraps existing points, sorting them.
    pub fn new(mut points: Vec<PlanarPoint>, domain: Domain, intensity: f64, seed: u64) -> Self {
        points.sort_unstable_by(PlanarPoint::lex_cmp);
        Self {
            points,
            domain,
            intensity,
            seed,
        }
    }

    /// Hand-built cloud whose domain is the bounding box of the points.
    pub fn from_points(points: Vec<PlanarPoint>) -> Self {
        let mut r = Rect {
            x0: 0.0,
            x1: 0.0,
            y0: 0.0,
            y1: 0.0,
        };
        if let Some(first) = points.first() {
            r = Rect {
                x0: first.x,
                x1: first.x,
                y0: first.y,
                y1: first.y,
            };
        }
        for p in &points {
            r.x0 = r.x0.min(p.x);
            r.x1 = r.x1.max(p.x);
            r.y0 = r.y0.min(p.y);
            r.y1 = r.y1.max(p.y);
        }
        Self::new(points, Domain::Rect(r), 1.0, 0)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sub-cloud inside `rect` (still sorted).
    pub fn restrict_to_rect(&self, rect: &Rect) -> PointCloud {
        let lo = self.points.partition_point(|p| p.x < rect.x0);
        let hi = self.points.partition_point(|p| p.x <= rect.x1);
        let points = self.points[lo..hi]
            .iter()
            .filter(|p| p.y >= rect.y0 && p.y <= rect.y1)
            .copied()
            .collect();
        PointCloud {
            points,
            domain: Domain::Rect(*rect),
            intensity: self.intensity,
            seed: self.seed,
        }
    }

    /// Sub-cloud inside `poly` (still sorted).
    pub fn restrict_to_polygon(&self, poly: &ConvexPolygon) -> PointCloud {
        let bb = poly.bounding_rect();
        let lo = self.points.partition_point(|p| p.x < bb.x0);
        let hi = self.points.partition_point(|p| p.x <= bb.x1);
        let points = self.points[lo..hi]
            .iter()
            .filter(|p| poly.contains(p, 0.0))
            .copied()
            .collect();
        PointCloud {
            points,
            domain: Domain::Polygon(poly.clone()),
            intensity: self.intensity,
            seed: self.seed,
        }
    }
}

fn check_intensity(intensity: f64) -> Result<()> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(invalid(format!("intensity must be finite and >= 0, got {intensity}")));
    }
    Ok(())
}

fn uniform_in_rect<R: Rng>(rng: &mut R, rect: &Rect, n: u64, out: &mut Vec<PlanarPoint>) {
    let (w, h) = (rect.width(), rect.height());
    out.extend((0..n).map(|_| {
        let ux: f64 = rng.random();
        let uy: f64 = rng.random();
        PlanarPoint::new(rect.x0 + w * ux, rect.y0 + h * uy)
    }));
}

/// Homogeneous Poisson process of the given intensity on `rect`.
pub fn sample_poisson_rect(rect: &Rect, intensity: f64, seed: u64) -> Result<PointCloud> {
    let points = poisson_rect_points(rect, intensity, seed)?;
    Ok(PointCloud::new(points, Domain::Rect(*rect), intensity, seed))
}

/// The points of [`sample_poisson_rect`] in generation order.
pub(crate) fn poisson_rect_points(rect: &Rect, intensity: f64, seed: u64) -> Result<Vec<PlanarPoint>> {
    check_intensity(intensity)?;
    let mut rng = rng_from_seed(seed);
    let n = sample_poisson_count(&mut rng, intensity * rect.area());
    let mut points = Vec::with_capacity(n as usize);
    uniform_in_rect(&mut rng, rect, n, &mut points);
    Ok(points)
}

fn sample_by_rejection(
    poly: &ConvexPolygon,
    domain: Domain,
    intensity: f64,
    seed: u64,
) -> Result<PointCloud> {
    check_intensity(intensity)?;
    if poly.area() <= f64::EPSILON * poly.diameter().powi(2) {
        return Ok(PointCloud::new(Vec::new(), domain, intensity, seed));
    }
    // Thinning a Poisson process on the bounding box is again Poisson.
    let bb = poly.bounding_rect();
    let mut rng = rng_from_seed(seed);
    let n = sample_poisson_count(&mut rng, intensity * bb.area());
    let mut points = Vec::with_capacity((n as f64 * poly.area() / bb.area() * 1.1) as usize + 16);
    for _ in 0..n {
        let ux: f64 = rng.random();
        let uy: f64 = rng.random();
        let p = PlanarPoint::new(bb.x0 + bb.width() * ux, bb.y0 + bb.height() * uy);
        if poly.contains(&p, 0.0) {
            points.push(p);
        }
    }
    Ok(PointCloud::new(points, domain, intensity, seed))
}

/// Poisson process on a convex polygon by rejection from its bounding box.
pub fn sample_poisson_polygon(poly: &ConvexPolygon, intensity: f64, seed: u64) -> Result<PointCloud> {
    sample_by_rejection(poly, Domain::Polygon(poly.clone()), intensity, seed)
}

pub fn sample_poisson_parallelogram(par: &Parallelogram, intensity: f64, seed: u64) -> Result<PointCloud> {
    sample_by_rejection(&par.to_polygon(), Domain::Parallelogram(*par), intensity, seed)
}

/// Sources on the x-axis and sinks on the y-axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSinkSample {
    pub sources: Vec<f64>,
    pub sinks: Vec<f64>,
    pub lambda: f64,
}

impl SourceSinkSample {
    pub fn empty(lambda: f64) -> Self {
        Self {
            sources: Vec::new(),
            sinks: Vec::new(),
            lambda,
        }
    }
}

fn sorted_uniforms<R: Rng>(rng: &mut R, n: u64, len: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| len * rng.random::<f64>()).collect();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Sources at intensity `lambda` on `[0, x_max]`, sinks at `1/lambda` on `[0, y_max]`.
pub fn sample_sources_sinks(x_max: f64, y_max: f64, lambda: f64, seed: u64) -> Result<SourceSinkSample> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if !(x_max >= 0.0 && y_max >= 0.0 && x_max.is_finite() && y_max.is_finite()) {
        return Err(invalid("source/sink ranges must be finite and >= 0"));
    }
    let mut rng = rng_from_seed(seed);
    let ns = sample_poisson_count(&mut rng, lambda * x_max);
    let sources = sorted_uniforms(&mut rng, ns, x_max);
    let nk = sample_poisson_count(&mut rng, y_max / lambda);
    let sinks = sorted_uniforms(&mut rng, nk, y_max);
    Ok(SourceSinkSample { sources, sinks, lambda })
}

/// `x,y` CSV, one point per line, 17 significant digits.
pub fn write_cloud_csv<W: Write>(cloud: &PointCloud, mut out: W) -> io::Result<()> {
    writeln!(out, "x,y")?;
    for p in &cloud.points {
        writeln!(out, "{:.16e},{:.16e}", p.x, p.y)?;
    }
    Ok(())
}
