use serde::{Deserialize, Serialize};

use super::{PlanarPoint, Rect};
use crate::error::{invalid, Error, Result};

/// A strictly convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<PlanarPoint>,
}

fn cross(o: PlanarPoint, a: PlanarPoint, b: PlanarPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

impl ConvexPolygon {
    /// Accepts either orientation; clockwise input is reversed.
    pub fn new(mut vertices: Vec<PlanarPoint>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(invalid("a polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(invalid("polygon vertices must be finite"));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let turn = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if turn <= 0.0 {
                return Err(invalid("polygon vertices are not in strictly convex position"));
            }
        }
        Ok(Self { vertices })
    }

    pub fn from_rect(r: &Rect) -> Result<Self> {
        Self::new(r.corners().to_vec())
    }

    pub fn vertices(&self) -> &[PlanarPoint] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn bounding_rect(&self) -> Rect {
        let mut r = Rect {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for p in &self.vertices {
            r.x0 = r.x0.min(p.x);
            r.x1 = r.x1.max(p.x);
            r.y0 = r.y0.min(p.y);
            r.y1 = r.y1.max(p.y);
        }
        r
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d = d.max((q.x - p.x).hypot(q.y - p.y));
            }
        }
        d
    }

    /// Half-plane test; `tol` is an absolute distance slack.
    pub fn contains(&self, p: &PlanarPoint, tol: f64) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = (b.x - a.x).hypot(b.y - a.y);
            cross(a, b, *p) >= -tol * len
        })
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| (b.x - a.x).hypot(b.y - a.y)).sum()
    }

    fn edges(&self) -> impl Iterator<Item = (PlanarPoint, PlanarPoint)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

fn signed_area(v: &[PlanarPoint]) -> f64 {
    let n = v.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    twice / 2.0
}

/// Arclength parametrization of a polygon boundary.
struct Boundary<'a> {
    vertices: &'a [PlanarPoint],
    cumulative: Vec<f64>,
    perimeter: f64,
}

impl<'a> Boundary<'a> {
    fn new(poly: &'a ConvexPolygon) -> Self {
        let mut cumulative = Vec::with_capacity(poly.vertices.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for (a, b) in poly.edges() {
            acc += (b.x - a.x).hypot(b.y - a.y);
            cumulative.push(acc);
        }
        Self {
            vertices: &poly.vertices,
            cumulative,
            perimeter: acc,
        }
    }

    fn point(&self, s: f64) -> PlanarPoint {
        let s = s.rem_euclid(self.perimeter);
        let n = self.vertices.len();
        let i = match self.cumulative.partition_point(|&c| c <= s) {
            0 => 0,
            k => (k - 1).min(n - 1),
        };
        let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
        let len = self.cumulative[i + 1] - self.cumulative[i];
        let f = if len > 0.0 { (s - self.cumulative[i]) / len } else { 0.0 };
        PlanarPoint::new(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexRectangle {
    /// `2 sqrt((u' - u)(v' - v))` at the best pair found.
    pub value: f64,
    pub lower: PlanarPoint,
    pub upper: PlanarPoint,
}

impl ConvexRectangle {
    pub fn area(&self) -> f64 {
        (self.upper.x - self.lower.x) * (self.upper.y - self.lower.y)
    }
}

/// Signed objective: the box area for dominating pairs, a negative
/// violation measure otherwise (keeps line searches from plateauing at 0).
fn pair_objective(lo: PlanarPoint, hi: PlanarPoint) -> f64 {
    let dx = hi.x - lo.x;
    let dy = hi.y - lo.y;
    if dx >= 0.0 && dy >= 0.0 {
        dx * dy
    } else {
        dx.min(0.0) + dy.min(0.0)
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Best `2 sqrt((u'-u)(v'-v))` over pairs `(u, v) <= (u', v')` of points of
/// the polygon.
///
/// Both points of an optimal pair sit on the boundary (push the lower point
/// down-left and the upper one up-right until they hit it), so the search
/// runs over pairs of boundary points: a grid of `resolution` arclength
/// samples plus the vertices, then 20 rounds of coordinatewise golden-section
/// refinement within one grid step. The result is always attained by an
/// actual pair, hence a lower bound on the supremum.
pub fn max_rectangle_convex(poly: &ConvexPolygon, resolution: usize) -> Result<ConvexRectangle> {
    if resolution < 8 {
        return Err(invalid(format!("resolution must be >= 8, got {resolution}")));
    }
    let boundary = Boundary::new(poly);
    let per = boundary.perimeter;
    let mut params: Vec<f64> = (0..resolution)
        .map(|i| per * i as f64 / resolution as f64)
        .chain(boundary.cumulative[..poly.vertices.len()].iter().copied())
        .collect();
    params.sort_by(f64::total_cmp);
    params.dedup();
    let pts: Vec<PlanarPoint> = params.iter().map(|&s| boundary.point(s)).collect();

    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (i, lo) in pts.iter().enumerate() {
        for (j, hi) in pts.iter().enumerate() {
            let v = pair_objective(*lo, *hi);
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    if best.0 <= 0.0 {
        return Err(Error::EmptyFeasible);
    }

    let step = per / resolution as f64;
    let (mut s_lo, mut s_hi) = (params[best.1], params[best.2]);
    let mut value = best.0;
    for _ in 0..20 {
        let (s, v) = golden_max(
            |s| pair_objective(boundary.point(s), boundary.point(s_hi)),
            s_lo - step,
            s_lo + step,
        );
        if v > value {
            s_lo = s;
            value = v;
        }
        let (s, v) = golden_max(
            |s| pair_objective(boundary.point(s_lo), boundary.point(s)),
            s_hi - step,
            s_hi + step,
        );
        if v > value {
            s_hi = s;
            value = v;
        }
    }
    let (lower, upper) = (boundary.point(s_lo), boundary.point(s_hi));
    let area = pair_objective(lower, upper);
    Ok(ConvexRectangle {
        value: 2.0 * area.sqrt(),
        lower,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{max_inscribed_rectangle, Parallelogram};

    fn pt(x: f64, y: f64) -> PlanarPoint {
        PlanarPoint::new(x, y)
    }

    #[test]
    fn polygon_validation() {
        assert!(ConvexPolygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0)]).is_err());
        // collinear
        assert!(ConvexPolygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(2.0, 0.0)]).is_err());
        // clockwise accepted and reoriented
        let p = ConvexPolygon::new(vec![pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 0.0)]).unwrap();
        assert!(p.area() > 0.0);
        // non-convex
        let bad = vec![pt(0.0, 0.0), pt(2.0, 0.0), pt(1.0, 0.2), pt(2.0, 2.0), pt(0.0, 2.0)];
        assert!(ConvexPolygon::new(bad).is_err());
    }

    #[test]
    fn unit_square_gives_two() {
        let sq = ConvexPolygon::from_rect(&Rect::origin(1.0, 1.0).unwrap()).unwrap();
        let best = max_rectangle_convex(&sq, 16).unwrap();
        assert!((best.value - 2.0).abs() < 1e-12);
        assert!(max_rectangle_convex(&sq, 4).is_err());
    }

    #[test]
    fn triangle_against_dense_grid() {
        let tri = ConvexPolygon::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)]).unwrap();
        let best = max_rectangle_convex(&tri, 64).unwrap();
        // dense lattice oracle over lower corners (u, v) and upper corners on u'+v' = 1
        let n = 4096;
        let mut oracle: f64 = 0.0;
        for i in 0..=n {
            let up = i as f64 / n as f64;
            let vp = 1.0 - up;
            oracle = oracle.max(up * vp);
        }
        assert!((best.area() - oracle).abs() < 1e-7);
        assert!((best.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn parallelogram_matches_closed_form() {
        for (c, cp, mu) in [(1.0, 1.0, 2.0), (11.0 / 3.0, 19.0 / 3.0, 2.0), (1.0, 5.0, 2.0), (0.3, 2.0, 3.5)] {
            let par = Parallelogram::from_sides(c, cp, mu).unwrap();
            let exact = max_inscribed_rectangle(&par).area;
            let num = max_rectangle_convex(&par.to_polygon(), 512).unwrap();
            assert!(((num.area() - exact) / exact).abs() < 1e-6, "{c} {cp} {mu}: {} vs {exact}", num.area());
            assert!(num.lower.dominated_by(&num.upper));
        }
    }
}
