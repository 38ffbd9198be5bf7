//! Closed-form objects: the slope-band order, the coupling map, case
//! classification, the limiting shape and the parallelogram it induces.

mod convex;
mod rectangle;

pub use convex::{max_rectangle_convex, ConvexPolygon, ConvexRectangle};
pub use rectangle::{max_inscribed_rectangle, InscribedRectangle, TranslationFamily};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point of the plane. Coordinates are finite; they may be negative once
/// a point has been pushed through the coupling map.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const ORIGIN: PlanarPoint = PlanarPoint { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Coordinatewise (non-strict) dominance `self <= other`.
    #[inline]
    pub fn dominated_by(&self, other: &PlanarPoint) -> bool {
        self.x <= other.x && self.y <= other.y
    }

    /// Lexicographic (x, then y) comparison, the finalization order of clouds.
    #[inline]
    pub fn lex_cmp(&self, other: &PlanarPoint) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

impl From<(f64, f64)> for PlanarPoint {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// The pair of admissible slopes `alpha <= dy/dx <= beta`.
///
/// `alpha = 0` and `beta = +inf` are allowed; the band `(0, inf)` is the
/// classical coordinatewise order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeBand {
    alpha: f64,
    beta: f64,
}

impl SlopeBand {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = alpha.is_finite() && alpha >= 0.0 && !beta.is_nan() && beta > alpha;
        if !ok {
            return Err(Error::InvalidBand { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// The classical order `(0, +inf)`.
    pub const fn classical() -> Self {
        Self {
            alpha: 0.0,
            beta: f64::INFINITY,
        }
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `0 < alpha` and `beta < inf`: the coupling map is defined.
    #[inline]
    pub fn is_finite(&self) -> bool {
        self.alpha > 0.0 && self.beta.is_finite()
    }

    #[inline]
    pub fn is_extended(&self) -> bool {
        !self.is_finite()
    }

    #[inline]
    pub fn is_classical(&self) -> bool {
        self.alpha == 0.0 && self.beta.is_infinite()
    }

    /// Upper case threshold `(alpha + beta) / 2` on `b/a`.
    #[inline]
    pub fn arithmetic_mean(&self) -> f64 {
        (self.alpha + self.beta) / 2.0
    }

    /// Lower case threshold `2 / (1/beta + 1/alpha)` on `b/a`.
    #[inline]
    pub fn harmonic_mean(&self) -> f64 {
        2.0 / (1.0 / self.beta + 1.0 / self.alpha)
    }

    /// The band seen after swapping the axes.
    pub fn transposed(&self) -> Self {
        Self {
            alpha: 1.0 / self.beta,
            beta: 1.0 / self.alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    Sub,
    Central,
    Super,
}

impl CaseLabel {
    pub fn name(&self) -> &'static str {
        match self {
            CaseLabel::Sub => "sub",
            CaseLabel::Central => "central",
            CaseLabel::Super => "super",
        }
    }
}

/// Axis-parallel rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite()) {
            return Err(invalid("rectangle bounds must be finite"));
        }
        if x0 > x1 || y0 > y1 {
            return Err(invalid(format!(
                "rectangle needs x0 <= x1 and y0 <= y1, got [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    /// `[0, w] x [0, h]`.
    pub fn origin(w: f64, h: f64) -> Result<Self> {
        Self::new(0.0, w, 0.0, h)
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    #[inline]
    pub fn contains(&self, p: &PlanarPoint) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn corners(&self) -> [PlanarPoint; 4] {
        [
            PlanarPoint::new(self.x0, self.y0),
            PlanarPoint::new(self.x1, self.y0),
            PlanarPoint::new(self.x1, self.y1),
            PlanarPoint::new(self.x0, self.y1),
        ]
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            x0: self.x0 + dx,
            x1: self.x1 + dx,
            y0: self.y0 + dy,
            y1: self.y1 + dy,
        }
    }
}

/// A linear map of the plane, `(x, y) -> (m11 x + m12 y, m21 x + m22 y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        m11: 1.0,
        m12: 0.0,
        m21: 0.0,
        m22: 1.0,
    };

    #[inline]
    pub fn apply(&self, p: PlanarPoint) -> PlanarPoint {
        PlanarPoint {
            x: self.m11 * p.x + self.m12 * p.y,
            y: self.m21 * p.x + self.m22 * p.y,
        }
    }

    #[inline]
    pub fn determinant(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Internal("singular linear map".into()));
        }
        Ok(AffineMap {
            m11: self.m22 / det,
            m12: -self.m12 / det,
            m21: -self.m21 / det,
            m22: self.m11 / det,
        })
    }
}

/// Which of the three regimes `(a, b)` falls in. Ties go to `Central`.
pub fn classify(a: f64, b: f64, band: SlopeBand) -> CaseLabel {
    let ratio = b / a;
    if ratio > band.arithmetic_mean() {
        CaseLabel::Super
    } else if ratio < band.harmonic_mean() {
        CaseLabel::Sub
    } else {
        CaseLabel::Central
    }
}

fn check_box(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
        return Err(invalid(format!("box sides must be positive, got a={a}, b={b}")));
    }
    Ok(())
}

/// Almost-sure limit of `L(at, bt) / t` under the band order.
pub fn limiting_shape(a: f64, b: f64, band: SlopeBand) -> Result<f64> {
    check_box(a, b)?;
    let (alpha, beta) = (band.alpha, band.beta);
    match classify(a, b, band) {
        CaseLabel::Super => {
            // Unreachable for beta = inf: b/a would have to exceed +inf.
            if beta.is_infinite() {
                return Err(Error::Internal("super case with beta = inf".into()));
            }
            Ok(a * (beta - alpha).sqrt())
        }
        CaseLabel::Sub => {
            if alpha == 0.0 {
                return Err(Error::Internal("sub case with alpha = 0".into()));
            }
            Ok(b * (1.0 / alpha - 1.0 / beta).sqrt())
        }
        CaseLabel::Central => {
            if beta.is_infinite() {
                // limit of 2 sqrt((beta a - b)(b - a alpha) / (beta - alpha))
                Ok(2.0 * (a * (b - a * alpha)).max(0.0).sqrt())
            } else {
                let prod = ((beta * a - b) * (b - a * alpha)).max(0.0);
                Ok(2.0 * (prod / (beta - alpha)).sqrt())
            }
        }
    }
}

/// The area-preserving map sending the band order to coordinatewise dominance.
pub fn phi_map(band: SlopeBand) -> Result<AffineMap> {
    if !band.is_finite() {
        return Err(Error::DegenerateBand {
            alpha: band.alpha,
            beta: band.beta,
        });
    }
    let (alpha, beta) = (band.alpha, band.beta);
    let k = (beta * alpha).powf(0.25) / (beta - alpha).sqrt();
    Ok(AffineMap {
        m11: k * beta.sqrt(),
        m12: -k / beta.sqrt(),
        m21: -k * alpha.sqrt(),
        m22: k / alpha.sqrt(),
    })
}

/// A linear map turning `band`'s order into coordinatewise dominance for every
/// band, including extended ones. It is `phi_map` for finite bands and a shear
/// (or the identity) otherwise.
pub fn order_embedding(band: SlopeBand) -> AffineMap {
    match (band.alpha > 0.0, band.beta.is_finite()) {
        (true, true) => phi_map(band).expect("finite band"),
        // dy >= alpha dx  <=>  y - alpha x nondecreasing
        (true, false) => AffineMap {
            m11: 1.0,
            m12: 0.0,
            m21: -band.alpha,
            m22: 1.0,
        },
        // dy <= beta dx  <=>  beta x - y nondecreasing
        (false, true) => AffineMap {
            m11: band.beta,
            m12: -1.0,
            m21: 0.0,
            m22: 1.0,
        },
        (false, false) => AffineMap::IDENTITY,
    }
}

/// `p` precedes `q` in the band order.
///
/// A vertical step (`x == x'`) is admissible only when `beta = inf` and
/// `y <= y'`; in particular `p` never precedes itself under a finite band.
pub fn order_holds(p: PlanarPoint, q: PlanarPoint, band: SlopeBand) -> bool {
    let dx = q.x - p.x;
    let dy = q.y - p.y;
    if dx > 0.0 {
        dy >= band.alpha * dx && (band.beta.is_infinite() || dy <= band.beta * dx)
    } else if dx == 0.0 {
        band.beta.is_infinite() && dy >= 0.0
    } else {
        false
    }
}

/// The parallelogram with vertices `P = c(-1, mu)`, `Q = 0`, `R = c'(mu, -1)`
/// and `S = (sigma, rho)`, where `sigma = -c + c' mu` and `rho = -c' + c mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parallelogram {
    pub c: f64,
    pub cprime: f64,
    pub mu: f64,
    pub sigma: f64,
    pub rho: f64,
}

impl Parallelogram {
    pub fn from_sides(c: f64, cprime: f64, mu: f64) -> Result<Self> {
        if !(c > 0.0 && cprime > 0.0 && c.is_finite() && cprime.is_finite()) {
            return Err(invalid(format!("need c, c' > 0, got c={c}, c'={cprime}")));
        }
        if !(mu > 1.0 && mu.is_finite()) {
            return Err(invalid(format!("need mu > 1, got {mu}")));
        }
        Ok(Self {
            c,
            cprime,
            mu,
            sigma: -c + cprime * mu,
            rho: -cprime + c * mu,
        })
    }

    /// Parallelogram whose far corner is `S = (sigma, rho)`.
    pub fn from_corner(sigma: f64, rho: f64, mu: f64) -> Result<Self> {
        if !(mu > 1.0 && mu.is_finite()) {
            return Err(invalid(format!("need mu > 1, got {mu}")));
        }
        let d = mu * mu - 1.0;
        let c = (sigma + mu * rho) / d;
        let cprime = (rho + mu * sigma) / d;
        let mut par = Self::from_sides(c, cprime, mu)?;
        // keep the caller's corner bit-exact
        par.sigma = sigma;
        par.rho = rho;
        Ok(par)
    }

    pub fn p(&self) -> PlanarPoint {
        PlanarPoint::new(-self.c, self.c * self.mu)
    }

    pub fn q(&self) -> PlanarPoint {
        PlanarPoint::ORIGIN
    }

    pub fn r(&self) -> PlanarPoint {
        PlanarPoint::new(self.cprime * self.mu, -self.cprime)
    }

    pub fn s(&self) -> PlanarPoint {
        PlanarPoint::new(self.sigma, self.rho)
    }

    /// Vertices in counterclockwise order starting at `Q`.
    pub fn vertices(&self) -> [PlanarPoint; 4] {
        [self.q(), self.r(), self.s(), self.p()]
    }

    pub fn area(&self) -> f64 {
        self.c * self.cprime * (self.mu * self.mu - 1.0)
    }

    pub fn diameter(&self) -> f64 {
        let d1 = self.s();
        let (p, r) = (self.p(), self.r());
        let d2 = PlanarPoint::new(r.x - p.x, r.y - p.y);
        d1.x.hypot(d1.y).max(d2.x.hypot(d2.y))
    }

    /// Homothety of ratio `t` centred at `Q`.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            c: self.c * t,
            cprime: self.cprime * t,
            mu: self.mu,
            sigma: self.sigma * t,
            rho: self.rho * t,
        }
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon::new(self.vertices().to_vec()).expect("parallelogram is convex")
    }

    /// Membership with an absolute slack `tol` on each side.
    pub fn contains(&self, p: &PlanarPoint, tol: f64) -> bool {
        // Coordinates along the edge vectors QR and QP.
        let (r, q) = (self.r(), self.p());
        let det = r.x * q.y - r.y * q.x;
        let u = (p.x * q.y - p.y * q.x) / det;
        let v = (r.x * p.y - r.y * p.x) / det;
        let ur = tol / r.x.hypot(r.y);
        let vq = tol / q.x.hypot(q.y);
        u >= -ur && u <= 1.0 + ur && v >= -vq && v <= 1.0 + vq
    }
}

/// Image of `[0, a] x [0, b]` under the coupling map.
pub fn problem_parallelogram(a: f64, b: f64, band: SlopeBand) -> Result<Parallelogram> {
    check_box(a, b)?;
    if !band.is_finite() {
        return Err(Error::DegenerateBand {
            alpha: band.alpha,
            beta: band.beta,
        });
    }
    let (alpha, beta) = (band.alpha, band.beta);
    let root = (beta - alpha).sqrt();
    let c = alpha.powf(0.25) * beta.powf(-0.25) * b / root;
    let cprime = beta.powf(0.25) * alpha.powf(0.75) * a / root;
    let mu = (beta / alpha).sqrt();
    Parallelogram::from_sides(c, cprime, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(a: f64, b: f64) -> SlopeBand {
        SlopeBand::new(a, b).unwrap()
    }

    #[test]
    fn band_validation() {
        assert!(SlopeBand::new(2.0, 1.0).is_err());
        assert!(SlopeBand::new(1.0, 1.0).is_err());
        assert!(SlopeBand::new(-0.1, 1.0).is_err());
        assert!(SlopeBand::new(f64::NAN, 1.0).is_err());
        assert!(SlopeBand::new(0.0, f64::INFINITY).unwrap().is_classical());
        assert!(band(0.0, 3.0).is_extended());
        assert!(band(0.5, 2.0).is_finite());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(1.0, 1.0, band(0.5, 2.0)), CaseLabel::Central);
        assert_eq!(classify(1.0, 2.5, band(1.0, 3.0)), CaseLabel::Super);
        assert_eq!(classify(1.0, 1.2, band(1.0, 3.0)), CaseLabel::Sub);
        // ties
        assert_eq!(classify(1.0, 2.0, band(1.0, 3.0)), CaseLabel::Central);
        assert_eq!(classify(1.0, 1.5, band(1.0, 3.0)), CaseLabel::Central);
        assert_eq!(classify(1.0, 1e9, SlopeBand::classical()), CaseLabel::Central);
    }

    #[test]
    fn limiting_shape_examples() {
        let f = limiting_shape(1.0, 1.0, band(0.5, 2.0)).unwrap();
        assert!((f - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        let f = limiting_shape(1.0, 2.5, band(1.0, 3.0)).unwrap();
        assert!((f - 2f64.sqrt()).abs() < 1e-12);
        let f = limiting_shape(1.0, 1.0, SlopeBand::classical()).unwrap();
        assert_eq!(f, 2.0);
        let f = limiting_shape(2.0, 8.0, SlopeBand::classical()).unwrap();
        assert!((f - 8.0).abs() < 1e-12);
    }

    #[test]
    fn limiting_shape_half_extended_limits() {
        // beta = inf central: 2 sqrt(a (b - a alpha)); compare with a huge beta
        let exact = limiting_shape(1.0, 3.0, band(0.5, f64::INFINITY)).unwrap();
        let near = limiting_shape(1.0, 3.0, band(0.5, 1e12)).unwrap();
        assert!((exact - 2.0 * (2.5f64).sqrt()).abs() < 1e-12);
        assert!((exact - near).abs() < 1e-5);
        // beta = inf sub: b / sqrt(alpha)
        let exact = limiting_shape(1.0, 0.5, band(0.5, f64::INFINITY)).unwrap();
        assert!((exact - 0.5 / 0.5f64.sqrt()).abs() < 1e-12);
        // alpha = 0: compare with a tiny alpha
        let exact = limiting_shape(1.0, 1.0, band(0.0, 4.0)).unwrap();
        let near = limiting_shape(1.0, 1.0, band(1e-14, 4.0)).unwrap();
        assert!((exact - near).abs() < 1e-6);
        let sup = limiting_shape(1.0, 3.0, band(0.0, 4.0)).unwrap();
        assert!((sup - 2.0).abs() < 1e-12);
    }

    #[test]
    fn limiting_shape_rejects_bad_box() {
        assert!(limiting_shape(0.0, 1.0, SlopeBand::classical()).is_err());
        assert!(limiting_shape(1.0, -1.0, SlopeBand::classical()).is_err());
    }

    #[test]
    fn phi_examples() {
        let phi = phi_map(band(1.0, 4.0)).unwrap();
        let img = phi.apply(PlanarPoint::new(1.0, 1.0));
        let k = 2f64.sqrt() / 3f64.sqrt();
        assert!((img.x - k * 1.5).abs() < 1e-12);
        assert!(img.y.abs() < 1e-12);
        let img = phi.apply(PlanarPoint::new(1.0, 4.0));
        assert!(img.x.abs() < 1e-12);
        assert!((phi.determinant() - 1.0).abs() < 1e-12);
        assert!(matches!(
            phi_map(band(0.0, 2.0)),
            Err(Error::DegenerateBand { .. })
        ));
        assert!(phi_map(band(1.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn order_examples() {
        let b = band(0.5, 2.0);
        let p = PlanarPoint::new(0.1, 0.2);
        assert!(order_holds(p, PlanarPoint::new(0.3, 0.5), b));
        assert!(!order_holds(PlanarPoint::new(0.2, 0.1), PlanarPoint::new(0.3, 0.5), b));
        assert!(!order_holds(p, p, b));
        let c = SlopeBand::classical();
        assert!(order_holds(p, p, c));
        assert!(order_holds(p, PlanarPoint::new(0.1, 0.9), c));
        assert!(!order_holds(p, PlanarPoint::new(0.1, 0.9), b));
        assert!(!order_holds(PlanarPoint::new(0.3, 0.5), p, c));
    }

    #[test]
    fn problem_parallelogram_example() {
        let par = problem_parallelogram(1.0, 1.0, band(0.5, 2.0)).unwrap();
        let s = (1.0f64 / 3.0).sqrt();
        assert!((par.c - s).abs() < 1e-12);
        assert!((par.cprime - s).abs() < 1e-12);
        assert!((par.mu - 2.0).abs() < 1e-12);
        assert!((par.sigma - s).abs() < 1e-12);
        assert!((par.rho - s).abs() < 1e-12);
        let f = limiting_shape(1.0, 1.0, band(0.5, 2.0)).unwrap();
        assert!((2.0 * (par.sigma * par.rho).sqrt() - f).abs() < 1e-12);

        let par = problem_parallelogram(1.0, 2.5, band(1.0, 3.0)).unwrap();
        assert!(par.rho / par.sigma > par.mu);
    }

    #[test]
    fn parallelogram_is_phi_image_of_box() {
        let b = band(0.3, 2.7);
        let (a, bb) = (1.7, 0.9);
        let par = problem_parallelogram(a, bb, b).unwrap();
        let phi = phi_map(b).unwrap();
        let close = |u: PlanarPoint, v: PlanarPoint| (u.x - v.x).abs() < 1e-12 && (u.y - v.y).abs() < 1e-12;
        assert!(close(phi.apply(PlanarPoint::new(0.0, bb)), par.p()));
        assert!(close(phi.apply(PlanarPoint::new(a, 0.0)), par.r()));
        assert!(close(phi.apply(PlanarPoint::new(a, bb)), par.s()));
        assert!((par.area() - a * bb).abs() < 1e-12);
    }

    #[test]
    fn from_corner_recovers_sides() {
        let par = Parallelogram::from_corner(9.0, 1.0, 2.0).unwrap();
        assert!((par.c - 11.0 / 3.0).abs() < 1e-12);
        assert!((par.cprime - 19.0 / 3.0).abs() < 1e-12);
        let back = Parallelogram::from_sides(par.c, par.cprime, 2.0).unwrap();
        assert!((back.sigma - 9.0).abs() < 1e-12 && (back.rho - 1.0).abs() < 1e-12);
        assert!(Parallelogram::from_corner(-1.0, -1.0, 2.0).is_err());
    }

    #[test]
    fn embedding_matches_order_for_half_extended_bands() {
        let pts = [
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 0.2),
            PlanarPoint::new(1.0, 3.0),
            PlanarPoint::new(2.0, 9.0),
            PlanarPoint::new(0.5, 0.5),
            PlanarPoint::new(3.0, 1.0),
        ];
        for b in [band(0.5, f64::INFINITY), band(0.0, 2.0), SlopeBand::classical()] {
            let m = order_embedding(b);
            for p in pts {
                for q in pts {
                    if p == q {
                        continue;
                    }
                    assert_eq!(
                        order_holds(p, q, b),
                        m.apply(p).dominated_by(&m.apply(q)),
                        "{p:?} {q:?} {b:?}"
                    );
                }
            }
        }
    }
}
