use serde::{Deserialize, Serialize};

use super::{Parallelogram, PlanarPoint, Rect};

/// Every maximizing rectangle is `witness` translated by `u * direction`
/// for some `u` in `[0, max_shift]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationFamily {
    pub direction: PlanarPoint,
    pub max_shift: f64,
}

impl TranslationFamily {
    pub fn is_singleton(&self) -> bool {
        self.max_shift == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InscribedRectangle {
    pub area: f64,
    pub witness: Rect,
    pub family: TranslationFamily,
}

impl InscribedRectangle {
    /// The family member shifted by `u` (clamped to the admissible range).
    pub fn member(&self, u: f64) -> Rect {
        let u = u.clamp(0.0, self.family.max_shift);
        let d = self.family.direction;
        self.witness.translated(u * d.x, u * d.y)
    }

    /// `2 sqrt(area)`, the limit of `L(t P) / t`.
    pub fn value(&self) -> f64 {
        2.0 * self.area.sqrt()
    }
}

/// Largest axis-parallel rectangle inside the parallelogram, in closed form.
///
/// Three regimes, split on `rho / sigma` against `1/mu` and `mu`. In both
/// outer regimes the optimum slides along an edge; in the central one it is
/// the unique rectangle `[0, sigma] x [0, rho]`.
pub fn max_inscribed_rectangle(par: &Parallelogram) -> InscribedRectangle {
    let Parallelogram { mu, sigma, rho, .. } = *par;
    if rho * mu < sigma {
        let xi = (rho * mu + sigma) / (2.0 * mu);
        InscribedRectangle {
            area: (rho * mu + sigma).powi(2) / (4.0 * mu),
            witness: Rect {
                x0: 0.0,
                x1: mu * xi,
                y0: 0.0,
                y1: xi,
            },
            family: TranslationFamily {
                direction: PlanarPoint::new(mu, -1.0),
                max_shift: (sigma - mu * rho) / (2.0 * mu),
            },
        }
    } else if rho > mu * sigma {
        let xi = (sigma * mu + rho) / (2.0 * mu);
        InscribedRectangle {
            area: (sigma * mu + rho).powi(2) / (4.0 * mu),
            witness: Rect {
                x0: 0.0,
                x1: xi,
                y0: 0.0,
                y1: mu * xi,
            },
            family: TranslationFamily {
                direction: PlanarPoint::new(-1.0, mu),
                max_shift: (rho - mu * sigma) / (2.0 * mu),
            },
        }
    } else {
        InscribedRectangle {
            area: sigma * rho,
            witness: Rect {
                x0: 0.0,
                x1: sigma,
                y0: 0.0,
                y1: rho,
            },
            family: TranslationFamily {
                direction: PlanarPoint::ORIGIN,
                max_shift: 0.0,
            },
        }
    }
}
