//! A chart `h: (0,1) → ℝ` with density
//!
//! ```text
//! log h'(t) = (1 − w(t))·log(λ t⁻²) + w(t)·log((1 − t)⁻²),   h(1/2) = 0,
//! ```
//!
//! where `λ` is the ratio (left-neighbor length)/(own length). Near the ends
//! the chart is explicit: `h(u) = A − λ/u` on `(0, 1/3]` and
//! `h(u) = B + 1/(1 − u)` on `[2/3, 1)`. Only the middle third needs
//! quadrature.

use serde::{Deserialize, Serialize};

use super::profile::{step, step_d1, ONE_THIRD, TWO_THIRDS};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

const QUAD_ABS_TOL: f64 = 1e-15;
const QUAD_REL_TOL: f64 = 1e-14;
const QUAD_MAX_SEGMENTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    ratio: f64,
    ln_ratio: f64,
    /// `h(1/3)`.
    h_left: f64,
    /// `h(2/3)`.
    h_right: f64,
}

impl Chart {
    pub fn new(ratio: f64) -> Self {
        assert!(ratio.is_finite() && ratio > 0.0, "chart ratio must be positive, got {ratio}");
        let mut chart = Chart { ratio, ln_ratio: ratio.ln(), h_left: 0.0, h_right: 0.0 };
        chart.h_left = -chart.integrate_density(ONE_THIRD, 0.5);
        chart.h_right = chart.integrate_density(0.5, TWO_THIRDS);
        chart
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// `A` in `h(u) = A − λ/u`.
    pub fn left_constant(&self) -> f64 {
        self.h_left + 3.0 * self.ratio
    }

    /// `B` in `h(u) = B + 1/(1 − u)`.
    pub fn right_constant(&self) -> f64 {
        self.h_right - 3.0
    }

    pub fn knot_values(&self) -> (f64, f64) {
        (self.h_left, self.h_right)
    }

    /// `h'(t)`.
    pub fn density(&self, t: f64) -> f64 {
        if t <= ONE_THIRD {
            self.ratio / (t * t)
        } else if t >= TWO_THIRDS {
            let c = 1.0 - t;
            1.0 / (c * c)
        } else {
            self.log_density(t).exp()
        }
    }

    /// `log h'(t)`, for `t` in the open unit interval.
    pub fn log_density(&self, t: f64) -> f64 {
        let w = step(t);
        let left = self.ln_ratio - 2.0 * t.ln();
        let right = -2.0 * (1.0 - t).ln();
        (1.0 - w) * left + w * right
    }

    /// `d/dt log h'(t)`.
    pub fn log_density_slope(&self, t: f64) -> f64 {
        if t <= ONE_THIRD {
            -2.0 / t
        } else if t >= TWO_THIRDS {
            2.0 / (1.0 - t)
        } else {
            let w = step(t);
            let dw = step_d1(t);
            let left = self.ln_ratio - 2.0 * t.ln();
            let right = -2.0 * (1.0 - t).ln();
            dw * (right - left) - 2.0 * (1.0 - w) / t + 2.0 * w / (1.0 - t)
        }
    }

    fn integrate_density(&self, a: f64, b: f64) -> f64 {
        integrate(|t| self.density(t), a, b, QUAD_ABS_TOL, QUAD_REL_TOL, QUAD_MAX_SEGMENTS).value
    }

    fn middle_value(&self, u: f64) -> f64 {
        // integrate from the nearest anchor
        let anchors = [(ONE_THIRD, self.h_left), (0.5, 0.0), (TWO_THIRDS, self.h_right)];
        let &(t0, h0) = anchors
            .iter()
            .min_by(|x, y| (x.0 - u).abs().total_cmp(&(y.0 - u).abs()))
            .expect("anchors are non-empty");
        h0 + self.integrate_density(t0, u)
    }

    /// `h(u)`; `u` must lie in the open unit interval.
    pub fn eval(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::OutsideInterval { x: u, left: 0.0, right: 1.0 });
        }
        Ok(self.eval_split(u, 1.0 - u))
    }

    /// `h(u)` given both `u` and `1 − u`, each computed as accurately as the
    /// caller can. Returns ±∞ at the ends.
    pub(crate) fn eval_split(&self, u: f64, cu: f64) -> f64 {
        if u <= ONE_THIRD {
            if u <= 0.0 {
                f64::NEG_INFINITY
            } else {
                self.left_constant() - self.ratio / u
            }
        } else if cu <= ONE_THIRD {
            if cu <= 0.0 {
                f64::INFINITY
            } else {
                self.right_constant() + 1.0 / cu
            }
        } else {
            self.middle_value(u)
        }
    }

    /// `h⁻¹(s)` as the pair `(u, 1 − u)`.
    pub fn inverse(&self, s: f64) -> (f64, f64) {
        if s == f64::NEG_INFINITY {
            return (0.0, 1.0);
        }
        if s == f64::INFINITY {
            return (1.0, 0.0);
        }
        if s <= self.h_left {
            let u = self.ratio / (self.left_constant() - s);
            return (u, 1.0 - u);
        }
        if s >= self.h_right {
            let cu = 1.0 / (s - self.right_constant());
            return (1.0 - cu, cu);
        }
        let u = self.invert_middle(s);
        (u, 1.0 - u)
    }

    fn invert_middle(&self, s: f64) -> f64 {
        let (mut lo, mut hi) = (ONE_THIRD, TWO_THIRDS);
        // piecewise-linear initial guess through the three anchors
        let mut u = if s <= 0.0 {
            ONE_THIRD + (0.5 - ONE_THIRD) * (s - self.h_left) / (0.0 - self.h_left)
        } else {
            0.5 + (TWO_THIRDS - 0.5) * s / self.h_right
        };
        let tol = 2.0 * f64::EPSILON * s.abs().max(1.0);
        for _ in 0..100 {
            let value = self.middle_value(u);
            let resid = value - s;
            if resid.abs() <= tol {
                break;
            }
            if resid > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let next = u - resid / self.density(u);
            let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if (next - u).abs() <= f64::EPSILON * u {
                u = next;
                break;
            }
            u = next;
        }
        u
    }
}
