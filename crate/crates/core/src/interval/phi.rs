//! The smoothed length function `φ(i,j,ξ) = 1 + |i|^p + |j|^q + θ(ξ)` and
//! `G_{i,j} = log φ(i,j,·)` with its first two derivatives.

use serde::{Deserialize, Serialize};

use super::params::ParamSet;

/// Even C² replacement for `|ξ|^r` on `(−1, 1)`.
///
/// On `|ξ| ≤ 1` it is the sextic `c2 ξ² + c4 ξ⁴ + c6 ξ⁶`, whose three
/// coefficients match value, slope and curvature of `|ξ|^r` at `|ξ| = 1`.
/// `θ(0) = 0` holds automatically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSplice {
    r: f64,
    c2: f64,
    c4: f64,
    c6: f64,
}

impl ThetaSplice {
    pub fn new(r: f64) -> Self {
        let c6 = (r - 2.0) * (r - 4.0) / 8.0;
        let c4 = (r - 2.0) / 2.0 - 2.0 * c6;
        let c2 = 1.0 - c4 - c6;
        ThetaSplice { r, c2, c4, c6 }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        [self.c2, self.c4, self.c6]
    }

    pub fn value(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a >= 1.0 {
            a.powf(self.r)
        } else {
            let x2 = xi * xi;
            x2 * (self.c2 + x2 * (self.c4 + x2 * self.c6))
        }
    }

    pub fn d1(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a >= 1.0 {
            xi.signum() * self.r * a.powf(self.r - 1.0)
        } else {
            let x2 = xi * xi;
            xi * (2.0 * self.c2 + x2 * (4.0 * self.c4 + x2 * 6.0 * self.c6))
        }
    }

    pub fn d2(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a >= 1.0 {
            self.r * (self.r - 1.0) * a.powf(self.r - 2.0)
        } else {
            let x2 = xi * xi;
            2.0 * self.c2 + x2 * (12.0 * self.c4 + x2 * 30.0 * self.c6)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phi {
    pub params: ParamSet,
    pub theta: ThetaSplice,
}

impl Phi {
    pub fn new(params: ParamSet) -> Self {
        Phi { params, theta: ThetaSplice::new(params.r) }
    }

    /// `S = 1 + |i|^p + |j|^q`, the part of `φ` that does not depend on `ξ`.
    pub fn s(&self, i: i64, j: i64) -> f64 {
        1.0 + (i.abs() as f64).powf(self.params.p) + (j.abs() as f64).powf(self.params.q)
    }

    pub fn phi(&self, i: i64, j: i64, xi: f64) -> f64 {
        self.s(i, j) + self.theta.value(xi)
    }

    pub fn g(&self, i: i64, j: i64, xi: f64) -> f64 {
        self.phi(i, j, xi).ln()
    }

    pub fn g1(&self, i: i64, j: i64, xi: f64) -> f64 {
        self.theta.d1(xi) / self.phi(i, j, xi)
    }

    /// `G'' = φ''/φ − (φ'/φ)²`.
    pub fn g2(&self, i: i64, j: i64, xi: f64) -> f64 {
        let phi = self.phi(i, j, xi);
        let d1 = self.theta.d1(xi) / phi;
        self.theta.d2(xi) / phi - d1 * d1
    }

    /// `G(x) − G(y)` without cancellation: `log1p((θ(x) − θ(y)) / φ(y))`.
    pub fn g_diff(&self, i: i64, j: i64, x: f64, y: f64) -> f64 {
        let phi_y = self.phi(i, j, y);
        ((self.theta.value(x) - self.theta.value(y)) / phi_y).ln_1p()
    }
}
