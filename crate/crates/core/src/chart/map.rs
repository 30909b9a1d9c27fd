//! Equivariant interval maps `φ_{I',I}^{J',J} = frame_J ∘ h_J⁻¹ ∘ h_I ∘ frame_I⁻¹`.
//!
//! Composition is exact by construction: `φ_{J',J}^{K',K} ∘ φ_{I',I}^{J',J}`
//! reduces to `h_K⁻¹ ∘ h_J ∘ h_J⁻¹ ∘ h_I`. The pole coefficients of the charts
//! force the endpoint derivatives `|J'|/|I'|` on the left and `|J|/|I|` on
//! the right.

use serde::{Deserialize, Serialize};

use super::chart::Chart;
use super::profile::{ChartProfile, ONE_THIRD};
use crate::error::{Error, Result};

/// An interval together with the length of its left neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub left: f64,
    pub len: f64,
    pub prev_len: f64,
}

impl Frame {
    pub fn new(left: f64, len: f64, prev_len: f64) -> Result<Self> {
        if !(len.is_finite() && len > 0.0 && prev_len.is_finite() && prev_len > 0.0 && left.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "frame needs positive finite lengths, got len={len} prev_len={prev_len}"
            )));
        }
        Ok(Frame { left, len, prev_len })
    }

    pub fn right(&self) -> f64 {
        self.left + self.len
    }

    pub fn ratio(&self) -> f64 {
        self.prev_len / self.len
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PTMap {
    source: Frame,
    target: Frame,
    src: Chart,
    dst: Chart,
}

/// Position inside the unit interval, carried with its complement.
#[derive(Debug, Clone, Copy)]
struct Unit {
    u: f64,
    cu: f64,
}

/// The image of a point together with the derivative of the unit-interval
/// map `v(u)`.
#[derive(Debug, Clone, Copy)]
struct Image {
    v: Unit,
    /// `dv/du`.
    slope: f64,
    /// `d/du log(dv/du)`.
    log_slope_rate: f64,
}

impl PTMap {
    pub fn new(profile: &ChartProfile, source: Frame, target: Frame) -> Self {
        let src = profile.chart(source.ratio());
        let dst = profile.chart(target.ratio());
        PTMap { source, target, src, dst }
    }

    /// Builds from precomputed charts; they must match the frames' ratios.
    pub fn from_charts(source: Frame, target: Frame, src: Chart, dst: Chart) -> Self {
        debug_assert_eq!(src.ratio(), source.ratio());
        debug_assert_eq!(dst.ratio(), target.ratio());
        PTMap { source, target, src, dst }
    }

    pub fn source(&self) -> &Frame {
        &self.source
    }

    pub fn target(&self) -> &Frame {
        &self.target
    }

    /// `ρ = (|I|·|J'|)/(|J|·|I'|)`; the map is affine iff `ρ = 1`.
    pub fn rho(&self) -> f64 {
        (self.source.len * self.target.prev_len) / (self.target.len * self.source.prev_len)
    }

    /// `(Dφ(x₋), Dφ(x₊)) = (|J'|/|I'|, |J|/|I|)`.
    pub fn endpoint_derivatives(&self) -> (f64, f64) {
        (
            self.target.prev_len / self.source.prev_len,
            self.target.len / self.source.len,
        )
    }

    fn to_unit(&self, x: f64) -> Result<Unit> {
        let (left, len) = (self.source.left, self.source.len);
        let right = self.source.right();
        let slack = 4.0 * f64::EPSILON * right.abs().max(1.0);
        if !(x >= left - slack && x <= right + slack) {
            return Err(Error::OutsideInterval { x, left, right });
        }
        let u = ((x - left) / len).clamp(0.0, 1.0);
        let cu = ((right - x) / len).clamp(0.0, 1.0);
        Ok(Unit { u, cu })
    }

    fn image(&self, p: Unit) -> Image {
        let (li, lj) = (self.src.ratio(), self.dst.ratio());
        if li == lj {
            // identical charts: the unit map is the identity
            return Image { v: p, slope: 1.0, log_slope_rate: 0.0 };
        }
        // both ends inside the left pole region: v = λ_J u / (u ΔA + λ_I)
        if p.u <= ONE_THIRD {
            let s = if p.u > 0.0 { self.src.left_constant() - li / p.u } else { f64::NEG_INFINITY };
            if s <= self.dst.knot_values().0 {
                let da = self.dst.left_constant() - self.src.left_constant();
                let denom = p.u * da + li;
                let v = p.u * lj / denom;
                return Image {
                    v: Unit { u: v, cu: 1.0 - v },
                    slope: li * lj / (denom * denom),
                    log_slope_rate: -2.0 * da / denom,
                };
            }
        }
        // both ends inside the right pole region: 1 − v = (1 − u) / ((1 − u) ΔB + 1)
        if p.cu <= ONE_THIRD {
            let s = if p.cu > 0.0 { self.src.right_constant() + 1.0 / p.cu } else { f64::INFINITY };
            if s >= self.dst.knot_values().1 {
                let db = self.src.right_constant() - self.dst.right_constant();
                let denom = p.cu * db + 1.0;
                let cv = p.cu / denom;
                return Image {
                    v: Unit { u: 1.0 - cv, cu: cv },
                    slope: 1.0 / (denom * denom),
                    log_slope_rate: 2.0 * db / denom,
                };
            }
        }
        let s = self.src.eval_split(p.u, p.cu);
        let (v, cv) = self.dst.inverse(s);
        let slope = self.src.density(p.u) / self.dst.density(v);
        let log_slope_rate =
            self.src.log_density_slope(p.u) - self.dst.log_density_slope(v) * slope;
        Image { v: Unit { u: v, cu: cv }, slope, log_slope_rate }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let img = self.image(self.to_unit(x)?);
        Ok(if img.v.u <= 0.5 {
            self.target.left + self.target.len * img.v.u
        } else {
            self.target.right() - self.target.len * img.v.cu
        })
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        let img = self.image(self.to_unit(x)?);
        Ok(self.target.len / self.source.len * img.slope)
    }

    /// `log Dφ(x)`.
    pub fn log_derivative(&self, x: f64) -> Result<f64> {
        let img = self.image(self.to_unit(x)?);
        Ok((self.target.len / self.source.len).ln() + img.slope.ln())
    }

    /// `D log Dφ(x)`, in units of the source coordinate.
    pub fn log_derivative_slope(&self, x: f64) -> Result<f64> {
        let img = self.image(self.to_unit(x)?);
        Ok(img.log_slope_rate / self.source.len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame(left: f64, len: f64, prev: f64) -> Frame {
        Frame::new(left, len, prev).unwrap()
    }

    #[test]
    fn endpoints_map_to_endpoints() {
        let profile = ChartProfile::new();
        let m = PTMap::new(&profile, frame(0.1, 0.2, 0.3), frame(0.5, 0.05, 0.04));
        assert!((m.eval(0.1).unwrap() - 0.5).abs() < 1e-15);
        assert!((m.eval(0.3).unwrap() - 0.55).abs() < 1e-15);
        assert!(m.eval(0.31).is_err());
        assert!(m.eval(0.05).is_err());
    }

    #[test]
    fn identity_quadruple_is_identity() {
        let profile = ChartProfile::new();
        let f = frame(0.2, 0.1, 0.13);
        let m = PTMap::new(&profile, f, f);
        for n in 0..=50 {
            let x = 0.2 + 0.1 * n as f64 / 50.0;
            assert!((m.eval(x).unwrap() - x).abs() < 1e-12);
            assert!((m.derivative(x).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(m.endpoint_derivatives(), (1.0, 1.0));
    }

    #[test]
    fn unit_rho_gives_affine_map() {
        let profile = ChartProfile::new();
        // same ratio 1.5 on both sides, different scales
        let m = PTMap::new(&profile, frame(0.0, 0.2, 0.3), frame(0.4, 0.05, 0.075));
        assert!((m.rho() - 1.0).abs() < 1e-15);
        for n in 0..=40 {
            let x = 0.2 * n as f64 / 40.0;
            let affine = 0.4 + 0.25 * x;
            assert!((m.eval(x).unwrap() - affine).abs() < 1e-12);
            assert!(m.log_derivative_slope(x).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_and_positive_derivative() {
        let profile = ChartProfile::new();
        let m = PTMap::new(&profile, frame(0.0, 1.0, 0.6), frame(0.0, 0.7, 1.1));
        let mut prev = -1.0;
        for n in 0..=2000 {
            let x = n as f64 / 2000.0;
            let y = m.eval(x).unwrap();
            assert!(y > prev || n == 0);
            assert!(m.derivative(x).unwrap() > 0.0);
            prev = y;
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let profile = ChartProfile::new();
        let m = PTMap::new(&profile, frame(0.0, 1.0, 0.6), frame(0.0, 0.7, 1.1));
        for &x in &[0.05, 0.2, 0.34, 0.5, 0.66, 0.8, 0.97] {
            let h = 1e-6;
            let fd = (m.eval(x + h).unwrap() - m.eval(x - h).unwrap()) / (2.0 * h);
            assert!((fd - m.derivative(x).unwrap()).abs() < 1e-7, "x {x}");
            let fd_log =
                (m.log_derivative(x + h).unwrap() - m.log_derivative(x - h).unwrap()) / (2.0 * h);
            assert!((fd_log - m.log_derivative_slope(x).unwrap()).abs() < 1e-6, "x {x}");
        }
    }

    #[test]
    fn composition_is_equivariant() {
        let profile = ChartProfile::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let mut f = || frame(rng.gen_range(0.0..1.0), rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0));
            let (i, j, k) = (f(), f(), f());
            let ij = PTMap::new(&profile, i, j);
            let jk = PTMap::new(&profile, j, k);
            let ik = PTMap::new(&profile, i, k);
            for _ in 0..5 {
                let x = i.left + i.len * rng.gen_range(0.0..1.0);
                let via = jk.eval(ij.eval(x).unwrap()).unwrap();
                worst = worst.max((via - ik.eval(x).unwrap()).abs());
            }
        }
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn bad_frames_rejected() {
        assert!(Frame::new(0.0, 0.0, 1.0).is_err());
        assert!(Frame::new(0.0, 1.0, -1.0).is_err());
    }
}
