//! Box sweeps of the quantities that the regularity estimate for `f` bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{raw_length, ParamSet, Phi};
use crate::lattice::LatticePoint;

fn box_indices(n: i64) -> impl Iterator<Item = LatticePoint> {
    (-n..=n).flat_map(move |i| (-n..=n).flat_map(move |j| (-n..=n).map(move |k| LatticePoint::new(i, j, k))))
}

fn check_radius(n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("box radius must be ≥ 1, got {n}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxMax {
    pub radius: i64,
    pub value: f64,
    pub argmax: LatticePoint,
    pub evaluated: usize,
}

/// `φ(i,j,k)^α · |log(|I||J'|/(|I'||J|))|` with `I = I_{i,j,k}`,
/// `J = I_{i,j,k+ij}`, `I' = I_{i,j,k−1}`, `J' = I_{i,j,k+ij−1}`.
pub fn case1_term(params: &ParamSet, idx: LatticePoint, alpha: f64) -> f64 {
    let (i, j, k) = (idx.i, idx.j, idx.k as f64);
    let ij = (i * j) as f64;
    let g = Phi::new(*params);
    // [G(k+ij) − G(k+ij−1)] − [G(k) − G(k−1)], with G = −log(length)
    let log_ratio = g.g_diff(i, j, k + ij, k + ij - 1.0) - g.g_diff(i, j, k, k - 1.0);
    let phi = 1.0 / raw_length(params, idx);
    phi.powf(alpha) * log_ratio.abs()
}

pub fn case1_bound(params: &ParamSet, n: i64, alpha: f64) -> Result<BoxMax> {
    check_radius(n)?;
    let mut best = BoxMax { radius: n, value: 0.0, argmax: LatticePoint::new(0, 0, 0), evaluated: 0 };
    for idx in box_indices(n) {
        let v = case1_term(params, idx, alpha);
        best.evaluated += 1;
        if v > best.value {
            best.value = v;
            best.argmax = idx;
        }
    }
    Ok(best)
}

/// Largest `max(φ(i,j,ξ)/φ(i,j,k), φ(i,j,k)/φ(i,j,ξ))` over the box and
/// `2·half_steps + 1` evenly spaced `ξ` with `|ξ − k| ≤ S^{1/r} + 2|ij|`.
pub fn isla_check(params: &ParamSet, n: i64, half_steps: usize) -> Result<BoxMax> {
    check_radius(n)?;
    let phi = Phi::new(*params);
    let half_steps = half_steps.max(1);
    let mut best = BoxMax { radius: n, value: 1.0, argmax: LatticePoint::new(0, 0, 0), evaluated: 0 };
    for idx in box_indices(n) {
        let reach = phi.s(idx.i, idx.j).powf(1.0 / params.r) + 2.0 * (idx.i * idx.j).abs() as f64;
        let base = phi.phi(idx.i, idx.j, idx.k as f64);
        for step in -(half_steps as i64)..=half_steps as i64 {
            let xi = idx.k as f64 + reach * step as f64 / half_steps as f64;
            let other = phi.phi(idx.i, idx.j, xi);
            let ratio = (other / base).max(base / other);
            best.evaluated += 1;
            if ratio > best.value {
                best.value = ratio;
                best.argmax = idx;
            }
        }
    }
    Ok(best)
}

/// One instance of `|i|^{a₁}|j|^{a₂}|k|^{a₃} ≺ φ(i,j,k)^b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqCase {
    pub name: String,
    pub a: [f64; 3],
    pub b: f64,
}

impl IneqCase {
    /// `a₁/p + a₂/q + a₃/r ≤ b`.
    pub fn premise_holds(&self, params: &ParamSet) -> bool {
        self.a[0] / params.p + self.a[1] / params.q + self.a[2] / params.r <= b_with_slack(self.b)
    }
}

fn b_with_slack(b: f64) -> f64 {
    b + 1e-12 * b.abs().max(1.0)
}

/// The instances the regularity argument for `f` relies on.
pub fn ineq_cases(params: &ParamSet, alpha: f64) -> Vec<IneqCase> {
    let r = params.r;
    let case = |name: &str, a: [f64; 3], b: f64| IneqCase { name: name.to_string(), a, b };
    vec![
        case("ij-vs-phi", [1.0, 1.0, 0.0], 1.0 - alpha),
        case("ij-squared-vs-phi", [2.0, 2.0, 0.0], 2.0 * (1.0 - alpha)),
        case("middle-i", [params.p * (1.0 - alpha) / r + r - 1.0, r - 1.0, 0.0], 1.0 - alpha),
        case("middle-j", [r - 1.0, params.q * (1.0 - alpha) / r + r - 1.0, 0.0], 1.0 - alpha),
        case("high-near", [r - 1.0, r - 1.0, 1.0 - alpha], 1.0 - alpha),
        case("high-far", [1.0, 1.0, (alpha + 1.0) * (r - 1.0)], 1.0),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqReport {
    pub case: IneqCase,
    pub premise: bool,
    pub radius: i64,
    /// Largest `|i|^{a₁}|j|^{a₂}|k|^{a₃} / φ^b`; the premise forces ≤ 1.
    pub max_ratio: f64,
    pub argmax: LatticePoint,
    pub violations: usize,
}

pub fn eq_ineq_check(params: &ParamSet, n: i64, case: &IneqCase) -> Result<IneqReport> {
    check_radius(n)?;
    let mut rep = IneqReport {
        case: case.clone(),
        premise: case.premise_holds(params),
        radius: n,
        max_ratio: 0.0,
        argmax: LatticePoint::new(0, 0, 0),
        violations: 0,
    };
    for idx in box_indices(n) {
        let phi = 1.0 / raw_length(params, idx);
        let lhs = (idx.i.abs() as f64).powf(case.a[0])
            * (idx.j.abs() as f64).powf(case.a[1])
            * (idx.k.abs() as f64).powf(case.a[2]);
        let ratio = lhs / phi.powf(case.b);
        if ratio > rep.max_ratio {
            rep.max_ratio = ratio;
            rep.argmax = idx;
        }
        if rep.premise && ratio > 1.0 + 1e-12 {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncrementSample {
    pub index: LatticePoint,
    pub a: i64,
    pub b: i64,
    pub increment: f64,
    /// `|ab| · max |G''|` over the convex hull.
    pub bound: f64,
}

impl IncrementSample {
    /// Relative slack `(bound − |increment|)/bound`; zero when both vanish.
    pub fn slack(&self) -> f64 {
        if self.bound == 0.0 {
            if self.increment == 0.0 { 0.0 } else { -1.0 }
        } else {
            (self.bound - self.increment.abs()) / self.bound
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementReport {
    pub radius: i64,
    pub samples: usize,
    pub violations: usize,
    pub worst_slack: f64,
    /// Largest `|increment| / bound`.
    pub max_tightness: f64,
    pub worst: Option<IncrementSample>,
}

/// `max |G''_{i,j}|` on `[lo, hi]`: a dense grid followed by golden-section
/// refinement around the best grid point.
pub fn max_abs_g2(phi: &Phi, i: i64, j: i64, lo: f64, hi: f64) -> f64 {
    let f = |xi: f64| phi.g2(i, j, xi).abs();
    if hi <= lo {
        return f(lo);
    }
    const GRID: usize = 512;
    let h = (hi - lo) / GRID as f64;
    let mut best = (0usize, f(lo));
    for n in 1..=GRID {
        let v = f(lo + h * n as f64);
        if v > best.1 {
            best = (n, v);
        }
    }
    let centre = lo + h * best.0 as f64;
    let (mut a, mut b) = ((centre - h).max(lo), (centre + h).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut top = best.1;
    for _ in 0..80 {
        let (fc, fd) = (f(c), f(d));
        top = top.max(fc).max(fd);
        if fc > fd {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    top
}

pub fn increment_sample(phi: &Phi, index: LatticePoint, a: i64, b: i64) -> IncrementSample {
    let (i, j, k) = (index.i, index.j, index.k as f64);
    let (af, bf) = (a as f64, b as f64);
    // [G(k+a+b) − G(k+a)] − [G(k+b) − G(k)], each bracket without cancellation
    let increment = phi.g_diff(i, j, k + af + bf, k + af) - phi.g_diff(i, j, k + bf, k);
    let pts = [k, k + af, k + bf, k + af + bf];
    let lo = pts.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = pts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bound = (af * bf).abs() * max_abs_g2(phi, i, j, lo, hi);
    IncrementSample { index, a, b, increment, bound }
}

/// Random `(i, j, k)` in the box with `a ∈ [−2N, 2N]` and `b` either `ij`
/// (every other sample) or uniform in `[−2N, 2N]`.
pub fn second_increment_check(params: &ParamSet, n: i64, samples: usize, seed: u64) -> Result<IncrementReport> {
    check_radius(n)?;
    let phi = Phi::new(*params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = IncrementReport {
        radius: n,
        samples: 0,
        violations: 0,
        worst_slack: f64::INFINITY,
        max_tightness: 0.0,
        worst: None,
    };
    for s in 0..samples {
        let index = LatticePoint::new(rng.gen_range(-n..=n), rng.gen_range(-n..=n), rng.gen_range(-n..=n));
        let a = rng.gen_range(-2 * n..=2 * n);
        let b = if s % 2 == 0 { index.i * index.j } else { rng.gen_range(-2 * n..=2 * n) };
        let sample = increment_sample(&phi, index, a, b);
        rep.samples += 1;
        let slack = sample.slack();
        if slack < -1e-9 {
            rep.violations += 1;
        }
        if sample.bound > 0.0 {
            rep.max_tightness = rep.max_tightness.max(sample.increment.abs() / sample.bound);
        }
        if slack < rep.worst_slack {
            rep.worst_slack = slack;
            rep.worst = Some(sample);
        }
    }
    Ok(rep)
}
