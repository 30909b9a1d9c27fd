//! The order-preserving action of N4 on ℤ³.
//!
//! `e` and `d` translate the first two coordinates, while `f, a, b, c` shift
//! the last coordinate by an amount depending only on `(i, j)`. Because of
//! that, every element preserves the lexicographic order.
//!
//! Two sign conventions are supported. [`Convention::Proposition`] uses
//! `f: k ↦ k − ij`; [`Convention::Interval`] uses `f: k ↦ k + ij`, the
//! convention of the interval realization. The second is the conjugate of the
//! first by `k ↦ −k`, so the induced shifts of `a, b, c` flip sign as well.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Generator, N4Element};

/// A point of ℤ³, ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct LatticePoint {
    pub i: i64,
    pub j: i64,
    pub k: i64,
}

impl LatticePoint {
    pub const fn new(i: i64, j: i64, k: i64) -> Self {
        LatticePoint { i, j, k }
    }

    pub const fn origin() -> Self {
        LatticePoint { i: 0, j: 0, k: 0 }
    }

    /// Max-norm, i.e. the smallest cube radius containing the point.
    pub fn max_norm(&self) -> i64 {
        self.i.abs().max(self.j.abs()).max(self.k.abs())
    }

    pub fn with_k(&self, k: i64) -> Self {
        LatticePoint { k, ..*self }
    }
}

impl From<[i64; 3]> for LatticePoint {
    fn from(a: [i64; 3]) -> Self {
        LatticePoint::new(a[0], a[1], a[2])
    }
}

impl From<LatticePoint> for [i64; 3] {
    fn from(p: LatticePoint) -> Self {
        [p.i, p.j, p.k]
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `f: (i,j,k) ↦ (i,j,k−ij)`, `a: k−j`, `b: k+i`, `c: k+1`.
    Proposition,
    /// `f: (i,j,k) ↦ (i,j,k+ij)`, `a: k+j`, `b: k−i`, `c: k−1`.
    Interval,
}

impl Convention {
    fn sign(self) -> i64 {
        match self {
            Convention::Proposition => 1,
            Convention::Interval => -1,
        }
    }
}

fn ovf<T>(v: Option<T>) -> Result<T> {
    v.ok_or(Error::Overflow("lattice action"))
}

/// Applies `gen^n` to `p`.
pub fn apply_generator_power(
    gen: Generator,
    n: i64,
    p: LatticePoint,
    conv: Convention,
) -> Result<LatticePoint> {
    let s = conv.sign();
    let LatticePoint { i, j, k } = p;
    // per-unit k-shift under the Proposition convention
    let unit_shift = |gen: Generator| -> Result<i64> {
        Ok(match gen {
            Generator::F => ovf(i.checked_mul(j).and_then(i64::checked_neg))?,
            Generator::A => -j,
            Generator::B => i,
            Generator::C => 1,
            Generator::E | Generator::D => 0,
        })
    };
    Ok(match gen {
        Generator::E => LatticePoint::new(ovf(i.checked_add(n))?, j, k),
        Generator::D => LatticePoint::new(i, ovf(j.checked_add(n))?, k),
        other => {
            let shift = ovf(unit_shift(other)?
                .checked_mul(n)
                .and_then(|v| v.checked_mul(s)))?;
            LatticePoint::new(i, j, ovf(k.checked_add(shift))?)
        }
    })
}

pub fn apply_generator(gen: Generator, p: LatticePoint, conv: Convention) -> Result<LatticePoint> {
    apply_generator_power(gen, 1, p, conv)
}

/// Left action of a normal-form element: `c^n6` acts first and `f^n1` last,
/// so that `apply(g·h, p) = apply(g, apply(h, p))`.
pub fn apply(g: &N4Element, p: LatticePoint, conv: Convention) -> Result<LatticePoint> {
    Generator::ALL
        .iter()
        .rev()
        .try_fold(p, |acc, &gen| apply_generator_power(gen, g.exponent(gen), acc, conv))
}

/// Outcome of a randomized property sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub samples: usize,
    pub violations: usize,
    /// Up to ten offending cases, rendered as text.
    pub examples: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, msg: impl FnOnce() -> String) {
        self.violations += 1;
        if self.examples.len() < 10 {
            self.examples.push(msg());
        }
    }
}

pub(crate) fn random_element<R: Rng>(rng: &mut R, bound: i64) -> N4Element {
    let mut exps = [0i64; 6];
    for e in exps.iter_mut() {
        *e = rng.gen_range(-bound..=bound);
    }
    N4Element::new(exps)
}

fn random_point<R: Rng>(rng: &mut R, bound: i64) -> LatticePoint {
    LatticePoint::new(
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
        rng.gen_range(-bound..=bound),
    )
}

/// Checks `apply(g·h, p) = apply(g, apply(h, p))` on random triples with
/// exponents in `[−10, 10]`.
pub fn check_homomorphism(samples: usize, seed: u64, conv: Convention) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport { samples, violations: 0, examples: Vec::new() };
    for _ in 0..samples {
        let g = random_element(&mut rng, 10);
        let h = random_element(&mut rng, 10);
        let p = random_point(&mut rng, 100);
        let lhs = g.multiply(&h).and_then(|gh| apply(&gh, p, conv));
        let rhs = apply(&h, p, conv).and_then(|hp| apply(&g, hp, conv));
        match (lhs, rhs) {
            (Ok(l), Ok(r)) if l == r => {}
            (l, r) => report.record(|| format!("g={g} h={h} p={p}: {l:?} vs {r:?}")),
        }
    }
    report
}

/// Checks that random elements preserve the strict lexicographic order on
/// random pairs of points.
pub fn check_order_preservation(samples: usize, seed: u64, conv: Convention) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport { samples, violations: 0, examples: Vec::new() };
    for _ in 0..samples {
        let g = random_element(&mut rng, 10);
        let mut p = random_point(&mut rng, 20);
        let mut q = random_point(&mut rng, 20);
        // bias toward shared prefixes, where order is decided by later coordinates
        match rng.gen_range(0..3) {
            0 => q.i = p.i,
            1 => {
                q.i = p.i;
                q.j = p.j;
            }
            _ => {}
        }
        if p == q {
            q.k += 1;
        }
        if q < p {
            std::mem::swap(&mut p, &mut q);
        }
        match (apply(&g, p, conv), apply(&g, q, conv)) {
            (Ok(gp), Ok(gq)) if gp < gq => {}
            (gp, gq) => report.record(|| format!("g={g} p={p} q={q}: {gp:?} vs {gq:?}")),
        }
    }
    report
}
