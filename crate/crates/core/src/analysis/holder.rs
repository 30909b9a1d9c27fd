//! Empirical Hölder constants of `log Dg`.
//!
//! The quotient `|log Dg(x) − log Dg(y)| / |x − y|^α` is maximized over
//! three strata: pairs inside one interval, pairs in two intervals of the
//! same `(i, j)` block, and exact endpoint pairs `(x₋ of I_k, x₊ of I_k')`
//! inside a block. Pairs across blocks are not compared: in the truncated
//! layout consecutive blocks meet at a seam that has no counterpart in the
//! full family.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Word;
use crate::lattice::LatticePoint;
use crate::realization::Realization;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    /// Chebyshev–Lobatto points per interval, endpoints included.
    pub points_per_interval: usize,
    /// Extra uniformly random interior points per interval.
    pub random_points: usize,
    pub seed: u64,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        SamplingPlan { points_per_interval: 17, random_points: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stratum {
    Within,
    /// Both `|k|, |k'| ≤ 2|ij|`.
    CrossLow,
    /// Both in `(2|ij|, S^{1/r}]`.
    CrossMiddle,
    /// Both beyond `S^{1/r}`.
    CrossHigh,
    /// Different regimes or different signs of `k`.
    CrossStraddling,
    Endpoints,
}

impl Stratum {
    pub const ALL: [Stratum; 6] = [
        Stratum::Within,
        Stratum::CrossLow,
        Stratum::CrossMiddle,
        Stratum::CrossHigh,
        Stratum::CrossStraddling,
        Stratum::Endpoints,
    ];

    fn slot(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Stratum::Within => "within",
            Stratum::CrossLow => "cross-low",
            Stratum::CrossMiddle => "cross-middle",
            Stratum::CrossHigh => "cross-high",
            Stratum::CrossStraddling => "cross-straddling",
            Stratum::Endpoints => "endpoints",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgMax {
    pub x: f64,
    pub index_x: LatticePoint,
    pub y: f64,
    pub index_y: LatticePoint,
    pub stratum: Stratum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StratumMax {
    pub stratum: Stratum,
    pub constant: f64,
    pub pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub word: String,
    pub alpha: f64,
    pub radius: i64,
    pub samples: usize,
    pub pairs: u64,
    pub constant: f64,
    pub argmax: Option<ArgMax>,
    pub strata: Vec<StratumMax>,
}

impl HolderReport {
    /// Recomputes the quotient at the stored maximizer.
    pub fn reproduce(&self, realization: &Realization) -> Result<f64> {
        let Some(arg) = self.argmax else { return Ok(0.0) };
        let word: Word = self.word.parse()?;
        let lx = realization.apply_word_at(&word, arg.x, arg.index_x)?.log_derivative;
        let ly = realization.apply_word_at(&word, arg.y, arg.index_y)?.log_derivative;
        Ok((lx - ly).abs() / (arg.x - arg.y).abs().powf(self.alpha))
    }
}

#[derive(Debug, Clone, Copy)]
struct Point {
    x: f64,
    log_d: f64,
}

#[derive(Debug, Clone)]
struct IntervalSamples {
    index: LatticePoint,
    points: Vec<Point>,
}

/// `log Dg` sampled once on every safe interval; constants for several
/// exponents reuse the same samples.
#[derive(Debug, Clone)]
pub struct HolderSamples {
    word: Word,
    radius: i64,
    /// `(p, q, r)` for the regime labels.
    exponents: (f64, f64, f64),
    intervals: Vec<IntervalSamples>,
}

fn lobatto(m: usize) -> Vec<f64> {
    let m = m.max(2);
    (0..m)
        .map(|n| 0.5 * (1.0 - (std::f64::consts::PI * n as f64 / (m - 1) as f64).cos()))
        .map(|u| u.clamp(0.0, 1.0))
        .collect()
}

impl HolderSamples {
    pub fn collect(realization: &Realization, word: &Word, plan: &SamplingPlan) -> Result<Self> {
        let grid = lobatto(plan.points_per_interval);
        let family = realization.family();
        let safe = realization.safe_domain(word);
        let intervals = safe
            .par_iter()
            .map(|&index| -> Result<IntervalSamples> {
                let frame = realization.frame(index)?;
                let mut units = grid.clone();
                let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
                rng.set_stream(family.flat_index(index)? as u64);
                units.extend((0..plan.random_points).map(|_| rng.gen_range(0.0..1.0)));
                units.sort_by(f64::total_cmp);
                let mut points = Vec::with_capacity(units.len());
                for u in units {
                    let x = if u == 1.0 { frame.right() } else { frame.left + frame.len * u };
                    let ev = realization.apply_word_at(word, x, index)?;
                    points.push(Point { x, log_d: ev.log_derivative });
                }
                Ok(IntervalSamples { index, points })
            })
            .collect::<Result<Vec<_>>>()?;
        let params = family.params();
        Ok(HolderSamples {
            word: word.clone(),
            radius: family.radius(),
            exponents: (params.p, params.q, params.r),
            intervals,
        })
    }

    pub fn sample_count(&self) -> usize {
        self.intervals.iter().map(|s| s.points.len()).sum()
    }

    fn blocks(&self) -> Vec<&[IntervalSamples]> {
        self.intervals
            .chunk_by(|a, b| a.index.i == b.index.i && a.index.j == b.index.j)
            .collect()
    }

    fn regime(&self, idx: LatticePoint) -> u8 {
        let (p, q, r) = self.exponents;
        let ij = (idx.i * idx.j).unsigned_abs() as f64;
        let s = 1.0 + (idx.i.abs() as f64).powf(p) + (idx.j.abs() as f64).powf(q);
        let m = idx.k.unsigned_abs() as f64;
        if m <= 2.0 * ij {
            0
        } else if m <= s.powf(1.0 / r) {
            1
        } else {
            2
        }
    }

    fn cross_stratum(&self, a: LatticePoint, b: LatticePoint) -> Stratum {
        if a.k.signum() * b.k.signum() < 0 {
            return Stratum::CrossStraddling;
        }
        match (self.regime(a), self.regime(b)) {
            (0, 0) => Stratum::CrossLow,
            (1, 1) => Stratum::CrossMiddle,
            (2, 2) => Stratum::CrossHigh,
            _ => Stratum::CrossStraddling,
        }
    }

    pub fn constant(&self, alpha: f64) -> Result<HolderReport> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0,1), got {alpha}")));
        }
        let best = self
            .blocks()
            .par_iter()
            .map(|block| self.block_maxima(block, alpha))
            .reduce(Maxima::default, Maxima::merge);
        let overall = best
            .best
            .iter()
            .flatten()
            .copied()
            .fold(None, |acc: Option<Candidate>, c| Some(acc.map_or(c, |a| a.better(c))));
        Ok(HolderReport {
            word: self.word.to_string(),
            alpha,
            radius: self.radius,
            samples: self.sample_count(),
            pairs: best.pairs.iter().sum(),
            constant: overall.map_or(0.0, |c| c.value),
            argmax: overall.map(|c| c.arg),
            strata: Stratum::ALL
                .iter()
                .map(|&s| StratumMax {
                    stratum: s,
                    constant: best.best[s.slot()].map_or(0.0, |c| c.value),
                    pairs: best.pairs[s.slot()],
                })
                .collect(),
        })
    }

    fn block_maxima(&self, block: &[IntervalSamples], alpha: f64) -> Maxima {
        let mut out = Maxima::default();
        for (n, a) in block.iter().enumerate() {
            for (s, pa) in a.points.iter().enumerate() {
                for pb in &a.points[s + 1..] {
                    out.offer(Stratum::Within, alpha, a.index, pa, a.index, pb);
                }
            }
            for b in &block[n + 1..] {
                let stratum = self.cross_stratum(a.index, b.index);
                for pa in &a.points {
                    for pb in &b.points {
                        out.offer(stratum, alpha, a.index, pa, b.index, pb);
                    }
                }
                let (a_left, b_right) = (&a.points[0], b.points.last().expect("non-empty"));
                let (a_right, b_left) = (a.points.last().expect("non-empty"), &b.points[0]);
                out.offer(Stratum::Endpoints, alpha, a.index, a_left, b.index, b_right);
                out.offer(Stratum::Endpoints, alpha, a.index, a_right, b.index, b_left);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: f64,
    arg: ArgMax,
}

impl Candidate {
    /// Larger value wins; ties go to the lexicographically smaller pair so
    /// the reduction does not depend on scheduling.
    fn better(self, other: Candidate) -> Candidate {
        match self.value.total_cmp(&other.value) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal => {
                let key = |c: &Candidate| (c.arg.x, c.arg.y);
                if key(&self).partial_cmp(&key(&other)) == Some(std::cmp::Ordering::Greater) {
                    other
                } else {
                    self
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Maxima {
    best: [Option<Candidate>; 6],
    pairs: [u64; 6],
}

impl Maxima {
    fn offer(&mut self, stratum: Stratum, alpha: f64, ia: LatticePoint, a: &Point, ib: LatticePoint, b: &Point) {
        let dx = (a.x - b.x).abs();
        if dx == 0.0 {
            return;
        }
        let slot = stratum.slot();
        self.pairs[slot] += 1;
        let value = (a.log_d - b.log_d).abs() / dx.powf(alpha);
        if self.best[slot].is_some_and(|c| c.value >= value) {
            return;
        }
        let cand = Candidate { value, arg: ArgMax { x: a.x, index_x: ia, y: b.x, index_y: ib, stratum } };
        self.best[slot] = Some(self.best[slot].map_or(cand, |c| c.better(cand)));
    }

    fn merge(mut self, other: Maxima) -> Maxima {
        for s in 0..6 {
            self.pairs[s] += other.pairs[s];
            self.best[s] = match (self.best[s], other.best[s]) {
                (Some(a), Some(b)) => Some(a.better(b)),
                (a, b) => a.or(b),
            };
        }
        self
    }
}

/// One-shot convenience around [`HolderSamples`].
pub fn holder_constant(
    realization: &Realization,
    word: &Word,
    alpha: f64,
    plan: &SamplingPlan,
) -> Result<HolderReport> {
    HolderSamples::collect(realization, word, plan)?.constant(alpha)
}

#[derive(Serialize)]
struct SweepRow<'a> {
    #[serde(rename = "N")]
    n: i64,
    alpha: f64,
    generator: &'a str,
    constant: f64,
    argmax_x: Option<f64>,
    argmax_y: Option<f64>,
}

/// CSV with columns `N,alpha,generator,constant,argmax_x,argmax_y`.
pub fn write_sweep_csv<W: Write>(reports: &[HolderReport], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for r in reports {
        writer
            .serialize(SweepRow {
                n: r.radius,
                alpha: r.alpha,
                generator: &r.word,
                constant: r.constant,
                argmax_x: r.argmax.map(|a| a.x),
                argmax_y: r.argmax.map(|a| a.y),
            })
            .map_err(|e| Error::Consistency(format!("csv: {e}")))?;
    }
    writer.flush().map_err(|e| Error::Consistency(format!("csv: {e}")))?;
    Ok(())
}
