//! The generators `e, d, f` assembled piecewise on the truncated layout.
//!
//! On `I_p` each generator is the equivariant map onto `I_{g·p}`, where `g·p`
//! is the lattice action in the interval convention. Every frame carries the
//! length of its formula neighbor `I_{i,j,k−1}`, so the one-sided
//! derivatives agree at every shared endpoint `I_{i,j,k} | I_{i,j,k+1}`.
//!
//! Only indices whose whole orbit under a word stays in the box are
//! evaluated; anything else is refused with the offending prefix.

use std::io::Write;

use serde::Serialize;

use crate::chart::{Chart, ChartProfile, Frame, PTMap};
use crate::error::{Error, Result};
use crate::group::{c_word, Generator, Word};
use crate::interval::IntervalFamily;
use crate::lattice::{apply, apply_generator_power, Convention, LatticePoint};

pub const GENERATORS: [Generator; 3] = [Generator::E, Generator::D, Generator::F];

#[derive(Debug)]
pub struct Realization {
    family: IntervalFamily,
    profile: ChartProfile,
    frames: Vec<Frame>,
    charts: Vec<Chart>,
}

/// Point, derivative and final index after applying a word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub log_derivative: f64,
    pub index: LatticePoint,
}

impl Evaluation {
    pub fn derivative(&self) -> f64 {
        self.log_derivative.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C1Report {
    pub endpoints: usize,
    pub max_log_mismatch: f64,
    pub worst: Option<(char, LatticePoint)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationReport {
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl PermutationReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.mismatches.is_empty()
    }
}

#[derive(Serialize)]
struct EvalRow {
    x: f64,
    gx: f64,
    dgx: f64,
}

impl Realization {
    pub fn build(family: IntervalFamily) -> Self {
        Self::build_perturbed(family, 0.0)
    }

    /// Fault-injection hook: every index with odd `i + j + k` gets its
    /// neighbor length scaled by `1 + eps`, which breaks the endpoint
    /// matching by roughly `eps`.
    pub fn build_perturbed(family: IntervalFamily, eps: f64) -> Self {
        let profile = ChartProfile::new();
        let mut frames = Vec::with_capacity(family.len());
        let mut charts = Vec::with_capacity(family.len());
        for (n, idx) in family.indices().enumerate() {
            let left = family.left_endpoint(idx).expect("index from the family");
            let scale = if (idx.i + idx.j + idx.k).rem_euclid(2) == 1 { 1.0 + eps } else { 1.0 };
            let prev_len = family.length(idx.with_k(idx.k - 1)) * scale;
            let len = family.length(idx);
            debug_assert_eq!(n, family.flat_index(idx).unwrap());
            let frame = Frame::new(left, len, prev_len).expect("lengths are positive");
            charts.push(profile.chart(frame.ratio()));
            frames.push(frame);
        }
        Realization { family, profile, frames, charts }
    }

    pub fn family(&self) -> &IntervalFamily {
        &self.family
    }

    pub fn profile(&self) -> &ChartProfile {
        &self.profile
    }

    pub fn frame(&self, idx: LatticePoint) -> Result<Frame> {
        Ok(self.frames[self.family.flat_index(idx)?])
    }

    /// Image index of `gen^sign` on `I_idx`, or `None` if it leaves the box.
    pub fn target(&self, gen: Generator, sign: i64, idx: LatticePoint) -> Option<LatticePoint> {
        apply_generator_power(gen, sign, idx, Convention::Interval)
            .ok()
            .filter(|q| self.family.contains(*q))
    }

    /// The restriction of `gen^sign` (`sign = ±1`) to `I_idx`.
    pub fn piece(&self, gen: Generator, sign: i64, idx: LatticePoint) -> Result<PTMap> {
        check_generator(gen)?;
        let src = self.family.flat_index(idx)?;
        let to = apply_generator_power(gen, sign.signum(), idx, Convention::Interval)?;
        let dst = self.family.flat_index(to)?;
        Ok(PTMap::from_charts(self.frames[src], self.frames[dst], self.charts[src], self.charts[dst]))
    }

    /// Applies `word` (rightmost letter first) starting from `x`.
    pub fn apply_word(&self, word: &Word, x: f64) -> Result<Evaluation> {
        let index = self
            .family
            .locate(x)
            .ok_or(Error::OutsideInterval { x, left: 0.0, right: 1.0 })?;
        self.apply_word_at(word, x, index)
    }

    /// Like [`Realization::apply_word`], but with the starting interval
    /// given explicitly; `x` may be either endpoint of `I_start`.
    pub fn apply_word_at(&self, word: &Word, x: f64, start: LatticePoint) -> Result<Evaluation> {
        for &(g, _) in word.factors() {
            check_generator(g)?;
        }
        let mut index = start;
        let mut value = x;
        let mut log_derivative = 0.0;
        let factors = word.factors();
        for (pos, &(gen, n)) in factors.iter().enumerate().rev() {
            let sign = n.signum();
            for rep in 0..n.unsigned_abs() {
                let map = match self.piece(gen, sign, index) {
                    Ok(map) => map,
                    Err(Error::OutOfBox { .. }) => {
                        return Err(Error::Unsafe {
                            prefix: applied_prefix(factors, pos, rep),
                            index,
                        })
                    }
                    Err(e) => return Err(e),
                };
                log_derivative += map.log_derivative(value)?;
                value = map.eval(value)?;
                index = apply_generator_power(gen, sign, index, Convention::Interval)?;
            }
        }
        Ok(Evaluation { value, log_derivative, index })
    }

    pub fn eval(&self, word: &Word, x: f64) -> Result<f64> {
        Ok(self.apply_word(word, x)?.value)
    }

    pub fn derivative(&self, word: &Word, x: f64) -> Result<f64> {
        Ok(self.apply_word(word, x)?.derivative())
    }

    pub fn log_derivative(&self, word: &Word, x: f64) -> Result<f64> {
        Ok(self.apply_word(word, x)?.log_derivative)
    }

    /// Whether the orbit of `I_idx` under every suffix of `word` stays in
    /// the box.
    pub fn is_safe(&self, word: &Word, idx: LatticePoint) -> bool {
        if !self.family.contains(idx) {
            return false;
        }
        let mut p = idx;
        for &(gen, n) in word.factors().iter().rev() {
            for _ in 0..n.unsigned_abs() {
                match self.target(gen, n.signum(), p) {
                    Some(q) => p = q,
                    None => return false,
                }
            }
        }
        true
    }

    /// Safe indices of `word`, in lex order.
    pub fn safe_domain(&self, word: &Word) -> Vec<LatticePoint> {
        self.family.indices().filter(|&p| self.is_safe(word, p)).collect()
    }

    /// Compares one-sided derivatives of `e, d, f` and their inverses at
    /// every shared endpoint `I_{i,j,k} | I_{i,j,k+1}` where both pieces are
    /// defined; returns the largest `|log(D₊/D₋)|`.
    pub fn check_c1_matching(&self) -> C1Report {
        let mut report = C1Report { endpoints: 0, max_log_mismatch: 0.0, worst: None };
        let n = self.family.radius();
        for idx in self.family.indices().filter(|p| p.k < n) {
            let next = idx.with_k(idx.k + 1);
            for gen in GENERATORS {
                for sign in [1, -1] {
                    let (Ok(left), Ok(right)) = (self.piece(gen, sign, idx), self.piece(gen, sign, next)) else {
                        continue;
                    };
                    let x = self.frames[self.family.flat_index(next).unwrap()].left;
                    let (Ok(a), Ok(b)) = (left.log_derivative(x), right.log_derivative(x)) else {
                        continue;
                    };
                    let gap = (a - b).abs();
                    report.endpoints += 1;
                    if gap > report.max_log_mismatch || report.worst.is_none() {
                        report.max_log_mismatch = report.max_log_mismatch.max(gap);
                        report.worst = Some((if sign > 0 { gen.letter() } else { gen.letter().to_ascii_uppercase() }, idx));
                    }
                }
            }
        }
        report
    }

    /// Locates the image of every in-box midpoint under `e^±1, d^±1, f^±1`
    /// and compares with the lattice action. `c_stride` controls how many
    /// indices also get the `c`-word check (every `c_stride`-th safe index).
    pub fn induced_permutation_check(&self, c_stride: usize) -> PermutationReport {
        let mut report = PermutationReport { checked: 0, mismatches: Vec::new() };
        for idx in self.family.indices() {
            let mid = self.family.midpoint(idx).expect("in box");
            for gen in GENERATORS {
                for sign in [1, -1] {
                    let Some(expected) = self.target(gen, sign, idx) else { continue };
                    let word = Word::from_factors([(gen, sign)]);
                    self.compare(&word, idx, mid, expected, &mut report);
                }
            }
        }
        let c = c_word();
        let c_elem = c.evaluate().expect("c word evaluates");
        for idx in self.safe_domain(&c).into_iter().step_by(c_stride.max(1)) {
            let mid = self.family.midpoint(idx).expect("in box");
            match apply(&c_elem, idx, Convention::Interval) {
                Ok(expected) => self.compare(&c, idx, mid, expected, &mut report),
                Err(e) => report.mismatches.push(format!("{c} at {idx}: {e}")),
            }
        }
        report
    }

    fn compare(&self, word: &Word, idx: LatticePoint, x: f64, expected: LatticePoint, report: &mut PermutationReport) {
        report.checked += 1;
        match self.eval(word, x) {
            Ok(y) => {
                let got = self.family.locate(y);
                if got != Some(expected) {
                    report
                        .mismatches
                        .push(format!("{word} at {idx}: landed in {got:?}, expected {expected}"));
                }
            }
            Err(e) => report.mismatches.push(format!("{word} at {idx}: {e}")),
        }
    }

    /// CSV with columns `x,gx,dgx` for each sample point.
    pub fn write_eval_csv<W: Write>(&self, word: &Word, xs: &[f64], out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for &x in xs {
            let ev = self.apply_word(word, x)?;
            writer
                .serialize(EvalRow { x, gx: ev.value, dgx: ev.derivative() })
                .map_err(|e| Error::Consistency(format!("csv: {e}")))?;
        }
        writer.flush().map_err(|e| Error::Consistency(format!("csv: {e}")))?;
        Ok(())
    }
}

fn check_generator(gen: Generator) -> Result<()> {
    match gen {
        Generator::E | Generator::D | Generator::F => Ok(()),
        other => Err(Error::InvalidParameter(format!(
            "letter {} is not a generator of the realized action; expand it into e, d, f",
            other.letter()
        ))),
    }
}

/// The letters already applied when factor `pos` failed at repetition `rep`,
/// written as a word (the failing letter is leftmost).
fn applied_prefix(factors: &[(Generator, i64)], pos: usize, rep: u64) -> String {
    let (gen, n) = factors[pos];
    let mut done: Vec<(Generator, i64)> = vec![(gen, n.signum() * (rep as i64 + 1))];
    done.extend_from_slice(&factors[pos + 1..]);
    Word::from_factors(done).to_string()
}
