use dashmap::DashMap;
use sha2::{Digest, Sha256};

use super::chart::Chart;

pub(crate) const ONE_THIRD: f64 = 1.0 / 3.0;
pub(crate) const TWO_THIRDS: f64 = 2.0 / 3.0;

/// The C^∞ step `w`: zero on `[0, 1/3]`, one on `[2/3, 1]`, and the
/// logistic blend of `exp(−1/s)` and `exp(−1/(1−s))` in between, with
/// `s = 3t − 1`.
pub fn step(t: f64) -> f64 {
    if t <= ONE_THIRD {
        0.0
    } else if t >= TWO_THIRDS {
        1.0
    } else {
        let s = 3.0 * t - 1.0;
        1.0 / (1.0 + (1.0 / s - 1.0 / (1.0 - s)).exp())
    }
}

/// `w'(t)`.
pub fn step_d1(t: f64) -> f64 {
    if t <= ONE_THIRD || t >= TWO_THIRDS {
        0.0
    } else {
        let s = 3.0 * t - 1.0;
        let w = step(t);
        3.0 * w * (1.0 - w) * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s)))
    }
}

/// Shared chart data: the step profile plus a memo of chart constants keyed
/// by the exact bits of the length ratio.
#[derive(Debug, Default)]
pub struct ChartProfile {
    memo: DashMap<u64, Chart>,
}

impl ChartProfile {
    pub fn new() -> Self {
        ChartProfile::default()
    }

    /// Chart for an interval of length `len` whose left neighbor has length
    /// `len_prev`.
    pub fn chart_for(&self, len_prev: f64, len: f64) -> Chart {
        self.chart(len_prev / len)
    }

    pub fn chart(&self, ratio: f64) -> Chart {
        *self
            .memo
            .entry(ratio.to_bits())
            .or_insert_with(|| Chart::new(ratio))
    }

    pub fn cached_charts(&self) -> usize {
        self.memo.len()
    }

    /// SHA-256 over a description of the profile and a 4097-point table of
    /// the step, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"chart profile: poles t^-2 and (1-t)^-2, knots 1/3 2/3, logistic exp(-1/s) step\n");
        for n in 0..=4096 {
            let t = n as f64 / 4096.0;
            hasher.update(step(t).to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_shape() {
        assert_eq!(step(0.0), 0.0);
        assert_eq!(step(ONE_THIRD), 0.0);
        assert_eq!(step(TWO_THIRDS), 1.0);
        assert!((step(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for n in 0..=3000 {
            let t = n as f64 / 3000.0;
            let w = step(t);
            assert!((0.0..=1.0).contains(&w));
            assert!(w >= prev);
            prev = w;
        }
    }

    #[test]
    fn step_is_flat_at_knots() {
        for t in [ONE_THIRD + 1e-4, TWO_THIRDS - 1e-4] {
            assert!(step_d1(t).abs() < 1e-12, "{}", step_d1(t));
        }
        assert!(step(ONE_THIRD + 1e-4) < 1e-12);
        assert!(1.0 - step(TWO_THIRDS - 1e-4) < 1e-12);
    }

    #[test]
    fn step_derivative_matches_difference_quotient() {
        for &t in &[0.4, 0.45, 0.5, 0.55, 0.6] {
            let h = 1e-6;
            let fd = (step(t + h) - step(t - h)) / (2.0 * h);
            assert!((fd - step_d1(t)).abs() < 1e-7);
        }
    }

    #[test]
    fn memo_reuses_charts() {
        let profile = ChartProfile::new();
        let a = profile.chart_for(2.0, 1.0);
        let b = profile.chart(2.0);
        assert_eq!(a, b);
        assert_eq!(profile.cached_charts(), 1);
        assert_eq!(profile.content_hash(), ChartProfile::new().content_hash());
        assert_eq!(profile.content_hash().len(), 64);
    }
}
