//! The Pólya-type walk on `ℕ₀^d` and the series `S(ω) = Σ_k |I_{ω_k}|^α`.
//!
//! From `(n₁,…,n_d)` the walk increments coordinate `i` with probability
//! `(1 + n_i)/(d + n₁ + … + n_d)`. Sampling is exact: one uniform integer
//! in `[0, d + Σn)` picks the coordinate.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact transition probabilities out of `state`.
pub fn transition_probabilities(state: &[u64]) -> Vec<Ratio<u64>> {
    let d = state.len() as u64;
    let total = d + state.iter().sum::<u64>();
    state.iter().map(|&n| Ratio::new(1 + n, total)).collect()
}

/// Lengths `1/(1 + Σ n_i^{e_i})`, with the powers tabulated up to the
/// longest horizon.
#[derive(Debug, Clone)]
pub struct PowerLengths {
    tables: Vec<Vec<f64>>,
}

impl PowerLengths {
    pub fn new(exponents: &[f64], max_coordinate: usize) -> Self {
        let tables = exponents
            .iter()
            .map(|&e| (0..=max_coordinate).map(|n| (n as f64).powf(e)).collect())
            .collect();
        PowerLengths { tables }
    }

    pub fn dimension(&self) -> usize {
        self.tables.len()
    }

    /// `1 + Σ n_i^{e_i}`; the reciprocal length.
    fn weight(&self, state: &[u64]) -> f64 {
        1.0 + state.iter().zip(&self.tables).map(|(&n, t)| t[n as usize]).sum::<f64>()
    }

    pub fn length(&self, state: &[u64]) -> f64 {
        1.0 / self.weight(state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonEstimate {
    pub horizon: u64,
    pub mean: f64,
    pub std_error: f64,
    /// 95% normal band `mean ± 1.96·std_error`.
    pub band: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub dimension: usize,
    pub alpha: f64,
    pub paths: u64,
    pub seed: u64,
    pub estimates: Vec<HorizonEstimate>,
    /// `|mean_{h+1} − mean_h| / mean_{h+1}` for consecutive horizons.
    pub relative_deltas: Vec<f64>,
}

impl MarkovReport {
    /// Consecutive deltas shrink and the last is below `tolerance`.
    pub fn is_cauchy(&self, tolerance: f64) -> bool {
        let d = &self.relative_deltas;
        !d.is_empty() && d.windows(2).all(|w| w[1] <= w[0]) && d[d.len() - 1] < tolerance
    }
}

/// Partial sums of `S` along one path, one per horizon (number of terms).
fn path_partial_sums(lengths: &PowerLengths, alpha: f64, horizons: &[u64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = lengths.dimension();
    let mut state = vec![0u64; d];
    let mut total = d as u64;
    let mut sum = 0.0;
    let mut out = Vec::with_capacity(horizons.len());
    let last = *horizons.last().expect("at least one horizon");
    let mut next = 0;
    for step in 0..last {
        sum += lengths.weight(&state).powf(-alpha);
        while next < horizons.len() && step + 1 == horizons[next] {
            out.push(sum);
            next += 1;
        }
        let mut pick = rng.gen_range(0..total);
        for n in state.iter_mut() {
            let w = 1 + *n;
            if pick < w {
                *n += 1;
                break;
            }
            pick -= w;
        }
        total += 1;
    }
    out
}

/// Monte Carlo estimate of `E[S]` truncated at each horizon. All horizons
/// are read off the same paths; path `n` uses stream `n` of the seeded
/// generator.
pub fn markov_expectation(
    lengths: &PowerLengths,
    alpha: f64,
    paths: u64,
    horizons: &[u64],
    seed: u64,
) -> Result<MarkovReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if paths < 2 {
        return Err(Error::InvalidParameter("need at least two paths".into()));
    }
    if horizons.is_empty() || horizons.windows(2).any(|w| w[0] >= w[1]) || horizons[0] == 0 {
        return Err(Error::InvalidParameter(format!("horizons must be increasing and positive: {horizons:?}")));
    }
    let needed = *horizons.last().unwrap() as usize;
    if lengths.tables.iter().any(|t| t.len() < needed) {
        return Err(Error::InvalidParameter(format!("length tables too short for horizon {needed}")));
    }
    let sums: Vec<Vec<f64>> = (0..paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(path);
            path_partial_sums(lengths, alpha, horizons, &mut rng)
        })
        .collect();
    let nf = paths as f64;
    let estimates: Vec<HorizonEstimate> = horizons
        .iter()
        .enumerate()
        .map(|(h, &horizon)| {
            let mean = sums.iter().map(|s| s[h]).sum::<f64>() / nf;
            let var = sums.iter().map(|s| (s[h] - mean).powi(2)).sum::<f64>() / (nf - 1.0);
            let std_error = (var / nf).sqrt();
            HorizonEstimate { horizon, mean, std_error, band: (mean - 1.96 * std_error, mean + 1.96 * std_error) }
        })
        .collect();
    let relative_deltas = estimates.windows(2).map(|w| (w[1].mean - w[0].mean).abs() / w[1].mean).collect();
    Ok(MarkovReport {
        dimension: lengths.dimension(),
        alpha,
        paths,
        seed,
        estimates,
        relative_deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_rows() {
        let third = Ratio::new(1u64, 3);
        assert_eq!(transition_probabilities(&[0, 0, 0]), vec![third; 3]);
        assert_eq!(
            transition_probabilities(&[1, 0, 0]),
            vec![Ratio::new(1, 2), Ratio::new(1, 4), Ratio::new(1, 4)]
        );
        for state in [[3u64, 0, 7], [0, 0, 1], [10, 20, 30]] {
            let row = transition_probabilities(&state);
            assert_eq!(row.iter().sum::<Ratio<u64>>(), Ratio::from_integer(1));
        }
    }

    #[test]
    fn empirical_first_steps_match_rows() {
        // from (1,0,0) reached after one step, the next step splits 1/2, 1/4, 1/4
        let mut counts = [0u32; 3];
        let mut trials = 0u32;
        for path in 0..40_000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            rng.set_stream(path);
            let first = rng.gen_range(0..3u64);
            if first != 0 {
                continue;
            }
            trials += 1;
            let pick = rng.gen_range(0..4u64);
            counts[if pick < 2 { 0 } else if pick < 3 { 1 } else { 2 }] += 1;
        }
        let f = |c: u32| c as f64 / trials as f64;
        assert!((f(counts[0]) - 0.5).abs() < 0.02);
        assert!((f(counts[1]) - 0.25).abs() < 0.02);
    }

    #[test]
    fn single_step_horizon_is_origin_term() {
        let lengths = PowerLengths::new(&[2.0, 2.0], 10);
        let rep = markov_expectation(&lengths, 0.5, 10, &[1, 2], 0).unwrap();
        assert_eq!(rep.estimates[0].mean, 1.0);
        // second term is (1 + 1)^(-1/2) whichever coordinate moved
        assert!((rep.estimates[1].mean - (1.0 + 0.5f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn deterministic_per_seed() {
        let lengths = PowerLengths::new(&[3.0, 3.0, 1.5], 1000);
        let a = markov_expectation(&lengths, 0.4, 64, &[10, 100, 1000], 5).unwrap();
        let b = markov_expectation(&lengths, 0.4, 64, &[10, 100, 1000], 5).unwrap();
        assert_eq!(a, b);
        assert!(a.estimates.windows(2).all(|w| w[1].mean >= w[0].mean));
    }

    #[test]
    fn bad_inputs_rejected() {
        let lengths = PowerLengths::new(&[2.0], 10);
        assert!(markov_expectation(&lengths, 0.5, 10, &[100], 0).is_err());
        assert!(markov_expectation(&lengths, 0.5, 10, &[5, 3], 0).is_err());
        assert!(markov_expectation(&lengths, -1.0, 10, &[5], 0).is_err());
    }
}
