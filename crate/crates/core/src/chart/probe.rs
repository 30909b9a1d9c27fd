//! Empirical distortion constant of the map family.

use serde::{Deserialize, Serialize};

use super::map::{Frame, PTMap};
use super::profile::ChartProfile;
use crate::error::{Error, Result};

/// Lengths `(|I'|, |I|, |J'|, |J|)`.
pub type Quadruple = (f64, f64, f64, f64);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    /// `sup |D log Dφ|·|I| / |ρ − 1|` over maps with `ρ ≠ 1`.
    pub m_estimate: f64,
    /// `sup |D log Dφ|·|I|` over maps with `ρ = 1` (should vanish).
    pub unit_rho_residual: f64,
    pub maps: usize,
    pub points: usize,
}

/// Whether `max ≤ 2·min` over the four lengths.
pub fn comparable(q: &Quadruple) -> bool {
    let v = [q.0, q.1, q.2, q.3];
    let max = v.iter().cloned().fold(f64::MIN, f64::max);
    let min = v.iter().cloned().fold(f64::MAX, f64::min);
    min > 0.0 && max <= 2.0 * min
}

/// Samples `points_per_map` evenly spaced points (endpoints included) on
/// each map and returns the distortion constant.
pub fn regularity_probe(
    profile: &ChartProfile,
    quadruples: &[Quadruple],
    points_per_map: usize,
) -> Result<ProbeReport> {
    let points_per_map = points_per_map.max(2);
    let mut report = ProbeReport { m_estimate: 0.0, unit_rho_residual: 0.0, maps: 0, points: 0 };
    for q in quadruples {
        if !comparable(q) {
            return Err(Error::InvalidParameter(format!(
                "quadruple {q:?} violates max ≤ 2·min"
            )));
        }
        let (prev_i, len_i, prev_j, len_j) = *q;
        let map = PTMap::new(profile, Frame::new(0.0, len_i, prev_i)?, Frame::new(0.0, len_j, prev_j)?);
        let dev = (map.rho() - 1.0).abs();
        let mut sup: f64 = 0.0;
        for n in 0..points_per_map {
            let x = len_i * n as f64 / (points_per_map - 1) as f64;
            sup = sup.max(map.log_derivative_slope(x)?.abs() * len_i);
        }
        report.maps += 1;
        report.points += points_per_map;
        if dev <= 1e-14 {
            report.unit_rho_residual = report.unit_rho_residual.max(sup);
        } else {
            report.m_estimate = report.m_estimate.max(sup / dev);
        }
    }
    Ok(report)
}
