//! Exponent feasibility: the eight inequalities on `(α, p, q, r)` under
//! which the interval lengths `1/(|i|^p + |j|^q + |k|^r + 1)` make the
//! realized generators C^{1+α}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used for the non-strict inequalities, so that parameter
/// choices sitting exactly on a boundary (such as `p = 4/α`) are not rejected
/// by rounding.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl ParamSet {
    pub fn new(alpha: f64, p: f64, q: f64, r: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        for (name, v) in [("p", p), ("q", q), ("r", r)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        Ok(ParamSet { alpha, p, q, r })
    }

    /// The closed-form choice `p = q = 4/α`, `r = 4/3`.
    pub fn closed_form(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        ParamSet::new(alpha, 4.0 / alpha, 4.0 / alpha, 4.0 / 3.0)
    }

    /// Same exponents, different Hölder target.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        ParamSet::new(alpha, self.p, self.q, self.r)
    }
}

/// JSON form of a parameter choice: either explicit exponents or
/// `{"alpha": …, "auto": true}` for the closed-form choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamConfig {
    Explicit { alpha: f64, p: f64, q: f64, r: f64 },
    Auto { alpha: f64, auto: bool },
}

impl ParamConfig {
    /// Auto mode requires `α ∈ (0, 1/2)`, the range where the closed form is
    /// feasible.
    pub fn resolve(&self) -> Result<ParamSet> {
        match *self {
            ParamConfig::Explicit { alpha, p, q, r } => ParamSet::new(alpha, p, q, r),
            ParamConfig::Auto { alpha, auto: true } => {
                if !(alpha > 0.0 && alpha < 0.5) {
                    return Err(Error::InvalidParameter(format!(
                        "auto parameters need alpha in (0, 1/2), got {alpha}"
                    )));
                }
                ParamSet::closed_form(alpha)
            }
            ParamConfig::Auto { auto: false, .. } => Err(Error::InvalidParameter(
                "`auto: false` requires explicit p, q, r".into(),
            )),
        }
    }
}

pub const CONDITION_NAMES: [&str; 8] = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// Conditions (i) through (viii), in order.
    pub conditions: [bool; 8],
    pub feasible: bool,
}

impl ConditionReport {
    pub fn failing(&self) -> Vec<&'static str> {
        CONDITION_NAMES
            .iter()
            .zip(self.conditions)
            .filter(|(_, ok)| !ok)
            .map(|(name, _)| *name)
            .collect()
    }
}

fn leq(a: f64, b: f64) -> bool {
    a <= b + BOUNDARY_SLACK * a.abs().max(b.abs()).max(1.0)
}

pub fn check_conditions(params: &ParamSet) -> ConditionReport {
    let ParamSet { alpha, p, q, r } = *params;
    let conditions = [
        leq(alpha + r, 2.0),
        leq(4.0 * r, p),
        leq(4.0 * r, q),
        leq(4.0, p * (1.0 - alpha)),
        leq(4.0, q * (1.0 - alpha)),
        // strict
        1.0 / p + 1.0 / q + 1.0 / r < 1.0,
        leq(alpha, 1.0 / p + 1.0 / r) && leq(alpha * p * (r - 1.0), r),
        leq(alpha, 1.0 / q + 1.0 / r) && leq(alpha * q * (r - 1.0), r),
    ];
    ConditionReport { conditions, feasible: conditions.iter().all(|&c| c) }
}

/// Search grid: logarithmic in `p` and `q`, linear in `r ∈ (1, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityGrid {
    pub pq_min: f64,
    pub pq_max: f64,
    pub pq_points: usize,
    pub r_points: usize,
}

impl Default for FeasibilityGrid {
    fn default() -> Self {
        FeasibilityGrid { pq_min: 4.0, pq_max: 400.0, pq_points: 64, r_points: 64 }
    }
}

impl FeasibilityGrid {
    fn pq_values(&self) -> Vec<f64> {
        let n = self.pq_points.max(2);
        let (lo, hi) = (self.pq_min.ln(), self.pq_max.ln());
        (0..n)
            .map(|m| (lo + (hi - lo) * m as f64 / (n - 1) as f64).exp())
            .collect()
    }

    fn r_values(&self) -> Vec<f64> {
        let n = self.r_points.max(1);
        (1..=n).map(|m| 1.0 + m as f64 / n as f64).collect()
    }
}

/// Returns a feasible parameter set for `alpha`, trying the closed form
/// `(4/α, 4/α, 4/3)` first and then the grid. `None` if nothing passes.
pub fn search_feasible(alpha: f64, grid: &FeasibilityGrid) -> Result<Option<ParamSet>> {
    let candidate = ParamSet::closed_form(alpha)?;
    if check_conditions(&candidate).feasible {
        return Ok(Some(candidate));
    }
    let pq = grid.pq_values();
    for &r in &grid.r_values() {
        for &p in &pq {
            for &q in &pq {
                let ps = ParamSet { alpha, p, q, r };
                if check_conditions(&ps).feasible {
                    return Ok(Some(ps));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_at_point_four() {
        let ps = ParamSet::new(0.4, 10.0, 10.0, 4.0 / 3.0).unwrap();
        let rep = check_conditions(&ps);
        assert!(rep.feasible, "{:?}", rep.failing());
        assert!((1.0 / 10.0 + 1.0 / 10.0 + 0.75_f64 - 0.95).abs() < 1e-15);
    }

    #[test]
    fn half_fails_only_on_strict_summability() {
        let ps = ParamSet::new(0.5, 8.0, 8.0, 4.0 / 3.0).unwrap();
        let rep = check_conditions(&ps);
        assert!(!rep.feasible);
        assert!(!rep.conditions[5]);
        assert_eq!(rep.failing(), vec!["vi"]);
    }

    #[test]
    fn small_alpha_is_feasible() {
        for alpha in [1e-3, 1e-2, 0.05] {
            assert!(check_conditions(&ParamSet::closed_form(alpha).unwrap()).feasible);
        }
    }

    #[test]
    fn search_examples() {
        let grid = FeasibilityGrid::default();
        let found = search_feasible(0.45, &grid).unwrap().unwrap();
        assert!((found.p - 80.0 / 9.0).abs() < 1e-12);
        assert!((found.r - 4.0 / 3.0).abs() < 1e-15);
        assert!(search_feasible(0.55, &grid).unwrap().is_none());
        assert!(search_feasible(0.5, &grid).unwrap().is_none());
    }

    #[test]
    fn domain_errors() {
        assert!(ParamSet::new(0.4, -1.0, 10.0, 1.2).is_err());
        assert!(ParamSet::new(0.0, 1.0, 10.0, 1.2).is_err());
        assert!(ParamSet::new(1.0, 1.0, 10.0, 1.2).is_err());
        assert!(ParamSet::new(0.4, 10.0, 10.0, f64::NAN).is_err());
    }

    #[test]
    fn json_configs() {
        let explicit: ParamConfig =
            serde_json::from_str(r#"{"alpha":0.4,"p":10,"q":10,"r":1.3333333333333333}"#).unwrap();
        assert_eq!(explicit.resolve().unwrap().p, 10.0);
        let auto: ParamConfig = serde_json::from_str(r#"{"alpha":0.4,"auto":true}"#).unwrap();
        assert_eq!(auto.resolve().unwrap(), ParamSet::closed_form(0.4).unwrap());
        let bad: ParamConfig = serde_json::from_str(r#"{"alpha":0.6,"auto":true}"#).unwrap();
        assert!(bad.resolve().is_err());
    }
}
