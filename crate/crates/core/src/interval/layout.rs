//! Truncated lexicographic layout of the intervals `I_{i,j,k}` on `[0,1]`.
//!
//! The box `max(|i|,|j|,|k|) ≤ N` is packed contiguously in lexicographic
//! order and normalized to total length one. Lengths of indices outside the
//! box are still available through [`raw_length`], since the maps on boundary
//! intervals need the length of their left neighbor.

use std::io::Write;

use serde::Serialize;

use super::params::{check_conditions, ParamSet};
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

/// `1/(|i|^p + |j|^q + |k|^r + 1)`, for any index.
pub fn raw_length(params: &ParamSet, idx: LatticePoint) -> f64 {
    1.0 / ((idx.i.abs() as f64).powf(params.p)
        + (idx.j.abs() as f64).powf(params.q)
        + (idx.k.abs() as f64).powf(params.r)
        + 1.0)
}

#[derive(Debug, Clone)]
pub struct IntervalFamily {
    params: ParamSet,
    radius: i64,
    side: usize,
    raw: Vec<f64>,
    /// Normalized left endpoints in lex order, followed by the final right
    /// endpoint `1.0`.
    prefix: Vec<f64>,
    total: f64,
}

#[derive(Debug, Serialize)]
struct LayoutRow {
    i: i64,
    j: i64,
    k: i64,
    raw_length: f64,
    normalized_length: f64,
    left_endpoint: f64,
}

impl IntervalFamily {
    /// Builds the layout; rejects infeasible parameters.
    pub fn build(params: ParamSet, radius: i64) -> Result<Self> {
        let report = check_conditions(&params);
        if !report.feasible {
            return Err(Error::Infeasible(report.failing()));
        }
        Self::build_unchecked(params, radius)
    }

    /// Builds the layout without the feasibility gate. Used to probe
    /// behaviour outside the admissible region.
    pub fn build_unchecked(params: ParamSet, radius: i64) -> Result<Self> {
        if radius < 1 {
            return Err(Error::InvalidParameter(format!("radius {radius} must be at least 1")));
        }
        let side = (2 * radius + 1) as usize;
        let count = side * side * side;
        let mut raw = Vec::with_capacity(count);
        for i in -radius..=radius {
            for j in -radius..=radius {
                for k in -radius..=radius {
                    raw.push(raw_length(&params, LatticePoint::new(i, j, k)));
                }
            }
        }
        let mut prefix = Vec::with_capacity(count + 1);
        let mut acc = 0.0;
        // Neumaier-compensated running sum
        let mut comp = 0.0;
        for &len in &raw {
            prefix.push(acc + comp);
            let t = acc + len;
            if acc.abs() >= len.abs() {
                comp += (acc - t) + len;
            } else {
                comp += (len - t) + acc;
            }
            acc = t;
        }
        let total = acc + comp;
        for v in prefix.iter_mut() {
            *v /= total;
        }
        prefix.push(1.0);
        Ok(IntervalFamily { params, radius, side, raw, prefix, total })
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Sum of raw lengths over the box.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn normalization(&self) -> f64 {
        1.0 / self.total
    }

    pub fn contains(&self, idx: LatticePoint) -> bool {
        idx.max_norm() <= self.radius
    }

    /// Position of `idx` in lexicographic order.
    pub fn flat_index(&self, idx: LatticePoint) -> Result<usize> {
        if !self.contains(idx) {
            return Err(Error::OutOfBox { index: idx, radius: self.radius });
        }
        let s = self.side as i64;
        let r = self.radius;
        Ok((((idx.i + r) * s + (idx.j + r)) * s + (idx.k + r)) as usize)
    }

    pub fn index_at(&self, flat: usize) -> LatticePoint {
        let s = self.side;
        let r = self.radius;
        LatticePoint::new(
            (flat / (s * s)) as i64 - r,
            ((flat / s) % s) as i64 - r,
            (flat % s) as i64 - r,
        )
    }

    pub fn indices(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (0..self.len()).map(move |n| self.index_at(n))
    }

    pub fn raw_length(&self, idx: LatticePoint) -> f64 {
        raw_length(&self.params, idx)
    }

    /// Length as a fraction of `[0,1]`; defined for every index, inside the
    /// box or not.
    pub fn length(&self, idx: LatticePoint) -> f64 {
        self.raw_length(idx) / self.total
    }

    pub fn left_endpoint(&self, idx: LatticePoint) -> Result<f64> {
        Ok(self.prefix[self.flat_index(idx)?])
    }

    /// Left endpoint of the lex successor (or `1.0` for the last interval).
    pub fn right_endpoint(&self, idx: LatticePoint) -> Result<f64> {
        Ok(self.prefix[self.flat_index(idx)? + 1])
    }

    pub fn midpoint(&self, idx: LatticePoint) -> Result<f64> {
        let n = self.flat_index(idx)?;
        Ok(0.5 * (self.prefix[n] + self.prefix[n + 1]))
    }

    /// Index of the interval containing `x`, or `None` outside `[0,1]`.
    /// A shared endpoint belongs to the interval on its right; `1.0` belongs
    /// to the last interval.
    pub fn locate(&self, x: f64) -> Option<LatticePoint> {
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        let count = self.len();
        let pos = self.prefix[..count].partition_point(|&left| left <= x);
        Some(self.index_at(pos.saturating_sub(1)))
    }

    /// CSV with columns `i,j,k,raw_length,normalized_length,left_endpoint`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for (n, idx) in self.indices().enumerate() {
            writer
                .serialize(LayoutRow {
                    i: idx.i,
                    j: idx.j,
                    k: idx.k,
                    raw_length: self.raw[n],
                    normalized_length: self.raw[n] / self.total,
                    left_endpoint: self.prefix[n],
                })
                .map_err(|e| Error::Consistency(format!("csv: {e}")))?;
        }
        writer.flush().map_err(|e| Error::Consistency(format!("csv: {e}")))?;
        Ok(())
    }
}
