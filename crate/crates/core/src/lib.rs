//! A C^{1+α} action of the group N4 of 4×4 integer lower unitriangular
//! matrices on the closed interval, for every α < 1/2, together with the
//! tooling that checks it numerically.
//!
//! The pieces, bottom up:
//!
//! * [`group`]: exact normal-form arithmetic in N4.
//! * [`lattice`]: the order-preserving action of N4 on ℤ³.
//! * [`interval`]: exponent feasibility, interval lengths, and the
//!   lexicographic layout of the intervals `I_{i,j,k}` on `[0,1]`.
//! * [`chart`]: an equivariant family of interval diffeomorphisms built from
//!   charts onto ℝ.
//! * [`realization`]: the generators `e, d, f` assembled piecewise.
//! * [`analysis`]: Hölder constants, the estimate chain, the Markov series,
//!   translation numbers, and the combinatorial certificate.

pub mod analysis;
pub mod chart;
pub mod error;
pub mod group;
pub mod interval;
pub mod lattice;
pub mod quadrature;
pub mod realization;

pub use error::{Error, Result};
pub use group::{Generator, IntMatrix4, N4Element, Word};
pub use interval::{IntervalFamily, ParamSet};
pub use lattice::{Convention, LatticePoint};

pub use realization::Realization;
