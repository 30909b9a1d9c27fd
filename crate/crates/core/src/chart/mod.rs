//! An equivariant family of diffeomorphisms between intervals.
//!
//! Every interval `I` with left neighbor `I'` carries a chart
//! `h_I: I → ℝ` that depends only on the ratio `|I'|/|I|`. The map from `I`
//! to `J` is `h_J⁻¹ ∘ h_I` in normalized coordinates, which makes the family
//! closed under composition.

#[allow(clippy::module_inception)]
mod chart;
mod map;
mod probe;
mod profile;

pub use chart::Chart;
pub use map::{Frame, PTMap};
pub use probe::{comparable, regularity_probe, ProbeReport, Quadruple};
pub use profile::{step, step_d1, ChartProfile};
