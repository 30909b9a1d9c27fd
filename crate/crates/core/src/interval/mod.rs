//! Exponent feasibility, interval lengths, and their layout on `[0,1]`.

mod layout;
mod params;
mod phi;

pub use layout::{raw_length, IntervalFamily};
pub use params::{
    check_conditions, search_feasible, ConditionReport, FeasibilityGrid, ParamConfig, ParamSet,
    CONDITION_NAMES,
};
pub use phi::{Phi, ThetaSplice};
