//! Numerical checks on the realized action and on the length family.

mod dynamics;
mod estimates;
mod holder;
mod markov;

pub use dynamics::{
    is_certificate_base, j_interval, lemma_main_certificate, lex_family_check, moves, translation_number,
    Certificate, JInterval, LexReport, Relation, TranslationReport,
};
pub use estimates::{
    case1_bound, case1_term, eq_ineq_check, increment_sample, ineq_cases, isla_check, max_abs_g2,
    second_increment_check, BoxMax, IncrementReport, IncrementSample, IneqCase, IneqReport,
};
pub use holder::{
    holder_constant, write_sweep_csv, ArgMax, HolderReport, HolderSamples, SamplingPlan, Stratum, StratumMax,
};
pub use markov::{markov_expectation, transition_probabilities, HorizonEstimate, MarkovReport, PowerLengths};
