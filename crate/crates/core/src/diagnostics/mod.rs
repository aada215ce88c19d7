//! Computable versions of the analytic quantities used in the existence
//! proof, plus randomized checks of the inequalities it relies on.
//!
//! Monitors never abort a run: violations are collected as `WARN` strings.

mod energy;
mod lemmas;

pub use energy::{energy_trace, phi_t, EnergyTrace};
pub use lemmas::{lemma_property_suite, LemmaReport, PredicateResult};
