//! Epidemic case-record analytics and compartmental model simulation.
//!
//! The crate is organised around the stages of an outbreak analysis:
//!
//! - [`ingest`]: parse patient-level case records from CSV and build the
//!   directed infector→infectee contact graph.
//! - [`metrics`]: reproduction number and case fatality rate, per region
//!   and as per-day min/max/national series.
//! - [`staging`]: classify the infected population into transmission
//!   states 1–3 from chain depth in the contact graph.
//! - [`models`]: SIR, SI, and SIS compartmental dynamics with a fixed-step
//!   RK4 integrator, the SI logistic closed form, SIS equilibria, and
//!   epidemic end-time estimation.
//! - [`empirical`]: total-infected formula evaluation, parameter sweeps,
//!   and fatality/recovery scenario runs.
//! - [`report`]: CSV/JSON emission with reproducible metadata headers.
//!
//! The `epikit` binary ([`cli`]) exposes each stage as a subcommand.

pub mod cli;
pub mod empirical;
pub mod ingest;
pub mod metrics;
pub mod models;
pub mod report;
pub mod staging;
