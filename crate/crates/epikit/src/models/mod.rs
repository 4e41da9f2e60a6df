//! SIR, SI, and SIS compartmental dynamics.
//!
//! Rates and closed forms live in [`rates`]; trajectories come from a
//! classical fixed-step RK4 integrator. The SI model works on population
//! fractions (`m = 1`); SIR and SIS work in persons.

mod end_time;
mod integrate;
mod params;
mod rates;
pub(crate) mod rk4;

pub use end_time::{sir_end_time, EndTimeReport, TerminationReason};
pub use integrate::{integrate, Model, Trajectory};
pub use params::{force_of_infection, transmission_rate, FoiScaling, ModelParams, DEFAULT_ALPHA2};
pub use rates::{
    si_closed_form, si_rates, sir_rates, sir_static_estimate, sis_equilibria, sis_rates,
    EquilibriumPoint, SisEquilibria,
};

pub(crate) use rates::sir_rhs;
pub(crate) use rk4::integrate_fixed as rk4_integrate_fixed;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("integration unstable at t = {t}: step size too large for these parameters")]
    StepTooLarge { t: f64 },
}

pub(crate) fn domain(msg: impl Into<String>) -> ModelError {
    ModelError::Domain(msg.into())
}

/// Compartment occupancy of a population of size `m` at one instant.
///
/// `r` stays 0 for the SI and SIS models; for SI all fields are
/// population fractions and `m` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompartmentState {
    pub s: f64,
    pub i: f64,
    pub r: f64,
    pub m: f64,
}

impl CompartmentState {
    pub fn new(s: f64, i: f64, r: f64, m: f64) -> Result<Self, ModelError> {
        if !(s >= 0.0 && i >= 0.0 && r >= 0.0) {
            return Err(domain("compartments must be non-negative"));
        }
        if !(m > 0.0) {
            return Err(domain("population size must be positive"));
        }
        Ok(CompartmentState { s, i, r, m })
    }

    /// SIR state in persons.
    pub fn sir(s: f64, i: f64, r: f64, m: f64) -> Result<Self, ModelError> {
        Self::new(s, i, r, m)
    }

    /// SI state from an initial infectious fraction.
    pub fn si_fraction(i0: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&i0) {
            return Err(domain("infectious fraction must lie in [0, 1]"));
        }
        Self::new(1.0 - i0, i0, 0.0, 1.0)
    }

    /// SIS state in persons; the whole population is either susceptible
    /// or infectious.
    pub fn sis(i: f64, m: f64) -> Result<Self, ModelError> {
        if i > m {
            return Err(domain("infectious count exceeds population"));
        }
        Self::new(m - i, i, 0.0, m)
    }

    /// Absolute conservation drift `|s + i + r − m|`.
    pub fn drift(&self) -> f64 {
        (self.s + self.i + self.r - self.m).abs()
    }
}
