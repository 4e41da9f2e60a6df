//! Epidemic end-time estimation from the SIR model.
//!
//! Integrates forward and stops at the first of: the infectious count
//! falling below `eps_i` (disease-free equilibrium), all derivatives
//! vanishing with infection still present (endemic equilibrium), or the
//! horizon running out.

use super::rates::{sir_rhs, sir_static_estimate};
use super::rk4::rk4_step;
use super::{domain, CompartmentState, ModelError, ModelParams};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TerminationReason {
    DiseaseFree,
    EndemicEquilibrium,
    HorizonExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndTimeReport {
    /// Days until the epidemic ended; equals the horizon when it did not.
    pub t_end: f64,
    pub termination: TerminationReason,
    pub final_state: CompartmentState,
    /// Snapshot (I, R) from the algebraic relations, for reporting only.
    pub static_estimate: (f64, f64),
}

pub fn sir_end_time(
    params: &ModelParams,
    init: &CompartmentState,
    eps_i: f64,
    eps_deriv: f64,
    horizon: f64,
    dt: f64,
) -> Result<EndTimeReport, ModelError> {
    if !(eps_i > 0.0) {
        return Err(domain("eps_i must be positive"));
    }
    if !(eps_deriv >= 0.0) {
        return Err(domain("eps_deriv must be non-negative"));
    }
    if !(dt > 0.0 && horizon > 0.0) {
        return Err(domain("dt and horizon must be positive"));
    }
    if init.drift() > 1e-6 * init.m {
        return Err(domain("SIR initial state must satisfy s + i + r = m"));
    }

    let m = init.m;
    let limit = 10.0 * m;
    let mut rhs = |_t: f64, y: &[f64; 3]| sir_rhs(params, params.alpha2, 0.0, m, *y);
    let mut y = [init.s, init.i, init.r];
    let mut t = 0.0;
    let report = |t_end: f64, termination: TerminationReason, y: [f64; 3]| {
        let final_state = CompartmentState {
            s: y[0],
            i: y[1],
            r: y[2],
            m,
        };
        EndTimeReport {
            t_end,
            termination,
            final_state,
            static_estimate: sir_static_estimate(&final_state, params),
        }
    };

    loop {
        if y[1] < eps_i {
            return Ok(report(t, TerminationReason::DiseaseFree, y));
        }
        let rates = rhs(t, &y);
        let rate_norm = rates.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
        if rate_norm < eps_deriv {
            return Ok(report(t, TerminationReason::EndemicEquilibrium, y));
        }
        if t >= horizon {
            return Ok(report(horizon, TerminationReason::HorizonExhausted, y));
        }
        y = rk4_step(&mut rhs, t, &y, dt);
        for value in &mut y {
            if *value < 0.0 {
                *value = 0.0;
            }
        }
        if y.iter().any(|v| !v.is_finite() || v.abs() > limit) {
            return Err(ModelError::StepTooLarge { t });
        }
        t += dt;
    }
}
