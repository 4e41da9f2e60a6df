//! Fixed-step trajectories for the three compartmental models.

use super::rates::{si_rhs, sir_rhs, sis_rhs};
use super::rk4::integrate_fixed;
use super::{domain, CompartmentState, ModelError, ModelParams};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    Sir,
    Si,
    Sis,
}

/// Time-indexed compartment states at uniform spacing `dt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub dt: f64,
    pub points: Vec<(f64, CompartmentState)>,
    /// A compartment went negative during integration and was clamped.
    pub clamped: bool,
    /// Largest conservation drift |s + i + r − m| seen along the way.
    pub max_drift: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> &CompartmentState {
        &self.points.last().expect("trajectory is never empty").1
    }
}

/// RK4 trajectory of the chosen model from `init` over `horizon` days.
pub fn integrate(
    model: Model,
    params: &ModelParams,
    init: &CompartmentState,
    dt: f64,
    horizon: f64,
) -> Result<Trajectory, ModelError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(domain("step size must be positive and finite"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain("horizon must be positive and finite"));
    }
    let m = init.m;
    let limit = 10.0 * m;

    let (points, clamped) = match model {
        Model::Sir => {
            if init.drift() > 1e-6 * m {
                return Err(domain("SIR initial state must satisfy s + i + r = m"));
            }
            let raw = integrate_fixed(
                |_t, y: &[f64; 3]| sir_rhs(params, params.alpha2, 0.0, m, *y),
                [init.s, init.i, init.r],
                dt,
                horizon,
                limit,
            )?;
            let points: Vec<(f64, CompartmentState)> = raw
                .times
                .iter()
                .zip(&raw.states)
                .map(|(&t, &[s, i, r])| (t, CompartmentState { s, i, r, m }))
                .collect();
            (points, raw.clamped)
        }
        Model::Si => {
            if (m - 1.0).abs() > 1e-12 || (init.s + init.i - 1.0).abs() > 1e-6 {
                return Err(domain("SI initial state must be fractions with s + i = 1"));
            }
            let tau = params.tau();
            let raw = integrate_fixed(
                |_t, y: &[f64; 2]| si_rhs(tau, *y),
                [init.s, init.i],
                dt,
                horizon,
                limit,
            )?;
            let points: Vec<(f64, CompartmentState)> = raw
                .times
                .iter()
                .zip(&raw.states)
                .map(|(&t, &[s, i])| (t, CompartmentState { s, i, r: 0.0, m }))
                .collect();
            (points, raw.clamped)
        }
        Model::Sis => {
            if (init.s + init.i - m).abs() > 1e-6 * m {
                return Err(domain("SIS initial state must satisfy s + i = m"));
            }
            let (tau, alpha) = (params.tau(), params.alpha_sis);
            let raw = integrate_fixed(
                |_t, y: &[f64; 2]| sis_rhs(tau, alpha, *y),
                [init.s, init.i],
                dt,
                horizon,
                limit,
            )?;
            let points: Vec<(f64, CompartmentState)> = raw
                .times
                .iter()
                .zip(&raw.states)
                .map(|(&t, &[s, i])| (t, CompartmentState { s, i, r: 0.0, m }))
                .collect();
            (points, raw.clamped)
        }
    };

    let max_drift = points
        .iter()
        .map(|(_, state): &(f64, CompartmentState)| state.drift())
        .fold(0.0, f64::max);
    Ok(Trajectory {
        dt,
        points,
        clamped,
        max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{si_closed_form, sis_equilibria};
    use approx::assert_abs_diff_eq;

    #[test]
    fn sir_with_no_infectious_is_constant() {
        let params = ModelParams::default();
        let init = CompartmentState::sir(1000.0, 0.0, 0.0, 1000.0).unwrap();
        let traj = integrate(Model::Sir, &params, &init, 0.1, 10.0).unwrap();
        for (_, state) in &traj.points {
            assert_eq!(state.s, 1000.0);
            assert_eq!(state.i, 0.0);
        }
    }

    #[test]
    fn si_endpoint_matches_closed_form() {
        let params = ModelParams::new(1.0, 0.3).unwrap();
        let init = CompartmentState::si_fraction(0.01).unwrap();
        let traj = integrate(Model::Si, &params, &init, 0.01, 10.0).unwrap();
        let expected = si_closed_form(0.01, 0.3, 10.0);
        assert_abs_diff_eq!(traj.final_state().i, expected, epsilon = 1e-8);
    }

    #[test]
    fn si_is_monotone_for_interior_start() {
        let params = ModelParams::new(2.0, 0.5).unwrap();
        let init = CompartmentState::si_fraction(0.05).unwrap();
        let traj = integrate(Model::Si, &params, &init, 0.05, 20.0).unwrap();
        let infections: Vec<f64> = traj.points.iter().map(|(_, s)| s.i).collect();
        assert!(infections.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn sis_holds_at_endemic_point() {
        let (m, tau, alpha) = (1000.0, 0.001, 0.5);
        let params = ModelParams::new(tau, 1.0).unwrap().with_alpha_sis(alpha);
        let endemic = sis_equilibria(m, tau, alpha).unwrap().points[1].i;
        let init = CompartmentState::sis(endemic, m).unwrap();
        let traj = integrate(Model::Sis, &params, &init, 0.05, 50.0).unwrap();
        assert!((traj.final_state().i - endemic).abs() < 1e-9 * m);
    }

    #[test]
    fn sir_conservation_stays_tight() {
        let params = ModelParams::new(1.5, 0.4).unwrap().with_alpha2(0.2);
        let init = CompartmentState::sir(950.0, 50.0, 0.0, 1000.0).unwrap();
        let traj = integrate(Model::Sir, &params, &init, 0.01, 100.0).unwrap();
        assert!(traj.max_drift < 1e-6 * 1000.0);
    }

    #[test]
    fn central_difference_matches_rates_in_the_interior() {
        let params = ModelParams::new(1.0, 0.3).unwrap().with_alpha2(0.1);
        let init = CompartmentState::sir(990.0, 10.0, 0.0, 1000.0).unwrap();
        let dt = 0.01;
        let traj = integrate(Model::Sir, &params, &init, dt, 5.0).unwrap();
        for window in traj.points.windows(3).step_by(50) {
            let [(_, prev), (_, mid), (_, next)] = window else {
                continue;
            };
            let rates = crate::models::sir_rates(mid, &params);
            let fd = [
                (next.s - prev.s) / (2.0 * dt),
                (next.i - prev.i) / (2.0 * dt),
                (next.r - prev.r) / (2.0 * dt),
            ];
            for (numeric, analytic) in fd.iter().zip(rates) {
                assert_abs_diff_eq!(numeric, &analytic, epsilon = 1e-3);
            }
        }
    }

    #[test]
    fn growth_at_t0_iff_foi_exceeds_recovery() {
        // fractional scaling: epidemic grows initially iff α₁(i0)·s0 > α₂·i0
        let m = 1000.0;
        for (tau, alpha2) in [(0.5, 0.1), (0.05, 0.4), (0.3, 0.3)] {
            let params = ModelParams::new(tau, 1.0).unwrap().with_alpha2(alpha2);
            let init = CompartmentState::sir(900.0, 100.0, 0.0, m).unwrap();
            let a1 = crate::models::force_of_infection(&params, init.i, m).unwrap();
            let [_, di, _] = crate::models::sir_rates(&init, &params);
            assert_eq!(di > 0.0, a1 * init.s > alpha2 * init.i);
        }
    }

    #[test]
    fn bad_step_and_horizon_are_domain_errors() {
        let params = ModelParams::default();
        let init = CompartmentState::si_fraction(0.1).unwrap();
        assert!(integrate(Model::Si, &params, &init, 0.0, 1.0).is_err());
        assert!(integrate(Model::Si, &params, &init, 0.1, -1.0).is_err());
    }
}
