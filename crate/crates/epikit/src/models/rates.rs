//! Rate equations, the SI closed form, SIS equilibria, and the static
//! SIR snapshot estimator.

use super::params::foi_unchecked;
use super::{domain, CompartmentState, ModelError, ModelParams};
use serde::Serialize;

/// Relative tolerance for "the compartments must sum to the population"
/// preconditions.
const PARTITION_TOL: f64 = 1e-6;

/// SIR rates `(dS/dt, dI/dt, dR/dt)` in persons per day.
pub fn sir_rates(state: &CompartmentState, params: &ModelParams) -> [f64; 3] {
    sir_rhs(params, params.alpha2, 0.0, state.m, [state.s, state.i, state.r])
}

/// Shared SIR right-hand side, with a time-dependent recovery rate and an
/// extra removal rate (deaths) entering the recovered compartment.
///
/// The scenario engine and the plain model both go through this function
/// so that constant-rate scenario runs are bit-identical to plain runs.
pub(crate) fn sir_rhs(
    params: &ModelParams,
    alpha2: f64,
    gamma: f64,
    m: f64,
    [s, i, _r]: [f64; 3],
) -> [f64; 3] {
    let a1 = foi_unchecked(params, i, m);
    let removal = (alpha2 + gamma) * i;
    [-a1 * s, a1 * s - removal, removal]
}

/// SI rates `(dS/dt, dI/dt)` over population fractions.
pub fn si_rates(state: &CompartmentState, params: &ModelParams) -> Result<[f64; 2], ModelError> {
    if (state.s + state.i - 1.0).abs() > PARTITION_TOL {
        return Err(domain("SI state fractions must satisfy s + i = 1"));
    }
    Ok(si_rhs(params.tau(), [state.s, state.i]))
}

pub(crate) fn si_rhs(tau: f64, [s, i]: [f64; 2]) -> [f64; 2] {
    [-tau * s * i, tau * i * (1.0 - i)]
}

/// Logistic closed form for the SI infectious fraction at time `t`.
pub fn si_closed_form(i0: f64, tau: f64, t: f64) -> f64 {
    if i0 <= 0.0 {
        return 0.0;
    }
    if i0 >= 1.0 {
        return 1.0;
    }
    // I₀e^{τt} / (1 − I₀ + I₀e^{τt}), rearranged to avoid overflow of
    // e^{τt} for large arguments.
    1.0 / (1.0 + ((1.0 - i0) / i0) * (-tau * t).exp())
}

/// SIS rates `(dS/dt, dI/dt)` in persons per day.
pub fn sis_rates(state: &CompartmentState, params: &ModelParams) -> Result<[f64; 2], ModelError> {
    if (state.s + state.i - state.m).abs() > PARTITION_TOL * state.m {
        return Err(domain("SIS state must satisfy s + i = m"));
    }
    Ok(sis_rhs(params.tau(), params.alpha_sis, [state.s, state.i]))
}

pub(crate) fn sis_rhs(tau: f64, alpha: f64, [s, i]: [f64; 2]) -> [f64; 2] {
    [-tau * s * i + alpha * i, tau * s * i - alpha * i]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumPoint {
    pub i: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SisEquilibria {
    pub points: Vec<EquilibriumPoint>,
    /// Set when τ = 0: no transmission at all, only I = 0 remains.
    pub degenerate: bool,
}

/// Equilibrium infectious counts of the SIS model: I = 0 always, and the
/// endemic point I = M − α/τ when it is positive.
pub fn sis_equilibria(m: f64, tau: f64, alpha: f64) -> Result<SisEquilibria, ModelError> {
    if !(m > 0.0) {
        return Err(domain("population size must be positive"));
    }
    if !(tau >= 0.0) || !(alpha >= 0.0) {
        return Err(domain("rates must be non-negative"));
    }
    if tau == 0.0 {
        return Ok(SisEquilibria {
            points: vec![EquilibriumPoint { i: 0.0, stable: true }],
            degenerate: true,
        });
    }
    let endemic = m - alpha / tau;
    let mut points = vec![EquilibriumPoint {
        i: 0.0,
        stable: tau * m <= alpha,
    }];
    if endemic > 0.0 {
        points.push(EquilibriumPoint {
            i: endemic,
            stable: tau * m > alpha,
        });
    }
    Ok(SisEquilibria {
        points,
        degenerate: false,
    })
}

/// Snapshot estimate `(I, R)` from the algebraic relations I = α₁S and
/// R = α₂I − γI.
///
/// These are reporting-time relations, not dynamics; the integrator never
/// uses them.
pub fn sir_static_estimate(state: &CompartmentState, params: &ModelParams) -> (f64, f64) {
    let i_est = foi_unchecked(params, state.i, state.m) * state.s;
    let r_est = (params.alpha2 - params.gamma) * i_est;
    (i_est, r_est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::FoiScaling;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sir_rates_are_zero_without_infectious() {
        let state = CompartmentState::sir(1000.0, 0.0, 0.0, 1000.0).unwrap();
        assert_eq!(sir_rates(&state, &ModelParams::default()), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn sir_rates_hand_example() {
        let params = ModelParams::new(1.0, 0.3).unwrap().with_alpha2(0.1);
        let state = CompartmentState::sir(990.0, 10.0, 0.0, 1000.0).unwrap();
        let [ds, di, dr] = sir_rates(&state, &params);
        assert_abs_diff_eq!(ds, -2.97, epsilon = 1e-12);
        assert_abs_diff_eq!(di, 1.97, epsilon = 1e-12);
        assert_abs_diff_eq!(dr, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sir_rates_conserve_population() {
        let params = ModelParams::new(2.0, 0.7)
            .unwrap()
            .with_alpha2(0.25)
            .with_foi_scaling(FoiScaling::PaperLiteral);
        let state = CompartmentState::sir(700.0, 250.0, 50.0, 1000.0).unwrap();
        let [ds, di, dr] = sir_rates(&state, &params);
        assert_abs_diff_eq!(ds + di + dr, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn si_rates_examples() {
        let params = ModelParams::new(1.0, 0.3).unwrap();
        let zero = CompartmentState::si_fraction(0.0).unwrap();
        assert_eq!(si_rates(&zero, &params).unwrap(), [0.0, 0.0]);

        let half = CompartmentState::si_fraction(0.5).unwrap();
        let [_, di] = si_rates(&half, &params).unwrap();
        assert_abs_diff_eq!(di, 0.075, epsilon = 1e-12);

        let full = CompartmentState::si_fraction(1.0).unwrap();
        let [_, di] = si_rates(&full, &params).unwrap();
        assert_abs_diff_eq!(di, 0.0);
    }

    #[test]
    fn si_rates_reject_broken_partition() {
        let params = ModelParams::default();
        let bad = CompartmentState {
            s: 0.7,
            i: 0.5,
            r: 0.0,
            m: 1.0,
        };
        assert!(si_rates(&bad, &params).is_err());
    }

    #[test]
    fn si_closed_form_fixed_points() {
        for t in [0.0, 1.0, 50.0] {
            assert_eq!(si_closed_form(0.0, 0.3, t), 0.0);
            assert_eq!(si_closed_form(1.0, 0.3, t), 1.0);
        }
        assert_abs_diff_eq!(si_closed_form(0.25, 0.7, 0.0), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn si_closed_form_reference_value() {
        // 0.01·e^3 / (0.99 + 0.01·e^3)
        assert_abs_diff_eq!(si_closed_form(0.01, 0.3, 10.0), 0.16866, epsilon = 1e-5);
    }

    #[test]
    fn si_closed_form_saturates_without_overflow() {
        let v = si_closed_form(0.01, 0.3, 1e6);
        assert!(v.is_finite());
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sis_rates_examples() {
        let params = ModelParams::new(0.001, 1.0).unwrap().with_alpha_sis(0.5);
        let zero = CompartmentState::sis(0.0, 1000.0).unwrap();
        assert_eq!(sis_rates(&zero, &params).unwrap(), [0.0, 0.0]);

        let state = CompartmentState::sis(200.0, 1000.0).unwrap();
        let [ds, di] = sis_rates(&state, &params).unwrap();
        assert_abs_diff_eq!(di, 60.0, epsilon = 1e-9);
        assert_abs_diff_eq!(ds + di, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn sis_endemic_point_has_zero_rate() {
        let (m, tau, alpha) = (1000.0, 0.001, 0.5);
        let params = ModelParams::new(tau, 1.0).unwrap().with_alpha_sis(alpha);
        let endemic = m - alpha / tau;
        let state = CompartmentState::sis(endemic, m).unwrap();
        let [_, di] = sis_rates(&state, &params).unwrap();
        assert_abs_diff_eq!(di, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn sis_equilibria_examples() {
        let eq = sis_equilibria(1000.0, 0.001, 0.5).unwrap();
        let values: Vec<f64> = eq.points.iter().map(|p| p.i).collect();
        assert_eq!(values, vec![0.0, 500.0]);
        assert!(!eq.points[0].stable);
        assert!(eq.points[1].stable);

        // τm < α: endemic value negative, excluded
        let eq = sis_equilibria(100.0, 0.001, 0.5).unwrap();
        assert_eq!(eq.points.len(), 1);
        assert!(eq.points[0].stable);

        // no recovery: saturation at the full population
        let eq = sis_equilibria(1000.0, 0.001, 0.0).unwrap();
        let values: Vec<f64> = eq.points.iter().map(|p| p.i).collect();
        assert_eq!(values, vec![0.0, 1000.0]);
    }

    #[test]
    fn sis_equilibria_degenerate_and_domain() {
        let eq = sis_equilibria(1000.0, 0.0, 0.5).unwrap();
        assert!(eq.degenerate);
        assert_eq!(eq.points.len(), 1);
        assert!(sis_equilibria(0.0, 0.1, 0.1).is_err());
        assert!(sis_equilibria(1000.0, -0.1, 0.1).is_err());
    }

    #[test]
    fn static_estimate_uses_snapshot_relations() {
        let params = ModelParams::new(1.0, 0.3)
            .unwrap()
            .with_alpha2(0.2)
            .with_gamma(0.05);
        let state = CompartmentState::sir(900.0, 100.0, 0.0, 1000.0).unwrap();
        let (i_est, r_est) = sir_static_estimate(&state, &params);
        assert_abs_diff_eq!(i_est, 0.03 * 900.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r_est, 0.15 * i_est, epsilon = 1e-12);
    }
}
