//! Classical 4th-order fixed-step Runge-Kutta core.

use super::ModelError;

#[derive(Debug)]
pub(crate) struct RawTrajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    /// Some compartment went slightly negative and was renormalized to 0.
    pub clamped: bool,
}

pub(crate) fn rk4_step<const N: usize>(
    rhs: &mut impl FnMut(f64, &[f64; N]) -> [f64; N],
    t: f64,
    y: &[f64; N],
    dt: f64,
) -> [f64; N] {
    let k1 = rhs(t, y);
    let k2 = rhs(t + dt / 2.0, &add_scaled(y, &k1, dt / 2.0));
    let k3 = rhs(t + dt / 2.0, &add_scaled(y, &k2, dt / 2.0));
    let k4 = rhs(t + dt, &add_scaled(y, &k3, dt));
    let mut out = *y;
    for idx in 0..N {
        out[idx] += dt / 6.0 * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
    }
    out
}

fn add_scaled<const N: usize>(y: &[f64; N], k: &[f64; N], factor: f64) -> [f64; N] {
    let mut out = *y;
    for idx in 0..N {
        out[idx] += factor * k[idx];
    }
    out
}

/// Integrate from 0 to `horizon` in steps of `dt`, recording every step.
///
/// Negative compartments are renormalized to 0 with a flag. Any
/// compartment whose magnitude exceeds `instability_limit` aborts with
/// [`ModelError::StepTooLarge`].
pub(crate) fn integrate_fixed<const N: usize>(
    mut rhs: impl FnMut(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    dt: f64,
    horizon: f64,
    instability_limit: f64,
) -> Result<RawTrajectory<N>, ModelError> {
    let steps = (horizon / dt).ceil() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut clamped = false;
    let mut y = y0;
    times.push(0.0);
    states.push(y);
    for step in 0..steps {
        let t = step as f64 * dt;
        y = rk4_step(&mut rhs, t, &y, dt);
        for value in &mut y {
            if *value < 0.0 {
                *value = 0.0;
                clamped = true;
            }
        }
        let t_next = (step + 1) as f64 * dt;
        if y.iter().any(|v| !v.is_finite() || v.abs() > instability_limit) {
            return Err(ModelError::StepTooLarge { t: t_next });
        }
        times.push(t_next);
        states.push(y);
    }
    Ok(RawTrajectory {
        times,
        states,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let lambda = 0.3;
        let traj = integrate_fixed(
            |_t, y: &[f64; 1]| [-lambda * y[0]],
            [1.0],
            0.01,
            5.0,
            1e12,
        )
        .unwrap();
        let end = traj.states.last().unwrap()[0];
        assert_abs_diff_eq!(end, (-lambda * 5.0f64).exp(), epsilon = 1e-10);
    }

    #[test]
    fn blowup_reports_step_too_large() {
        let err = integrate_fixed(|_t, y: &[f64; 1]| [10.0 * y[0]], [1.0], 0.5, 100.0, 1e6)
            .unwrap_err();
        assert!(matches!(err, ModelError::StepTooLarge { .. }));
    }

    #[test]
    fn step_count_covers_horizon() {
        let traj =
            integrate_fixed(|_t, _y: &[f64; 1]| [0.0], [1.0], 0.4, 1.0, 1e6).unwrap();
        // 0.0, 0.4, 0.8, 1.2: ceil(1.0/0.4) = 3 steps
        assert_eq!(traj.times.len(), 4);
        assert!(*traj.times.last().unwrap() >= 1.0);
    }
}
