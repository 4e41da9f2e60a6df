//! Model parameters and the transmission-rate / force-of-infection algebra.

use super::{domain, ModelError};
use serde::Serialize;

/// Scaling convention for the force of infection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum FoiScaling {
    /// α₁ = τ·(I/M)·100, the prevalence expressed as a percentage.
    /// Dimensionally inconsistent with the ODEs but kept available for
    /// comparison runs.
    PaperLiteral,
    /// α₁ = τ·(I/M). Default.
    #[default]
    Fractional,
}

/// Rate parameters shared by the compartmental models.
///
/// The transmission rate τ is always the product `r_c × p_t`; it is
/// exposed as [`ModelParams::tau`] rather than stored, so the identity
/// cannot drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Contacts per person per day.
    pub r_c: f64,
    /// Per-contact transmission probability.
    pub p_t: f64,
    /// Recovery rate α₂ (per day).
    pub alpha2: f64,
    /// Death rate γ (per day). Not part of the SIR ODEs; used by the
    /// static estimator and the fatality/recovery scenario engine.
    pub gamma: f64,
    pub foi_scaling: FoiScaling,
    /// SIS recovery-to-susceptible rate α (per day).
    pub alpha_sis: f64,
}

/// Default recovery rate: one recovery per 14 days.
pub const DEFAULT_ALPHA2: f64 = 1.0 / 14.0;

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            r_c: 1.0,
            p_t: 0.3,
            alpha2: DEFAULT_ALPHA2,
            gamma: 0.0,
            foi_scaling: FoiScaling::Fractional,
            alpha_sis: 0.0,
        }
    }
}

impl ModelParams {
    pub fn new(r_c: f64, p_t: f64) -> Result<Self, ModelError> {
        transmission_rate(r_c, p_t)?;
        Ok(ModelParams {
            r_c,
            p_t,
            ..ModelParams::default()
        })
    }

    /// Calibrate τ from a reproduction number via τ = R₀·α₂ (with
    /// `p_t = 1`, so `r_c` carries the whole rate).
    pub fn from_r0(r0: f64, alpha2: f64) -> Result<Self, ModelError> {
        if !(r0 >= 0.0) {
            return Err(domain("reproduction number must be non-negative"));
        }
        if !(alpha2 >= 0.0) {
            return Err(domain("recovery rate must be non-negative"));
        }
        Ok(ModelParams {
            r_c: r0 * alpha2,
            p_t: 1.0,
            alpha2,
            ..ModelParams::default()
        })
    }

    /// Transmission rate τ = r_c · p_t.
    pub fn tau(&self) -> f64 {
        self.r_c * self.p_t
    }

    pub fn with_alpha2(mut self, alpha2: f64) -> Self {
        self.alpha2 = alpha2;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_foi_scaling(mut self, scaling: FoiScaling) -> Self {
        self.foi_scaling = scaling;
        self
    }

    pub fn with_alpha_sis(mut self, alpha: f64) -> Self {
        self.alpha_sis = alpha;
        self
    }
}

/// τ = r_c · p_t.
pub fn transmission_rate(r_c: f64, p_t: f64) -> Result<f64, ModelError> {
    if !(r_c >= 0.0) {
        return Err(domain("contact rate must be non-negative"));
    }
    if !(0.0..=1.0).contains(&p_t) {
        return Err(domain("transmission probability must lie in [0, 1]"));
    }
    Ok(r_c * p_t)
}

/// Force of infection α₁ at infectious count `i` in population `m`.
pub fn force_of_infection(params: &ModelParams, i: f64, m: f64) -> Result<f64, ModelError> {
    if !(m > 0.0) {
        return Err(domain("population size must be positive"));
    }
    if !(0.0..=m).contains(&i) {
        return Err(domain("infectious count must lie in [0, m]"));
    }
    Ok(foi_unchecked(params, i, m))
}

/// Same as [`force_of_infection`] without domain checks; used inside the
/// integrator where RK4 stages may leave the domain transiently.
pub(crate) fn foi_unchecked(params: &ModelParams, i: f64, m: f64) -> f64 {
    match params.foi_scaling {
        FoiScaling::PaperLiteral => params.tau() * (i / m) * 100.0,
        FoiScaling::Fractional => params.tau() * (i / m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tau_examples() {
        assert_abs_diff_eq!(transmission_rate(1.0, 0.3).unwrap(), 0.3);
        assert_abs_diff_eq!(transmission_rate(5.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(transmission_rate(2.5, 0.4).unwrap(), 1.0);
    }

    #[test]
    fn tau_domain_checks() {
        assert!(transmission_rate(-1.0, 0.5).is_err());
        assert!(transmission_rate(1.0, 1.5).is_err());
        assert!(transmission_rate(1.0, f64::NAN).is_err());
    }

    #[test]
    fn tau_identity_holds_after_construction() {
        let p = ModelParams::new(2.5, 0.4).unwrap();
        assert_abs_diff_eq!(p.tau(), p.r_c * p.p_t);
        let p = ModelParams::from_r0(1.79, DEFAULT_ALPHA2).unwrap();
        assert_abs_diff_eq!(p.tau(), 1.79 * DEFAULT_ALPHA2, epsilon = 1e-15);
    }

    #[test]
    fn foi_paper_literal_times_100() {
        let p = ModelParams::new(1.0, 0.3)
            .unwrap()
            .with_foi_scaling(FoiScaling::PaperLiteral);
        assert_abs_diff_eq!(force_of_infection(&p, 100.0, 1000.0).unwrap(), 3.0);
    }

    #[test]
    fn foi_fractional() {
        let p = ModelParams::new(1.0, 0.3).unwrap();
        assert_abs_diff_eq!(force_of_infection(&p, 100.0, 1000.0).unwrap(), 0.03);
    }

    #[test]
    fn foi_zero_infectious_is_zero_in_both_modes() {
        for scaling in [FoiScaling::PaperLiteral, FoiScaling::Fractional] {
            let p = ModelParams::new(1.0, 0.3).unwrap().with_foi_scaling(scaling);
            assert_eq!(force_of_infection(&p, 0.0, 1000.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn foi_domain_checks() {
        let p = ModelParams::default();
        assert!(force_of_infection(&p, 10.0, 0.0).is_err());
        assert!(force_of_infection(&p, -1.0, 100.0).is_err());
        assert!(force_of_infection(&p, 101.0, 100.0).is_err());
    }
}
