//! Empirical total-infected formula, parameter sweeps, and the
//! fatality/recovery scenario engine.

use crate::models::{self, CompartmentState, ModelError, ModelParams, Trajectory};
use serde::Serialize;

/// Reference endpoint for the susceptible sweep (population 1000, fully
/// susceptible, r_c = 1, p_t = 0.3): spread up to 487 persons. The
/// initial infected counts behind it are unpublished, so this is an
/// annotation, not a test target.
pub const REFERENCE_SPREAD_FULL_SUSCEPTIBLE: f64 = 487.0;

/// Reference endpoint for the infectious sweep (population 1000,
/// infectious 40%): susceptible count 564. Annotation only, as above.
pub const REFERENCE_SUSCEPTIBLE_AT_40PCT_INFECTIOUS: f64 = 564.0;

/// Total-infected estimate, possibly capped at the population size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotalInfected {
    pub value: f64,
    /// The raw formula exceeded the population and was capped to it.
    pub capped: bool,
}

/// I_total = I₀ + r_c·(I/M)·100·S·p_t, capped at M.
///
/// The formula itself is unbounded; the population is not, so an
/// overflow past `m` is capped and flagged.
pub fn empirical_total_infected(
    i0: f64,
    r_c: f64,
    i: f64,
    m: f64,
    s: f64,
    p_t: f64,
) -> Result<TotalInfected, ModelError> {
    validate(i0, r_c, i, m, s, p_t)?;
    let raw = i0 + r_c * (i / m) * 100.0 * s * p_t;
    if raw > m {
        Ok(TotalInfected {
            value: m,
            capped: true,
        })
    } else {
        Ok(TotalInfected {
            value: raw,
            capped: false,
        })
    }
}

/// Mirror of [`empirical_total_infected`] with the susceptible and
/// infectious roles swapped: S_total = S + r_c·(S/M)·100·I·p_t, capped
/// at M. Fills the susceptible column of sweep outputs.
pub fn empirical_susceptible_count(
    i0: f64,
    r_c: f64,
    i: f64,
    m: f64,
    s: f64,
    p_t: f64,
) -> Result<TotalInfected, ModelError> {
    validate(i0, r_c, i, m, s, p_t)?;
    let raw = s + r_c * (s / m) * 100.0 * i * p_t;
    if raw > m {
        Ok(TotalInfected {
            value: m,
            capped: true,
        })
    } else {
        Ok(TotalInfected {
            value: raw,
            capped: false,
        })
    }
}

fn validate(i0: f64, r_c: f64, i: f64, m: f64, s: f64, p_t: f64) -> Result<(), ModelError> {
    if !(m > 0.0) {
        return Err(domain("population size must be positive"));
    }
    if !(0.0..=m).contains(&i) {
        return Err(domain("infectious count must lie in [0, m]"));
    }
    if !(s >= 0.0) {
        return Err(domain("susceptible count must be non-negative"));
    }
    if !(i0 >= 0.0) {
        return Err(domain("initial infected count must be non-negative"));
    }
    if !(r_c >= 0.0) {
        return Err(domain("contact rate must be non-negative"));
    }
    if !(0.0..=1.0).contains(&p_t) {
        return Err(domain("transmission probability must lie in [0, 1]"));
    }
    Ok(())
}

fn domain(msg: impl Into<String>) -> ModelError {
    ModelError::Domain(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweptParameter {
    SusceptiblePct,
    InfectiousPct,
    RateOfContact,
    TransmissionProbability,
    Population,
}

/// Fatality/recovery trend combinations studied empirically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scenario {
    /// (a) fatality and recovery both increasing
    BothUp,
    /// (b) fatality increasing, recovery decreasing
    FatalityUpRecoveryDown,
    /// (c) fatality and recovery both decreasing
    BothDown,
    /// (d) fatality decreasing, recovery increasing
    FatalityDownRecoveryUp,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::BothUp,
        Scenario::FatalityUpRecoveryDown,
        Scenario::BothDown,
        Scenario::FatalityDownRecoveryUp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::BothUp => "fatality_up_recovery_up",
            Scenario::FatalityUpRecoveryDown => "fatality_up_recovery_down",
            Scenario::BothDown => "fatality_down_recovery_down",
            Scenario::FatalityDownRecoveryUp => "fatality_down_recovery_up",
        }
    }

    /// Sign pair (fatality, recovery) applied to the ramp magnitudes.
    fn signs(self) -> (f64, f64) {
        match self {
            Scenario::BothUp => (1.0, 1.0),
            Scenario::FatalityUpRecoveryDown => (1.0, -1.0),
            Scenario::BothDown => (-1.0, -1.0),
            Scenario::FatalityDownRecoveryUp => (-1.0, 1.0),
        }
    }
}

/// Fixed evaluation point for a sweep; the swept parameter overrides the
/// matching field per value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepBase {
    pub params: ModelParams,
    pub population: f64,
    pub initial_infected: f64,
    pub infectious: f64,
    pub susceptible: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub swept: SweptParameter,
    pub values: Vec<f64>,
    pub base: SweepBase,
    pub scenario: Option<Scenario>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub total_infected: f64,
    pub susceptible_count: f64,
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Evaluate the total-infected formula (and its susceptible mirror) at
/// each swept value, in input order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, ModelError> {
    if spec.values.is_empty() {
        return Err(domain("sweep values must be non-empty"));
    }
    let increasing = spec.values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = spec.values.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(domain("sweep values must be strictly monotone"));
    }

    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let b = &spec.base;
        let (mut r_c, mut p_t) = (b.params.r_c, b.params.p_t);
        let (mut m, mut i, mut s) = (b.population, b.infectious, b.susceptible);
        match spec.swept {
            SweptParameter::SusceptiblePct => s = value / 100.0 * m,
            SweptParameter::InfectiousPct => i = value / 100.0 * m,
            SweptParameter::RateOfContact => r_c = value,
            SweptParameter::TransmissionProbability => p_t = value,
            SweptParameter::Population => {
                // hold prevalence constant: the infectious and
                // susceptible shares of the base population carry over
                // to the swept one
                let scale = value / b.population;
                i = b.infectious * scale;
                s = b.susceptible * scale;
                m = value;
            }
        }
        let annotate =
            |e: ModelError| domain(format!("sweep value {value}: {e}"));
        let infected =
            empirical_total_infected(b.initial_infected, r_c, i, m, s, p_t).map_err(annotate)?;
        let susceptible =
            empirical_susceptible_count(b.initial_infected, r_c, i, m, s, p_t).map_err(annotate)?;
        rows.push(SweepRow {
            value,
            total_infected: infected.value,
            susceptible_count: susceptible.value,
            capped: infected.capped || susceptible.capped,
        });
    }
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
    })
}

/// Linear ramp magnitudes (per day²) for the scenario engine; the
/// scenario chooses the signs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RampSlopes {
    pub fatality: f64,
    pub recovery: f64,
}

impl Default for RampSlopes {
    fn default() -> Self {
        // unequal on purpose: equal magnitudes make the opposing
        // scenarios cancel into identical removal rates
        RampSlopes {
            fatality: 0.001,
            recovery: 0.003,
        }
    }
}

/// One scenario run: the SIR trajectory under ramped rates plus the
/// separately-tracked cumulative deaths at each step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRun {
    pub scenario: Scenario,
    pub trajectory: Trajectory,
    pub deaths: Vec<f64>,
}

/// Integrate SIR with linearly ramped recovery and fatality rates.
///
/// Deaths enter the recovered compartment (removal = (α₂(t) + γ(t))·I)
/// and are also accumulated on their own so the fatality outcome stays
/// visible. Rates are clamped at zero once a downward ramp reaches it.
pub fn run_scenario(
    scenario: Scenario,
    params: &ModelParams,
    init: &CompartmentState,
    dt: f64,
    horizon: f64,
    slopes: RampSlopes,
) -> Result<ScenarioRun, ModelError> {
    if !(dt > 0.0 && horizon > 0.0) {
        return Err(domain("dt and horizon must be positive"));
    }
    if !(slopes.fatality >= 0.0 && slopes.recovery >= 0.0) {
        return Err(domain("ramp magnitudes must be non-negative"));
    }
    if init.drift() > 1e-6 * init.m {
        return Err(domain("SIR initial state must satisfy s + i + r = m"));
    }
    let (sign_f, sign_r) = scenario.signs();
    let (slope_gamma, slope_alpha2) = (sign_f * slopes.fatality, sign_r * slopes.recovery);
    let m = init.m;

    let raw = crate::models::rk4_integrate_fixed(
        |t: f64, y: &[f64; 4]| {
            let alpha2_t = (params.alpha2 + slope_alpha2 * t).max(0.0);
            let gamma_t = (params.gamma + slope_gamma * t).max(0.0);
            let [ds, di, dr] =
                models::sir_rhs(params, alpha2_t, gamma_t, m, [y[0], y[1], y[2]]);
            [ds, di, dr, gamma_t * y[1]]
        },
        [init.s, init.i, init.r, 0.0],
        dt,
        horizon,
        10.0 * m,
    )?;

    let points: Vec<(f64, CompartmentState)> = raw
        .times
        .iter()
        .zip(&raw.states)
        .map(|(&t, &[s, i, r, _])| (t, CompartmentState { s, i, r, m }))
        .collect();
    let deaths = raw.states.iter().map(|y| y[3]).collect();
    let max_drift = points.iter().map(|(_, st)| st.drift()).fold(0.0, f64::max);
    Ok(ScenarioRun {
        scenario,
        trajectory: Trajectory {
            dt,
            points,
            clamped: raw.clamped,
            max_drift,
        },
        deaths,
    })
}

/// Run all four fatality/recovery combinations on the same start state.
pub fn fatality_recovery_scenarios(
    params: &ModelParams,
    init: &CompartmentState,
    dt: f64,
    horizon: f64,
    slopes: RampSlopes,
) -> Result<Vec<ScenarioRun>, ModelError> {
    Scenario::ALL
        .iter()
        .map(|&sc| run_scenario(sc, params, init, dt, horizon, slopes))
        .collect()
}
