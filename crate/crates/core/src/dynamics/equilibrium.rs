use serde::{Deserialize, Serialize};

use super::logit::softmax_into;
use super::market::{Market, UtilityEvaluator};
use super::ode::{Dopri5, StepControl};
use super::pricing::DataplanSchedule;
use super::profile::StrategyProfile;
use crate::error::DynamicsError;
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogitConfig {
    /// Noise `ε`; must be positive.
    pub noise: f64,
    /// Speed `r` of the dynamics.
    pub speed: f64,
    /// Stop once `‖dz/dt‖∞` drops below this.
    pub tolerance: f64,
    /// Integration horizon before giving up.
    pub max_time: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Below this `‖dz/dt‖∞` the rest point is refined by Newton steps on
    /// `dz/dt = 0`; integration resumes if they fail. Zero disables.
    pub polish_below: f64,
}

impl Default for LogitConfig {
    fn default() -> Self {
        Self {
            noise: 1.5,
            speed: 1.0,
            tolerance: 1e-8,
            max_time: 1e4,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            polish_below: 1e-6,
        }
    }
}

impl LogitConfig {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.noise > 0.0) {
            return Err(DynamicsError::InvalidConfig("noise must be positive".into()));
        }
        if !(self.speed > 0.0) {
            return Err(DynamicsError::InvalidConfig("speed must be positive".into()));
        }
        if !(self.tolerance > 0.0) || !(self.max_time > 0.0) || !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(DynamicsError::InvalidConfig("tolerances and horizon must be positive".into()));
        }
        if !(self.polish_below >= 0.0) {
            return Err(DynamicsError::InvalidConfig("polish threshold must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserEquilibrium {
    pub profile: StrategyProfile,
    /// `‖z − softmax(u(z)/ε)‖∞` at the returned profile.
    pub residual: f64,
    pub time: f64,
    pub steps: usize,
    pub evaluations: usize,
}

/// `‖z − softmax(u(z)/ε)‖∞`.
pub fn fixed_point_residual(
    market: &Market,
    schedules: &[DataplanSchedule],
    z: &StrategyProfile,
    noise: f64,
) -> Result<f64, DynamicsError> {
    let u = market.utilities(z, schedules)?;
    let s = z.strategies();
    let mut choice = vec![0.0; s];
    let mut worst = 0.0f64;
    for (row_u, row_z) in u.chunks(s).zip(z.rows()) {
        softmax_into(row_u, noise, &mut choice);
        for (c, x) in choice.iter().zip(row_z) {
            worst = worst.max((c - x).abs());
        }
    }
    Ok(worst)
}

/// The Logit response `softmax(u(z)/ε)` to a profile.
///
/// At a rest point of the dynamics this is the identity. Applied once to a
/// nearly converged profile it recovers tiny choice probabilities to full
/// relative precision, which the integrator's absolute tolerance cannot.
pub fn logit_response(
    market: &Market,
    schedules: &[DataplanSchedule],
    z: &StrategyProfile,
    noise: f64,
) -> Result<StrategyProfile, DynamicsError> {
    let u = market.utilities(z, schedules)?;
    let s = z.strategies();
    let mut out = vec![0.0; u.len()];
    for (row_out, row_u) in out.chunks_mut(s).zip(u.chunks(s)) {
        softmax_into(row_u, noise, row_out);
    }
    Ok(StrategyProfile::from_flat(z.groups(), s, out))
}

/// Integrates the Logit dynamics from `initial` (uniform when `None`) until
/// `‖dz/dt‖∞ < tolerance`. Rates and variances are recomputed from the
/// current profile at every evaluation.
///
/// Under heavy congestion the field is stiff and the integrator's own error
/// keeps `‖dz/dt‖` from dropping much below `rel_tol` times the stiffness,
/// so the last digits come from Newton refinement (see
/// [`LogitConfig::polish_below`]).
pub fn solve_user_equilibrium(
    market: &Market,
    schedules: &[DataplanSchedule],
    config: &LogitConfig,
    initial: Option<&StrategyProfile>,
) -> Result<UserEquilibrium, DynamicsError> {
    solve_user_equilibrium_with(market, schedules, config, initial, |_, _| {})
}

/// As [`solve_user_equilibrium`], calling `observer(t, z)` at the initial
/// state and after every accepted step.
pub fn solve_user_equilibrium_with<O>(
    market: &Market,
    schedules: &[DataplanSchedule],
    config: &LogitConfig,
    initial: Option<&StrategyProfile>,
    mut observer: O,
) -> Result<UserEquilibrium, DynamicsError>
where
    O: FnMut(f64, &[f64]),
{
    config.validate()?;
    let groups = market.groups().len();
    let strategies = market.providers() + 1;
    let z0 = match initial {
        Some(z) => {
            if z.groups() != groups || z.strategies() != strategies {
                return Err(DynamicsError::InvalidProfile(format!(
                    "initial profile is {}x{}, market needs {groups}x{strategies}",
                    z.groups(),
                    z.strategies()
                )));
            }
            z.validate(1e-9)?;
            z.clone()
        }
        None => StrategyProfile::uniform(groups, market.providers()),
    };

    let mut rhs = LogitField {
        eval: UtilityEvaluator::new(market, schedules)?,
        utilities: vec![0.0; z0.as_slice().len()],
        strategies,
        noise: config.noise,
        speed: config.speed,
    };
    let coarse = Dopri5 {
        rel_tol: config.rel_tol,
        abs_tol: config.abs_tol,
        ..Dopri5::default()
    };
    // Without refinement the rate must be driven down by integration alone.
    let fine = Dopri5 {
        rel_tol: config.rel_tol.min(0.1 * config.tolerance),
        abs_tol: config.abs_tol.min(1e-3 * config.tolerance),
        ..coarse
    };
    let speed = config.speed;
    let tol = config.tolerance;
    let handoff = config.polish_below.max(tol);

    let mut run = |solver: &Dopri5, y0: &[f64], horizon: f64, threshold: f64, t0: f64, rhs: &mut LogitField| {
        solver
            .integrate(y0, horizon, |z, dz| rhs.call(z, dz), |t, y, dy| {
                observer(t0 + t, y);
                if dy.iter().all(|d| d.abs() < threshold) {
                    StepControl::Stop
                } else {
                    StepControl::Continue
                }
            })
            .map_err(|e| DynamicsError::StepUnderflow { time: t0 + e.t })
    };

    let first = run(&coarse, z0.as_slice(), config.max_time, handoff, 0.0, &mut rhs)?;
    let mut steps = first.accepted;
    let mut evaluations = first.evaluations;
    let mut time = first.t;
    let mut state = first.y;
    let mut rate = inf_norm(&first.dydt);
    let mut done = first.stopped && rate < tol;

    if first.stopped && !done {
        if let Some((z, r, evals)) = rhs.polish(&state, tol, POLISH_ITERATIONS) {
            state = z;
            rate = r;
            done = true;
            evaluations += evals;
        }
    }
    if first.stopped && !done {
        let rest = run(&fine, &state, config.max_time - time, tol, time, &mut rhs)?;
        steps += rest.accepted;
        evaluations += rest.evaluations;
        time += rest.t;
        state = rest.y;
        rate = inf_norm(&rest.dydt);
        done = rest.stopped;
    }

    let profile = StrategyProfile::from_flat(groups, strategies, state);
    if !done {
        return Err(DynamicsError::NotConverged {
            time,
            residual: rate / speed,
            last: Box::new(profile),
        });
    }
    Ok(UserEquilibrium {
        profile,
        residual: rate / speed,
        time,
        steps,
        evaluations,
    })
}

const POLISH_ITERATIONS: usize = 8;
const POLISH_STEP: f64 = 1e-7;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, d| m.max(d.abs()))
}

/// Right-hand side `r (softmax(u(z)/ε) − z)` with its buffers.
struct LogitField<'a> {
    eval: UtilityEvaluator<'a>,
    utilities: Vec<f64>,
    strategies: usize,
    noise: f64,
    speed: f64,
}

impl LogitField<'_> {
    fn call(&mut self, z: &[f64], dz: &mut [f64]) {
        self.eval.utilities_into(z, &mut self.utilities);
        for ((d_row, u_row), z_row) in dz
            .chunks_mut(self.strategies)
            .zip(self.utilities.chunks(self.strategies))
            .zip(z.chunks(self.strategies))
        {
            softmax_into(u_row, self.noise, d_row);
            for (d, &x) in d_row.iter_mut().zip(z_row) {
                *d = self.speed * (*d - x);
            }
        }
    }

    /// Newton iteration on `dz/dt = 0` from a nearly stationary state.
    /// Returns the root, its rate and the evaluations used, or `None` if an
    /// iteration fails to reduce the rate.
    fn polish(&mut self, z0: &[f64], target: f64, iterations: usize) -> Option<(Vec<f64>, f64, usize)> {
        let n = z0.len();
        let mut z = z0.to_vec();
        let mut g = vec![0.0; n];
        let mut probe = vec![0.0; n];
        self.call(&z, &mut g);
        let mut evals = 1;
        let mut norm = inf_norm(&g);
        for _ in 0..iterations {
            if norm < target {
                return Some((z, norm, evals));
            }
            let mut jac = vec![0.0; n * n];
            for c in 0..n {
                if c % self.strategies == 0 {
                    // Disconnection shares do not enter any utility.
                    jac[c * n + c] = -self.speed;
                    continue;
                }
                let old = z[c];
                z[c] = old + POLISH_STEP;
                self.call(&z, &mut probe);
                z[c] = old;
                evals += 1;
                for r in 0..n {
                    jac[r * n + c] = (probe[r] - g[r]) / POLISH_STEP;
                }
            }
            let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
            let delta = linalg::solve(&jac, &rhs)?;
            let next: Vec<f64> = z.iter().zip(&delta).map(|(a, b)| a + b).collect();
            self.call(&next, &mut probe);
            evals += 1;
            let next_norm = inf_norm(&probe);
            if !(next_norm < norm) {
                return None;
            }
            z = next;
            std::mem::swap(&mut g, &mut probe);
            norm = next_norm;
        }
        (norm < target).then_some((z, norm, evals))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::UserGroup;
    use crate::queueing::{BaseStation, MobilityModel, ProviderNetwork};

    fn cell(bandwidth: f64) -> ProviderNetwork {
        let station = BaseStation {
            id: 0,
            position: [0.0, 0.0],
            bandwidth,
            cell_area: 1.0,
            cell_perimeter: 4.0,
        };
        let mobility = MobilityModel {
            routing: vec![vec![0.0]],
            omega: vec![1.0],
            group_omega: None,
            mean_speed: 0.0,
        };
        ProviderNetwork::new(vec![station], mobility, vec![bandwidth * 6.0 / 8.0], vec![0.0]).unwrap()
    }

    fn market(load: f64) -> Market {
        let groups = (0..3)
            .map(|id| UserGroup {
                id,
                population: 100.0,
                willingness: 20.0 + 5.0 * id as f64,
                saturation: 1.0,
                rate_sensitivity: 0.4,
                variance_weight: 0.0,
                price_weight: 1.0,
                session_rate: load,
                demand_mb: 10.0,
                normalized_rate: 1.0,
            })
            .collect();
        Market::new(&[cell(20.0), cell(12.0)], groups).unwrap()
    }

    fn prices(c: &[f64]) -> Vec<DataplanSchedule> {
        c.iter().map(|&p| DataplanSchedule::single(p, 100.0).unwrap()).collect()
    }

    #[test]
    fn rejects_bad_configs() {
        let ok = LogitConfig::default();
        assert!(ok.validate().is_ok());
        assert!(LogitConfig { noise: 0.0, ..ok }.validate().is_err());
        assert!(LogitConfig { speed: -1.0, ..ok }.validate().is_err());
        assert!(LogitConfig { abs_tol: f64::NAN, ..ok }.validate().is_err());
        assert!(LogitConfig { polish_below: -1.0, ..ok }.validate().is_err());
    }

    #[test]
    fn rejects_a_misshapen_start() {
        let m = market(1.0);
        let z = StrategyProfile::uniform(2, 2);
        let err = solve_user_equilibrium(&m, &prices(&[5.0, 5.0]), &LogitConfig::default(), Some(&z));
        assert!(matches!(err, Err(DynamicsError::InvalidProfile(_))));
    }

    #[test]
    fn rest_point_is_a_fixed_point_of_the_response() {
        let m = market(2.0);
        let s = prices(&[6.0, 3.0]);
        let config = LogitConfig::default();
        let eq = solve_user_equilibrium(&m, &s, &config, None).unwrap();
        assert!(eq.residual < config.tolerance);
        let again = logit_response(&m, &s, &eq.profile, config.noise).unwrap();
        assert!(again.max_abs_diff(&eq.profile) < 1e-7);
        assert!(fixed_point_residual(&m, &s, &eq.profile, config.noise).unwrap() < 1e-7);
    }

    #[test]
    fn integration_alone_reaches_the_same_point() {
        let m = market(4.0);
        let s = prices(&[6.0, 3.0]);
        let polished = solve_user_equilibrium(&m, &s, &LogitConfig::default(), None).unwrap();
        let plain = LogitConfig {
            polish_below: 0.0,
            ..LogitConfig::default()
        };
        let integrated = solve_user_equilibrium(&m, &s, &plain, None).unwrap();
        assert!(polished.profile.max_abs_diff(&integrated.profile) < 1e-7);
    }

    #[test]
    fn observer_sees_every_step() {
        let m = market(1.0);
        let mut calls = 0;
        let eq = solve_user_equilibrium_with(&m, &prices(&[5.0, 5.0]), &LogitConfig::default(), None, |_, _| {
            calls += 1
        })
        .unwrap();
        assert!(calls > eq.steps);
    }

    #[test]
    fn polish_finds_the_root_from_nearby() {
        let m = market(3.0);
        let s = prices(&[4.0, 2.0]);
        let config = LogitConfig::default();
        let eq = solve_user_equilibrium(&m, &s, &config, None).unwrap();
        let mut field = LogitField {
            eval: UtilityEvaluator::new(&m, &s).unwrap(),
            utilities: vec![0.0; eq.profile.as_slice().len()],
            strategies: 3,
            noise: config.noise,
            speed: 1.0,
        };
        // Shift mass between providers while keeping row sums.
        let mut nudged = eq.profile.as_slice().to_vec();
        for row in nudged.chunks_mut(3) {
            row[1] += 1e-5;
            row[2] -= 1e-5;
        }
        let (z, rate, _) = field.polish(&nudged, 1e-12, 8).unwrap();
        assert!(rate < 1e-12);
        assert!(inf_norm(&z.iter().zip(eq.profile.as_slice()).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-8);
    }
}
