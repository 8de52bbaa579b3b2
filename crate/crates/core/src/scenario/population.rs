use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::spec::ScenarioSpec;
use crate::dynamics::UserGroup;
use crate::error::ScenarioError;
use crate::linalg;
use crate::queueing::MINUTES_PER_HOUR;

const MAX_REDRAWS: usize = 100_000;

/// Demand-independent part of a group's profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupProfile {
    pub willingness: f64,
    pub rate_sensitivity: f64,
    pub normalized_rate: f64,
}

/// Draws `J` profiles `(w_R, h, n)` from the scenario's joint normal law.
/// Draws with `w_R < 0`, `h ≤ 0` or `n ≤ 0` are discarded whole.
pub fn sample_profiles(spec: &ScenarioSpec, seed: u64) -> Result<Vec<GroupProfile>, ScenarioError> {
    spec.profile.validate()?;
    let factor = linalg::cholesky_psd(&spec.profile.covariance(), 3, 1e-12)
        .ok_or_else(|| ScenarioError::Config("profile covariance is not positive semi-definite".into()))?;
    let mean = spec.profile.mean;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(spec.groups);
    for _ in 0..spec.groups {
        let mut drawn = None;
        for _ in 0..MAX_REDRAWS {
            let xi: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
            let mut x = mean;
            for a in 0..3 {
                for b in 0..=a {
                    x[a] += factor[a * 3 + b] * xi[b];
                }
            }
            if x[0] >= 0.0 && x[1] > 0.0 && x[2] > 0.0 {
                drawn = Some(x);
                break;
            }
        }
        let x = drawn.ok_or_else(|| ScenarioError::Config("profile law puts almost no mass on valid profiles".into()))?;
        out.push(GroupProfile {
            willingness: x[0],
            rate_sensitivity: x[1],
            normalized_rate: x[2],
        });
    }
    Ok(out)
}

/// Ground-truth groups at mean session rate `lambda_bar` (sessions/hour):
/// `N_j = N/J`, group session rate `n_j λ̄ N_j` and monthly demand
/// proportional to `n_j λ̄`.
pub fn groups_at(spec: &ScenarioSpec, profiles: &[GroupProfile], lambda_bar: f64) -> Vec<UserGroup> {
    let size = spec.population / profiles.len() as f64;
    profiles
        .iter()
        .enumerate()
        .map(|(id, p)| UserGroup {
            id,
            population: size,
            willingness: p.willingness,
            saturation: spec.utility.saturation,
            rate_sensitivity: p.rate_sensitivity,
            variance_weight: spec.utility.variance_weight,
            price_weight: spec.utility.price_weight,
            session_rate: p.normalized_rate * lambda_bar * size / MINUTES_PER_HOUR,
            demand_mb: spec.monthly_demand(p.normalized_rate, lambda_bar),
            normalized_rate: p.normalized_rate,
        })
        .collect()
}

pub fn sample_population(spec: &ScenarioSpec, seed: u64, lambda_bar: f64) -> Result<Vec<UserGroup>, ScenarioError> {
    Ok(groups_at(spec, &sample_profiles(spec, seed)?, lambda_bar))
}
