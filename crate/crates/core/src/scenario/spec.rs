use serde::{Deserialize, Serialize};

use crate::dynamics::LogitConfig;
use crate::error::ScenarioError;
use crate::game::NashConfig;
use crate::linalg;
use crate::segmentation::ClusterOptions;

/// Rectangle covered by every provider's lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketArea {
    pub width_km: f64,
    pub height_km: f64,
    /// Distance between neighbouring lattice sites.
    pub spacing_km: f64,
}

/// Joint normal law of `(w_R, h, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDistribution {
    pub mean: [f64; 3],
    pub std_dev: [f64; 3],
    pub correlation: [[f64; 3]; 3],
}

impl ProfileDistribution {
    pub fn covariance(&self) -> Vec<f64> {
        let mut cov = vec![0.0; 9];
        for a in 0..3 {
            for b in 0..3 {
                cov[a * 3 + b] = self.correlation[a][b] * self.std_dev[a] * self.std_dev[b];
            }
        }
        cov
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let c = &self.correlation;
        for a in 0..3 {
            if c[a][a] != 1.0 {
                return Err(ScenarioError::Config("correlation diagonal must be 1".into()));
            }
            for b in 0..3 {
                if c[a][b] != c[b][a] || !(-1.0..=1.0).contains(&c[a][b]) {
                    return Err(ScenarioError::Config("correlation matrix must be symmetric in [-1, 1]".into()));
                }
            }
        }
        if self.std_dev.iter().any(|s| !(*s >= 0.0)) || self.mean.iter().any(|m| !m.is_finite()) {
            return Err(ScenarioError::Config("profile means must be finite and deviations non-negative".into()));
        }
        let flat: Vec<f64> = c.iter().flatten().copied().collect();
        if linalg::cholesky_psd(&flat, 3, 1e-12).is_none() {
            return Err(ScenarioError::Config("correlation matrix is not positive semi-definite".into()));
        }
        Ok(())
    }
}

/// Constants of the user utility shared by every group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UtilityConstants {
    pub saturation: f64,
    pub variance_weight: f64,
    pub price_weight: f64,
}

impl Default for UtilityConstants {
    fn default() -> Self {
        Self {
            saturation: 1.0,
            variance_weight: 0.0,
            price_weight: 1.0,
        }
    }
}

/// Evenly spaced values of the mean session rate `λ̄`, sessions/hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandSweep {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl DemandSweep {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|k| self.start + (self.end - self.start) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub population: u64,
    pub clustering: u64,
    pub solver: u64,
}

impl Seeds {
    pub fn all(seed: u64) -> Self {
        Self {
            population: seed,
            clustering: seed,
            solver: seed,
        }
    }
}

fn default_session_mb() -> f64 {
    10.0
}

fn default_speed() -> f64 {
    5.0
}

fn default_days() -> f64 {
    30.0
}

fn default_name() -> String {
    "scenario".into()
}

/// Everything needed to generate a market and sweep its demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub area: MarketArea,
    /// Uniform station bandwidth of each provider, Mbps.
    pub capacities_mbps: Vec<f64>,
    #[serde(default = "default_session_mb")]
    pub session_mb: f64,
    #[serde(default = "default_speed")]
    pub mean_speed_kmh: f64,
    /// Total number of users `N`.
    pub population: f64,
    /// Number of ground-truth groups `J`.
    pub groups: usize,
    pub profile: ProfileDistribution,
    #[serde(default)]
    pub utility: UtilityConstants,
    #[serde(default)]
    pub logit: LogitConfig,
    pub sweep: DemandSweep,
    /// Level of detail `L_i` of each provider.
    pub level_of_detail: Vec<usize>,
    /// Number of dataplans `S_i` of each provider.
    pub plans: Vec<usize>,
    /// `C_i^max`; empty means 100 for every provider.
    #[serde(default)]
    pub price_caps: Vec<f64>,
    #[serde(default = "default_days")]
    pub days_per_month: f64,
    pub seeds: Seeds,
    #[serde(default)]
    pub nash: NashConfig,
    #[serde(default)]
    pub clustering: ClusterOptions,
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ScenarioError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn providers(&self) -> usize {
        self.capacities_mbps.len()
    }

    pub fn caps(&self) -> Vec<f64> {
        if self.price_caps.is_empty() {
            vec![100.0; self.providers()]
        } else {
            self.price_caps.clone()
        }
    }

    /// Monthly demand of one member, MB.
    pub fn monthly_demand(&self, normalized_rate: f64, lambda_bar: f64) -> f64 {
        normalized_rate * lambda_bar * 24.0 * self.days_per_month * self.session_mb
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seeds = Seeds::all(seed);
        self
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |m: String| Err(ScenarioError::Config(m));
        let i = self.providers();
        if i == 0 {
            return fail("at least one provider is required".into());
        }
        if self.capacities_mbps.iter().any(|c| !(*c > 0.0)) {
            return fail("capacities must be positive".into());
        }
        if self.level_of_detail.len() != i || self.plans.len() != i {
            return fail(format!("level_of_detail and plans need one entry per provider ({i})"));
        }
        if !self.price_caps.is_empty() && self.price_caps.len() != i {
            return fail(format!("price_caps needs 0 or {i} entries"));
        }
        if self.caps().iter().any(|c| !(*c > 0.0)) {
            return fail("price caps must be positive".into());
        }
        if self.groups == 0 {
            return fail("at least one group is required".into());
        }
        if let Some(l) = self.level_of_detail.iter().find(|&&l| l == 0 || l > self.groups) {
            return fail(format!("level of detail {l} must lie in 1..={}", self.groups));
        }
        if self.plans.contains(&0) {
            return fail("every provider needs at least one plan".into());
        }
        if !(self.population > 0.0) {
            return fail("population must be positive".into());
        }
        if !(self.session_mb > 0.0) || !(self.days_per_month > 0.0) || !(self.mean_speed_kmh >= 0.0) {
            return fail("session size and month length must be positive, speed non-negative".into());
        }
        if !(self.sweep.start >= 0.0) || !(self.sweep.end >= self.sweep.start) || self.sweep.points == 0 {
            return fail("sweep must be a non-empty, non-negative, increasing range".into());
        }
        if !(self.area.spacing_km > 0.0) || !(self.area.width_km > 0.0) || !(self.area.height_km > 0.0) {
            return fail("area dimensions and spacing must be positive".into());
        }
        self.profile.validate()?;
        self.logit.validate()?;
        self.nash.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "area": {"width_km": 3.2, "height_km": 2.8, "spacing_km": 1.6},
        "capacities_mbps": [25.0, 16.0],
        "population": 1000.0,
        "groups": 6,
        "profile": {
            "mean": [30.0, 0.6, 1.0],
            "std_dev": [7.6, 0.3, 0.0],
            "correlation": [[1.0, -0.85, 0.0], [-0.85, 1.0, 0.0], [0.0, 0.0, 1.0]]
        },
        "sweep": {"start": 0.1, "end": 1.5, "points": 8},
        "level_of_detail": [1, 6],
        "plans": [1, 2],
        "seeds": {"population": 1, "clustering": 2, "solver": 3}
    }"#;

    #[test]
    fn defaults_fill_the_rest() {
        let spec = ScenarioSpec::from_json(MINIMAL).unwrap();
        assert_eq!(spec.session_mb, 10.0);
        assert_eq!(spec.mean_speed_kmh, 5.0);
        assert_eq!(spec.days_per_month, 30.0);
        assert_eq!(spec.caps(), vec![100.0, 100.0]);
        assert_eq!(spec.logit, LogitConfig::default());
        assert_eq!(spec.monthly_demand(1.0, 1.0), 7200.0);
    }

    #[test]
    fn unknown_fields_are_refused() {
        let text = MINIMAL.replacen("\"groups\": 6,", "\"groups\": 6, \"grups\": 6,", 1);
        assert!(ScenarioSpec::from_json(&text).is_err());
    }

    #[test]
    fn sweep_is_evenly_spaced() {
        let v = DemandSweep { start: 0.1, end: 1.5, points: 8 }.values();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], 0.1);
        assert!((v[7] - 1.5).abs() < 1e-15);
        assert!((v[1] - 0.3).abs() < 1e-15);
        assert_eq!(DemandSweep { start: 0.4, end: 0.4, points: 1 }.values(), vec![0.4]);
    }

    #[test]
    fn inconsistent_specs_fail_validation() {
        let ok = ScenarioSpec::from_json(MINIMAL).unwrap();
        let broken: Vec<Box<dyn Fn(&mut ScenarioSpec)>> = vec![
            Box::new(|s| s.level_of_detail = vec![7, 1]),
            Box::new(|s| s.plans = vec![1]),
            Box::new(|s| s.price_caps = vec![100.0]),
            Box::new(|s| s.capacities_mbps[1] = 0.0),
            Box::new(|s| s.sweep.points = 0),
            Box::new(|s| s.profile.correlation[0][1] = 0.3),
            Box::new(|s| s.profile.correlation = [[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]]),
            Box::new(|s| s.area.spacing_km = 0.0),
        ];
        for (k, edit) in broken.iter().enumerate() {
            let mut spec = ok.clone();
            edit(&mut spec);
            assert!(spec.validate().is_err(), "case {k}");
        }
    }

    #[test]
    fn one_seed_for_everything() {
        let spec = ScenarioSpec::from_json(MINIMAL).unwrap().with_seed(9);
        assert_eq!(spec.seeds, Seeds { population: 9, clustering: 9, solver: 9 });
    }
}
