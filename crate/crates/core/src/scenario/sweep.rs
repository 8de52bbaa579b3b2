use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::network::build_network;
use super::population::{groups_at, sample_profiles, GroupProfile};
use super::spec::ScenarioSpec;
use crate::dynamics::{market_share, StrategyProfile, UserGroup};
use crate::error::ScenarioError;
use crate::game::{solve_nash, NashResult, PriceVector, PricingGame};
use crate::queueing::ProviderNetwork;
use crate::segmentation::{categorize_groups, cluster_population_with, dataplan_tiers, ProviderView, UserCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Global,
    Local,
    Failed,
    /// The point could not be evaluated at all.
    Error,
}

impl OutcomeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Global => "global",
            Self::Local => "local",
            Self::Failed => "failed",
            Self::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Global, Self::Local, Self::Failed, Self::Error]
            .into_iter()
            .find(|x| x.as_str() == s)
    }
}

/// Market state at one demand level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketOutcome {
    pub lambda_bar: f64,
    pub status: OutcomeStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub prices: PriceVector,
    /// Realized revenue of each provider.
    pub revenue: Vec<f64>,
    /// Realized population share of each provider.
    pub shares: Vec<f64>,
    pub disconnected: f64,
    /// `[category][strategy]`: share of the category's population on each
    /// strategy, disconnection first. Categories follow [`UserCategory::ALL`].
    pub category_shares: Vec<Vec<f64>>,
}

impl MarketOutcome {
    fn failed(lambda_bar: f64, plans: &[usize], error: String) -> Self {
        let providers = plans.len();
        Self {
            lambda_bar,
            status: OutcomeStatus::Error,
            error: Some(error),
            prices: PriceVector::constant(plans, f64::NAN),
            revenue: vec![f64::NAN; providers],
            shares: vec![f64::NAN; providers],
            disconnected: f64::NAN,
            category_shares: vec![vec![f64::NAN; providers + 1]; UserCategory::ALL.len()],
        }
    }
}

/// A sweep point with everything needed to inspect it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointReport {
    pub outcome: MarketOutcome,
    pub thresholds: Vec<Vec<f64>>,
    pub views: Vec<ProviderView>,
    pub nash: Option<NashResult>,
}

/// Share of each category on each strategy.
pub fn category_shares(groups: &[UserGroup], categories: &[UserCategory], z: &StrategyProfile) -> Vec<Vec<f64>> {
    UserCategory::ALL
        .iter()
        .map(|&cat| {
            let members: Vec<usize> = (0..groups.len()).filter(|&j| categories[j] == cat).collect();
            let total: f64 = members.iter().map(|&j| groups[j].population).sum();
            (0..z.strategies())
                .map(|k| {
                    if total > 0.0 {
                        members.iter().map(|&j| groups[j].population * z.get(j, k)).sum::<f64>() / total
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// The game at one demand level with the views and tiers it was built from.
pub type GameSetup = (PricingGame, Vec<ProviderView>, Vec<Vec<f64>>);

/// A generated market ready to be evaluated at any demand level.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub networks: Vec<ProviderNetwork>,
    pub profiles: Vec<GroupProfile>,
    pub categories: Vec<UserCategory>,
}

impl Scenario {
    pub fn new(spec: ScenarioSpec) -> Result<Self, ScenarioError> {
        spec.validate()?;
        let networks = build_network(&spec)?;
        let profiles = sample_profiles(&spec, spec.seeds.population)?;
        let categories = if profiles.len() >= 2 {
            categorize_groups(&groups_at(&spec, &profiles, 0.0))?
        } else {
            vec![UserCategory::ValueForMoney; profiles.len()]
        };
        Ok(Self {
            spec,
            networks,
            profiles,
            categories,
        })
    }

    pub fn groups(&self, lambda_bar: f64) -> Vec<UserGroup> {
        groups_at(&self.spec, &self.profiles, lambda_bar)
    }

    /// Clusters, tiers and the pricing game at one demand level.
    pub fn game(&self, lambda_bar: f64) -> Result<GameSetup, ScenarioError> {
        let spec = &self.spec;
        let groups = self.groups(lambda_bar);
        let mut views: Vec<ProviderView> = Vec::with_capacity(spec.providers());
        for (i, &level) in spec.level_of_detail.iter().enumerate() {
            let view = match views.iter().find(|v| v.level_of_detail == level) {
                Some(v) => v.clone(),
                None => cluster_population_with(&groups, level, spec.seeds.clustering, &spec.clustering)?,
            };
            views.push(view.with_provider(i));
        }
        let thresholds = spec
            .plans
            .iter()
            .map(|&s| dataplan_tiers(&groups, s))
            .collect::<Result<Vec<_>, _>>()?;
        let game = PricingGame::from_views(&self.networks, groups, &views, thresholds.clone(), spec.caps(), spec.logit)?;
        Ok((game, views, thresholds))
    }

    pub fn run_point(&self, lambda_bar: f64) -> PointReport {
        match self.try_point(lambda_bar) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("lambda_bar = {lambda_bar}: {e}");
                PointReport {
                    outcome: MarketOutcome::failed(lambda_bar, &self.spec.plans, e.to_string()),
                    thresholds: Vec::new(),
                    views: Vec::new(),
                    nash: None,
                }
            }
        }
    }

    fn try_point(&self, lambda_bar: f64) -> Result<PointReport, ScenarioError> {
        let (game, views, thresholds) = self.game(lambda_bar)?;
        let mut config = self.spec.nash;
        config.seed = self.spec.seeds.solver;
        let nash = solve_nash(&game, None, &config)?;
        let groups = game.truth().groups();
        let shares = market_share(&nash.realized.profile, groups);
        let outcome = MarketOutcome {
            lambda_bar,
            status: match nash.status {
                crate::game::NashStatus::Global => OutcomeStatus::Global,
                crate::game::NashStatus::Local => OutcomeStatus::Local,
                crate::game::NashStatus::Failed => OutcomeStatus::Failed,
            },
            error: None,
            prices: nash.prices.clone(),
            revenue: nash.realized.revenue.clone(),
            shares: shares[1..].to_vec(),
            disconnected: shares[0],
            category_shares: category_shares(groups, &self.categories, &nash.realized.profile),
        };
        log::info!(
            "lambda_bar = {lambda_bar:.4}: {} prices {:?}",
            outcome.status.as_str(),
            outcome.prices.flat()
        );
        Ok(PointReport {
            outcome,
            thresholds,
            views,
            nash: Some(nash),
        })
    }
}

/// Evaluates every demand level of the sweep, in parallel, ordered by `λ̄`.
/// Points that fail are kept with their error.
pub fn run_sweep_reports(spec: &ScenarioSpec) -> Result<Vec<PointReport>, ScenarioError> {
    let scenario = Scenario::new(spec.clone())?;
    let mut lambdas = spec.sweep.values();
    lambdas.sort_by(f64::total_cmp);
    Ok(lambdas.par_iter().map(|&l| scenario.run_point(l)).collect())
}

pub fn run_sweep(spec: &ScenarioSpec) -> Result<Vec<MarketOutcome>, ScenarioError> {
    Ok(run_sweep_reports(spec)?.into_iter().map(|r| r.outcome).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_round_trip_through_text() {
        for s in [OutcomeStatus::Global, OutcomeStatus::Local, OutcomeStatus::Failed, OutcomeStatus::Error] {
            assert_eq!(OutcomeStatus::parse(s.as_str()), Some(s));
        }
        assert_eq!(OutcomeStatus::parse("maybe"), None);
    }

    #[test]
    fn category_shares_average_members_only() {
        let group = |id, population| UserGroup {
            id,
            population,
            willingness: 30.0,
            saturation: 1.0,
            rate_sensitivity: 0.6,
            variance_weight: 0.0,
            price_weight: 1.0,
            session_rate: 0.0,
            demand_mb: 0.0,
            normalized_rate: 1.0,
        };
        let groups = vec![group(0, 100.0), group(1, 300.0), group(2, 50.0)];
        let cats = vec![UserCategory::ALL[0], UserCategory::ALL[0], UserCategory::ALL[1]];
        let z = StrategyProfile::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]).unwrap();
        let shares = category_shares(&groups, &cats, &z);
        assert_eq!(shares[0], vec![0.25, 0.75]);
        assert_eq!(shares[1], vec![0.5, 0.5]);
        assert_eq!(shares[2], vec![0.0, 0.0]);
    }

    #[test]
    fn failed_points_keep_their_shape() {
        let o = MarketOutcome::failed(0.3, &[2, 1], "boom".into());
        assert_eq!(o.status, OutcomeStatus::Error);
        assert_eq!(o.prices.plans(), vec![2, 1]);
        assert_eq!(o.category_shares.len(), UserCategory::ALL.len());
        assert!(o.revenue.iter().all(|r| r.is_nan()));
    }
}
