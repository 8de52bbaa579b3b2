use serde::{Deserialize, Serialize};

use super::prices::PriceVector;
use crate::dynamics::{
    logit_response, market_share, solve_user_equilibrium, DataplanSchedule, LogitConfig, Market, StrategyProfile,
    UserGroup,
};
use crate::error::GameError;
use crate::queueing::ProviderNetwork;
use crate::segmentation::ProviderView;

/// The pricing game: the real population, each provider's view of it, the
/// dataplan tiers and the price caps.
///
/// Provider `i` evaluates any price vector on `views[i]`; the realized
/// outcome is always computed on `truth`.
#[derive(Debug, Clone)]
pub struct PricingGame {
    truth: Market,
    views: Vec<Market>,
    thresholds: Vec<Vec<f64>>,
    caps: Vec<f64>,
    logit: LogitConfig,
    populated: Vec<Vec<bool>>,
}

/// Outcome of one provider's estimate at a price vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewOutcome {
    pub revenue: f64,
    /// Subscribers per tier, `Σ N_j ẑ_ji` over the tier's clusters.
    pub subscribers: Vec<f64>,
    pub profile: StrategyProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizedOutcome {
    pub profile: StrategyProfile,
    pub revenue: Vec<f64>,
    /// Population shares; entry 0 is disconnection.
    pub shares: Vec<f64>,
}

impl PricingGame {
    pub fn new(
        truth: Market,
        views: Vec<Market>,
        thresholds: Vec<Vec<f64>>,
        caps: Vec<f64>,
        logit: LogitConfig,
    ) -> Result<Self, GameError> {
        let providers = truth.providers();
        if providers == 0 {
            return Err(GameError::Invalid("no providers".into()));
        }
        if views.len() != providers || thresholds.len() != providers || caps.len() != providers {
            return Err(GameError::Invalid(format!(
                "{providers} providers but {} views, {} tier lists and {} caps",
                views.len(),
                thresholds.len(),
                caps.len()
            )));
        }
        if let Some(i) = views.iter().position(|v| v.providers() != providers) {
            return Err(GameError::Invalid(format!("view {i} does not model all providers")));
        }
        logit.validate()?;
        for (t, &cap) in thresholds.iter().zip(&caps) {
            DataplanSchedule::new(vec![0.0; t.len()], t.clone(), cap)?;
        }
        let populated = views
            .iter()
            .zip(&thresholds)
            .map(|(view, t)| {
                let schedule = DataplanSchedule {
                    prices: vec![0.0; t.len()],
                    thresholds: t.clone(),
                    price_cap: 0.0,
                };
                let mut used = vec![false; t.len()];
                for g in view.groups() {
                    used[schedule.tier_of(g.demand_mb)] = true;
                }
                used
            })
            .collect();
        Ok(Self {
            truth,
            views,
            thresholds,
            caps,
            logit,
            populated,
        })
    }

    /// Builds the ground-truth market and one clustered market per view.
    pub fn from_views(
        networks: &[ProviderNetwork],
        groups: Vec<UserGroup>,
        views: &[ProviderView],
        thresholds: Vec<Vec<f64>>,
        caps: Vec<f64>,
        logit: LogitConfig,
    ) -> Result<Self, GameError> {
        let truth = Market::new(networks, groups)?;
        let views = views
            .iter()
            .map(|v| Market::new(networks, v.clusters.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(truth, views, thresholds, caps, logit)
    }

    pub fn providers(&self) -> usize {
        self.truth.providers()
    }

    pub fn plans(&self) -> Vec<usize> {
        self.thresholds.iter().map(Vec::len).collect()
    }

    pub fn caps(&self) -> &[f64] {
        &self.caps
    }

    pub fn thresholds(&self) -> &[Vec<f64>] {
        &self.thresholds
    }

    pub fn truth(&self) -> &Market {
        &self.truth
    }

    pub fn view(&self, provider: usize) -> &Market {
        &self.views[provider]
    }

    pub fn logit(&self) -> &LogitConfig {
        &self.logit
    }

    pub fn set_logit(&mut self, logit: LogitConfig) {
        self.logit = logit;
    }

    /// Whether any of provider `i`'s clusters falls in each of its tiers.
    /// Prices of unpopulated tiers do not affect the provider's estimate.
    pub fn populated_tiers(&self, provider: usize) -> &[bool] {
        &self.populated[provider]
    }

    /// Sets every unpopulated tier to the price of the nearest populated
    /// tier of the same provider, preferring the cheaper side on ties.
    pub fn fill_unpopulated(&self, c: &mut PriceVector) {
        for (i, used) in self.populated.iter().enumerate() {
            for s in 0..used.len() {
                if used[s] {
                    continue;
                }
                let nearest = (1..used.len())
                    .flat_map(|d| [s.checked_sub(d), Some(s + d)])
                    .flatten()
                    .find(|&t| t < used.len() && used[t]);
                if let Some(t) = nearest {
                    c.prices[i][s] = c.prices[i][t];
                }
            }
        }
    }

    pub fn schedules(&self, c: &PriceVector) -> Result<Vec<DataplanSchedule>, GameError> {
        c.validate(&self.plans(), &self.caps)?;
        Ok(c.prices
            .iter()
            .zip(&self.thresholds)
            .zip(&self.caps)
            .map(|((p, t), &cap)| DataplanSchedule {
                prices: p.clone(),
                thresholds: t.clone(),
                price_cap: cap,
            })
            .collect())
    }

    /// Provider `i`'s estimated equilibrium and revenue at `c`, solved on
    /// its own view from the uniform profile.
    pub fn estimate(&self, provider: usize, c: &PriceVector) -> Result<ViewOutcome, GameError> {
        let schedules = self.schedules(c)?;
        let market = &self.views[provider];
        let profile = equilibrium(market, &schedules, &self.logit)?;
        let schedule = &schedules[provider];
        let mut subscribers = vec![0.0; schedule.plans()];
        for (g, row) in market.groups().iter().zip(profile.rows()) {
            subscribers[schedule.tier_of(g.demand_mb)] += g.population * row[provider + 1];
        }
        let revenue = subscribers.iter().zip(&schedule.prices).map(|(q, p)| q * p).sum();
        Ok(ViewOutcome {
            revenue,
            subscribers,
            profile,
        })
    }

    /// Equilibrium of the real population at `c` and the revenue it yields.
    pub fn realize(&self, c: &PriceVector) -> Result<RealizedOutcome, GameError> {
        let schedules = self.schedules(c)?;
        let profile = equilibrium(&self.truth, &schedules, &self.logit)?;
        let revenue = (0..self.providers())
            .map(|i| revenue_from_profile(self.truth.groups(), &profile, &schedules[i], i))
            .collect();
        let shares = market_share(&profile, self.truth.groups());
        Ok(RealizedOutcome {
            profile,
            revenue,
            shares,
        })
    }
}

/// Logit equilibrium from the uniform profile, followed by one application
/// of the Logit response.
fn equilibrium(
    market: &Market,
    schedules: &[DataplanSchedule],
    logit: &LogitConfig,
) -> Result<StrategyProfile, GameError> {
    let eq = solve_user_equilibrium(market, schedules, logit, None)?;
    Ok(logit_response(market, schedules, &eq.profile, logit.noise)?)
}

/// `σ_i = Σ_j N_j z_ji c_i(d_j)`.
pub fn revenue_from_profile(
    groups: &[UserGroup],
    z: &StrategyProfile,
    schedule: &DataplanSchedule,
    provider: usize,
) -> f64 {
    groups
        .iter()
        .zip(z.rows())
        .map(|(g, row)| g.population * row[provider + 1] * schedule.price_for(g.demand_mb))
        .sum()
}

/// Provider `i`'s estimated revenue at `c`.
pub fn provider_revenue(game: &PricingGame, provider: usize, c: &PriceVector) -> Result<f64, GameError> {
    Ok(game.estimate(provider, c)?.revenue)
}

/// `∂σ_i/∂c_is` for every own price, by central differences of step `h`
/// (one-sided within `h` of a bound).
pub fn revenue_gradient(game: &PricingGame, c: &PriceVector, h: f64) -> Result<Vec<Vec<f64>>, GameError> {
    let mut grad = Vec::with_capacity(game.providers());
    for i in 0..game.providers() {
        let mut row = Vec::with_capacity(c.prices[i].len());
        for s in 0..c.prices[i].len() {
            row.push(own_derivative(game, c, i, s, h, None)?);
        }
        grad.push(row);
    }
    Ok(grad)
}

/// Finite-difference `∂σ_i/∂c_is`. `base` is `σ_i(c)` when already known.
pub(crate) fn own_derivative(
    game: &PricingGame,
    c: &PriceVector,
    i: usize,
    s: usize,
    h: f64,
    base: Option<f64>,
) -> Result<f64, GameError> {
    let cap = game.caps[i];
    let x = c.get(i, s);
    let up = (x + h).min(cap);
    let down = (x - h).max(0.0);
    let eval = |v: f64| -> Result<f64, GameError> {
        let mut p = c.with(i, s, v);
        game.fill_unpopulated(&mut p);
        provider_revenue(game, i, &p)
    };
    let at = |v: f64| -> Result<f64, GameError> {
        if v == x {
            match base {
                Some(b) => Ok(b),
                None => eval(v),
            }
        } else {
            eval(v)
        }
    };
    if up - down <= 0.0 {
        return Ok(0.0);
    }
    Ok((at(up)? - at(down)?) / (up - down))
}
