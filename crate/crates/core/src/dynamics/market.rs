use super::group::UserGroup;
use super::pricing::DataplanSchedule;
use super::profile::StrategyProfile;
use crate::error::DynamicsError;
use crate::queueing::{average_rate, effective_rates, rate_variance, ProviderNetwork, QosModel, QosReport};

/// A population of user groups facing a set of provider networks.
///
/// The same type serves the ground-truth population and every provider's
/// clustered view of it.
#[derive(Debug, Clone)]
pub struct Market {
    groups: Vec<UserGroup>,
    qos: Vec<QosModel>,
    shared_location: Vec<bool>,
}

impl Market {
    pub fn new(networks: &[ProviderNetwork], groups: Vec<UserGroup>) -> Result<Self, DynamicsError> {
        for g in &groups {
            g.validate()?;
        }
        let rates: Vec<f64> = groups.iter().map(|g| g.session_rate).collect();
        let qos = networks
            .iter()
            .map(|n| QosModel::new(n, &rates))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_parts(groups, qos))
    }

    pub fn from_parts(groups: Vec<UserGroup>, qos: Vec<QosModel>) -> Self {
        let shared_location = qos
            .iter()
            .map(|m| m.omega.windows(2).all(|w| w[0] == w[1]))
            .collect();
        Self {
            groups,
            qos,
            shared_location,
        }
    }

    pub fn groups(&self) -> &[UserGroup] {
        &self.groups
    }

    pub fn providers(&self) -> usize {
        self.qos.len()
    }

    pub fn qos_models(&self) -> &[QosModel] {
        &self.qos
    }

    pub fn total_population(&self) -> f64 {
        self.groups.iter().map(|g| g.population).sum()
    }

    pub fn check_schedules(&self, schedules: &[DataplanSchedule]) -> Result<(), DynamicsError> {
        if schedules.len() != self.providers() {
            return Err(DynamicsError::InvalidSchedule(format!(
                "{} schedules for {} providers",
                schedules.len(),
                self.providers()
            )));
        }
        Ok(())
    }

    pub fn qos_report(&self, z: &StrategyProfile) -> QosReport {
        let j_count = self.groups.len();
        let mut mean_rate = vec![vec![0.0; self.providers()]; j_count];
        let mut variance = vec![vec![0.0; self.providers()]; j_count];
        let mut occupancy = Vec::with_capacity(self.providers());
        for (i, model) in self.qos.iter().enumerate() {
            let load = model.load(&z.column(i + 1));
            let eff = effective_rates(&model.bandwidth, &load);
            for j in 0..j_count {
                mean_rate[j][i] = average_rate(&model.omega[j], &eff);
                variance[j][i] = rate_variance(&model.omega[j], &eff);
            }
            occupancy.push(
                load.iter()
                    .map(|&r| if r < 1.0 { r / (1.0 - r) } else { f64::INFINITY })
                    .collect(),
            );
        }
        QosReport {
            mean_rate,
            rate_variance: variance,
            expected_occupancy: occupancy,
        }
    }

    /// Utilities of every (group, strategy) pair, laid out like `z`.
    pub fn utilities(&self, z: &StrategyProfile, schedules: &[DataplanSchedule]) -> Result<Vec<f64>, DynamicsError> {
        let mut eval = UtilityEvaluator::new(self, schedules)?;
        let mut out = vec![0.0; z.as_slice().len()];
        eval.utilities_into(z.as_slice(), &mut out);
        Ok(out)
    }
}

/// `u_ji = w_R (τ − e^{−h R_ji}) − w_V V_ji − w_P c_i(d_j)` for a provider,
/// zero for disconnection.
pub fn group_utility(
    report: &QosReport,
    schedules: &[DataplanSchedule],
    group: &UserGroup,
    group_index: usize,
    strategy: usize,
) -> f64 {
    if strategy == 0 {
        return 0.0;
    }
    let i = strategy - 1;
    group.rate_utility(report.mean_rate[group_index][i])
        - group.variance_weight * report.rate_variance[group_index][i]
        - group.price_weight * schedules[i].price_for(group.demand_mb)
}

/// Population-weighted share of every strategy.
pub fn market_share(z: &StrategyProfile, groups: &[UserGroup]) -> Vec<f64> {
    let total: f64 = groups.iter().map(|g| g.population).sum();
    let mut share = vec![0.0; z.strategies()];
    if total <= 0.0 {
        return share;
    }
    for (row, g) in z.rows().zip(groups) {
        for (s, &x) in share.iter_mut().zip(row) {
            *s += x * g.population / total;
        }
    }
    share
}

/// Reusable buffers for evaluating utilities many times at fixed prices.
pub struct UtilityEvaluator<'a> {
    market: &'a Market,
    /// `w_P c_i(d_j)`, `[group][provider]`.
    price_terms: Vec<f64>,
    share: Vec<f64>,
    load: Vec<f64>,
    eff: Vec<f64>,
}

impl<'a> UtilityEvaluator<'a> {
    pub fn new(market: &'a Market, schedules: &[DataplanSchedule]) -> Result<Self, DynamicsError> {
        market.check_schedules(schedules)?;
        let providers = market.providers();
        let mut price_terms = Vec::with_capacity(market.groups.len() * providers);
        for g in &market.groups {
            for s in schedules {
                price_terms.push(g.price_weight * s.price_for(g.demand_mb));
            }
        }
        Ok(Self {
            market,
            price_terms,
            share: vec![0.0; market.groups.len()],
            load: Vec::new(),
            eff: Vec::new(),
        })
    }

    pub fn utilities_into(&mut self, z: &[f64], out: &mut [f64]) {
        let market = self.market;
        let providers = market.providers();
        let strategies = providers + 1;
        for j in 0..market.groups.len() {
            out[j * strategies] = 0.0;
        }
        for (i, model) in market.qos.iter().enumerate() {
            for (j, s) in self.share.iter_mut().enumerate() {
                *s = z[j * strategies + i + 1];
            }
            let k = model.bandwidth.len();
            self.load.clear();
            self.load.resize(k, 0.0);
            for (rho, &s) in model.rho.iter().zip(&self.share) {
                if s != 0.0 {
                    for (l, r) in self.load.iter_mut().zip(rho) {
                        *l += s * r;
                    }
                }
            }
            self.eff.clear();
            self.eff
                .extend(model.bandwidth.iter().zip(&self.load).map(|(b, r)| (b * (1.0 - r)).max(0.0)));

            let shared = market.shared_location[i];
            let mut cached: Option<(f64, f64)> = None;
            for (j, g) in market.groups.iter().enumerate() {
                let (rate, var) = match cached {
                    Some(rv) if shared => rv,
                    _ => {
                        let omega = &model.omega[j];
                        let rate = average_rate(omega, &self.eff);
                        let var = if g.variance_weight != 0.0 || shared {
                            rate_variance(omega, &self.eff)
                        } else {
                            0.0
                        };
                        cached = Some((rate, var));
                        (rate, var)
                    }
                };
                out[j * strategies + i + 1] =
                    g.rate_utility(rate) - g.variance_weight * var - self.price_terms[j * providers + i];
            }
        }
    }
}
