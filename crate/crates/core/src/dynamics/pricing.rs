use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;

/// Tiered flat-rate dataplans of one provider.
///
/// Tier `s` charges `prices[s]` to members whose monthly demand lies in
/// `(thresholds[s-1], thresholds[s]]`. The last threshold is usually
/// infinite; demand above a finite last threshold pays the last tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataplanSchedule {
    pub prices: Vec<f64>,
    #[serde(with = "crate::serde_util::vec_f64_inf")]
    pub thresholds: Vec<f64>,
    pub price_cap: f64,
}

impl DataplanSchedule {
    pub fn new(prices: Vec<f64>, thresholds: Vec<f64>, price_cap: f64) -> Result<Self, DynamicsError> {
        let s = Self {
            prices,
            thresholds,
            price_cap,
        };
        s.validate()?;
        Ok(s)
    }

    /// One plan with an unbounded demand interval.
    pub fn single(price: f64, price_cap: f64) -> Result<Self, DynamicsError> {
        Self::new(vec![price], vec![f64::INFINITY], price_cap)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if self.prices.is_empty() {
            return Err(DynamicsError::InvalidSchedule("at least one plan is required".into()));
        }
        if self.prices.len() != self.thresholds.len() {
            return Err(DynamicsError::InvalidSchedule(format!(
                "{} prices for {} thresholds",
                self.prices.len(),
                self.thresholds.len()
            )));
        }
        if self.thresholds.windows(2).any(|w| !(w[0] < w[1])) || self.thresholds.iter().any(|t| t.is_nan()) {
            return Err(DynamicsError::InvalidSchedule("thresholds must be strictly increasing".into()));
        }
        if !(self.price_cap >= 0.0) {
            return Err(DynamicsError::InvalidSchedule("price cap must be non-negative".into()));
        }
        if let Some(p) = self.prices.iter().find(|&&p| !(0.0..=self.price_cap).contains(&p)) {
            return Err(DynamicsError::InvalidSchedule(format!(
                "price {p} outside [0, {}]",
                self.price_cap
            )));
        }
        Ok(())
    }

    pub fn plans(&self) -> usize {
        self.prices.len()
    }

    /// Index of the tier that charges a member with the given monthly
    /// demand. Intervals are right-closed; zero demand falls in the first.
    pub fn tier_of(&self, demand: f64) -> usize {
        self.thresholds
            .iter()
            .position(|&t| demand <= t)
            .unwrap_or(self.thresholds.len() - 1)
    }

    pub fn price_for(&self, demand: f64) -> f64 {
        self.prices[self.tier_of(demand)]
    }
}

pub fn dataplan_price(schedule: &DataplanSchedule, demand: f64) -> f64 {
    schedule.price_for(demand)
}
