use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;

/// Profile of one homogeneous sub-population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserGroup {
    pub id: usize,
    /// Number of members `N_j`.
    pub population: f64,
    /// Willingness-to-pay scale `w_R`.
    pub willingness: f64,
    /// Saturation offset `τ` of the rate utility.
    pub saturation: f64,
    /// `h`, 1/Mbps. Larger values tolerate low rates better.
    pub rate_sensitivity: f64,
    pub variance_weight: f64,
    pub price_weight: f64,
    /// Total session rate of the whole group, sessions/min.
    pub session_rate: f64,
    /// Monthly demand of one member, MB.
    pub demand_mb: f64,
    /// Per-member session rate relative to the population average.
    pub normalized_rate: f64,
}

impl UserGroup {
    /// Rate utility `w_R (τ − exp(−h R))`.
    pub fn rate_utility(&self, rate: f64) -> f64 {
        self.willingness * (self.saturation - (-self.rate_sensitivity * rate).exp())
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let fail = |reason: &str| {
            Err(DynamicsError::InvalidGroup {
                group: self.id,
                reason: reason.to_string(),
            })
        };
        if !(self.population >= 0.0) {
            return fail("population must be non-negative");
        }
        if !(self.rate_sensitivity > 0.0) {
            return fail("rate sensitivity must be positive");
        }
        if !(self.willingness >= 0.0) {
            return fail("willingness to pay must be non-negative");
        }
        if !(self.variance_weight >= 0.0) {
            return fail("variance weight must be non-negative");
        }
        if !(self.price_weight > 0.0) {
            return fail("price weight must be positive");
        }
        if !(self.session_rate >= 0.0) || !(self.demand_mb >= 0.0) || !(self.normalized_rate >= 0.0) {
            return fail("traffic parameters must be non-negative");
        }
        if !self.saturation.is_finite() {
            return fail("saturation offset must be finite");
        }
        Ok(())
    }
}
