use serde::{Deserialize, Serialize};

use super::geometry::BaseStation;
use super::mobility::MobilityModel;
use super::traffic::{solve_traffic_equations, traffic_intensities, TrafficSolution};
use crate::error::QueueError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderNetwork {
    pub stations: Vec<BaseStation>,
    pub mobility: MobilityModel,
    /// Session service rate `μ` per station, sessions/min.
    pub service_rate: Vec<f64>,
    /// Handover departure rate `v` per station, sessions/min.
    pub handover_rate: Vec<f64>,
}

impl ProviderNetwork {
    pub fn new(
        stations: Vec<BaseStation>,
        mobility: MobilityModel,
        service_rate: Vec<f64>,
        handover_rate: Vec<f64>,
    ) -> Result<Self, QueueError> {
        let net = Self {
            stations,
            mobility,
            service_rate,
            handover_rate,
        };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<(), QueueError> {
        let k = self.stations.len();
        if k == 0 {
            return Err(QueueError::Dimension("network has no stations".into()));
        }
        if self.service_rate.len() != k || self.handover_rate.len() != k || self.mobility.omega.len() != k {
            return Err(QueueError::Dimension(format!(
                "per-station vectors must all have {k} entries"
            )));
        }
        for bs in &self.stations {
            if !(bs.bandwidth > 0.0) {
                return Err(QueueError::InvalidParameter(format!(
                    "station {} has non-positive bandwidth",
                    bs.id
                )));
            }
            if !(bs.cell_area > 0.0) {
                return Err(QueueError::DegenerateGeometry {
                    station: bs.id,
                    area: bs.cell_area,
                    perimeter: bs.cell_perimeter,
                });
            }
        }
        if self.service_rate.iter().any(|&m| !(m > 0.0)) {
            return Err(QueueError::InvalidParameter("service rates must be positive".into()));
        }
        if self.handover_rate.iter().any(|&v| !(v >= 0.0)) {
            return Err(QueueError::InvalidParameter("handover rates must be non-negative".into()));
        }
        self.mobility.validate()
    }

    pub fn num_stations(&self) -> usize {
        self.stations.len()
    }

    pub fn bandwidths(&self) -> Vec<f64> {
        self.stations.iter().map(|s| s.bandwidth).collect()
    }

    pub fn max_bandwidth(&self) -> f64 {
        self.stations.iter().map(|s| s.bandwidth).fold(0.0, f64::max)
    }

    /// `d = v + μ`.
    pub fn departure_rate(&self) -> Vec<f64> {
        self.handover_rate
            .iter()
            .zip(&self.service_rate)
            .map(|(v, mu)| v + mu)
            .collect()
    }

    /// Unconditional handover probabilities `p[m][k] = v_m p*[m][k] / d_m`.
    pub fn unconditional_routing(&self) -> Vec<Vec<f64>> {
        let d = self.departure_rate();
        self.mobility
            .routing
            .iter()
            .enumerate()
            .map(|(m, row)| row.iter().map(|p| self.handover_rate[m] * p / d[m]).collect())
            .collect()
    }

    /// Traffic of every group when it connects entirely to this provider.
    /// `session_rates[j]` is the total session rate of group `j` in
    /// sessions/min; it is spread over stations by the group's location
    /// distribution.
    pub fn traffic(&self, session_rates: &[f64]) -> Result<TrafficSolution, QueueError> {
        if let Some(rows) = &self.mobility.group_omega {
            if rows.len() < session_rates.len() {
                return Err(QueueError::Dimension(format!(
                    "{} group location vectors for {} groups",
                    rows.len(),
                    session_rates.len()
                )));
            }
        }
        let routing = self.unconditional_routing();
        let d = self.departure_rate();
        let mut out = TrafficSolution {
            arrivals: Vec::with_capacity(session_rates.len()),
            gamma: Vec::with_capacity(session_rates.len()),
            rho: Vec::with_capacity(session_rates.len()),
        };

        // With shared mobility, traffic is linear in the session rate, so a
        // single unit solve serves every group.
        let shared = if self.mobility.group_omega.is_none() {
            let gamma = solve_traffic_equations(&self.mobility.omega, &routing)?;
            Some(gamma)
        } else {
            None
        };

        for (j, &lambda) in session_rates.iter().enumerate() {
            let omega = self.mobility.omega_for(j);
            let arrivals: Vec<f64> = omega.iter().map(|w| w * lambda).collect();
            let gamma = match &shared {
                Some(unit) => unit.iter().map(|g| g * lambda).collect(),
                None => solve_traffic_equations(&arrivals, &routing)?,
            };
            let rho = traffic_intensities(&gamma, &d)?;
            out.arrivals.push(arrivals);
            out.gamma.push(gamma);
            out.rho.push(rho);
        }
        Ok(out)
    }
}
