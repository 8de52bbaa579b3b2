use serde::{Deserialize, Serialize};

use super::network::ProviderNetwork;
use super::traffic::total_load;
use crate::error::QueueError;

/// Rate a newly arriving session gets at each station, `B_k (1 − ρ_k)`,
/// clamped at zero when a station is saturated.
pub fn effective_rates(bandwidth: &[f64], load: &[f64]) -> Vec<f64> {
    bandwidth
        .iter()
        .zip(load)
        .map(|(b, rho)| (b * (1.0 - rho)).max(0.0))
        .collect()
}

/// Location-weighted mean of the per-station effective rates.
pub fn average_rate(omega: &[f64], effective: &[f64]) -> f64 {
    omega.iter().zip(effective).map(|(w, r)| w * r).sum()
}

/// Location-weighted spatial variance of the per-station effective rates.
pub fn rate_variance(omega: &[f64], effective: &[f64]) -> f64 {
    let mean = average_rate(omega, effective);
    omega
        .iter()
        .zip(effective)
        .map(|(w, r)| w * (r - mean) * (r - mean))
        .sum()
}

/// The pieces of one provider's network that the user layer needs: per
/// group location distribution and traffic intensity at full subscription.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosModel {
    pub bandwidth: Vec<f64>,
    /// `[group][station]`
    pub omega: Vec<Vec<f64>>,
    /// `[group][station]`
    pub rho: Vec<Vec<f64>>,
}

impl QosModel {
    pub fn new(network: &ProviderNetwork, session_rates: &[f64]) -> Result<Self, QueueError> {
        let traffic = network.traffic(session_rates)?;
        let omega = (0..session_rates.len())
            .map(|j| network.mobility.omega_for(j).to_vec())
            .collect();
        Ok(Self {
            bandwidth: network.bandwidths(),
            omega,
            rho: traffic.rho,
        })
    }

    pub fn stations(&self) -> usize {
        self.bandwidth.len()
    }

    /// Total intensity per station when group `j` sends share `share[j]`
    /// of its sessions to this provider.
    pub fn load(&self, share: &[f64]) -> Vec<f64> {
        total_load(&self.rho, share).rho
    }

    /// Mean rate and spatial variance seen by every group.
    pub fn evaluate(&self, share: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let eff = effective_rates(&self.bandwidth, &self.load(share));
        self.omega
            .iter()
            .map(|w| (average_rate(w, &eff), rate_variance(w, &eff)))
            .unzip()
    }
}

/// QoS of every (group, provider) pair under one strategy profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosReport {
    /// `[group][provider]`, Mbps.
    pub mean_rate: Vec<Vec<f64>>,
    /// `[group][provider]`, Mbps².
    pub rate_variance: Vec<Vec<f64>>,
    /// `[provider][station]`; infinite at saturated stations.
    pub expected_occupancy: Vec<Vec<f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_network_gives_full_bandwidth() {
        let eff = effective_rates(&[25.0; 3], &[0.0; 3]);
        assert_eq!(average_rate(&[0.2, 0.3, 0.5], &eff), 25.0);
        assert_eq!(rate_variance(&[0.2, 0.3, 0.5], &eff), 0.0);
    }

    #[test]
    fn half_loaded_station() {
        let eff = effective_rates(&[20.0], &[0.5]);
        assert_eq!(average_rate(&[1.0], &eff), 10.0);
    }

    #[test]
    fn two_station_variance() {
        let omega = [0.5, 0.5];
        let eff = [10.0, 20.0];
        assert_eq!(average_rate(&omega, &eff), 15.0);
        assert_eq!(rate_variance(&omega, &eff), 25.0);
    }

    #[test]
    fn saturation_clamps_at_zero() {
        assert_eq!(effective_rates(&[10.0, 10.0], &[1.4, 0.2]), vec![0.0, 8.0]);
    }

    #[test]
    fn identical_stations_have_no_variance() {
        let eff = effective_rates(&[16.0; 4], &[0.3; 4]);
        assert!(rate_variance(&[0.1, 0.2, 0.3, 0.4], &eff).abs() < 1e-24);
    }
}
