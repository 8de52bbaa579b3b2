//! Small games for unit tests.

use super::revenue::PricingGame;
use crate::dynamics::{LogitConfig, Market, UserGroup};
use crate::queueing::{BaseStation, MobilityModel, ProviderNetwork};

pub fn cell(bandwidth: f64) -> ProviderNetwork {
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

pub fn groups(load: f64) -> Vec<UserGroup> {
    [(400.0, 18.0, 0.8, 20.0), (300.0, 26.0, 0.5, 60.0), (300.0, 34.0, 0.3, 120.0)]
        .iter()
        .enumerate()
        .map(|(id, &(population, willingness, rate_sensitivity, demand_mb))| UserGroup {
            id,
            population,
            willingness,
            saturation: 1.0,
            rate_sensitivity,
            variance_weight: 0.0,
            price_weight: 1.0,
            session_rate: load * population / 1000.0,
            demand_mb,
            normalized_rate: 1.0,
        })
        .collect()
}

/// Full-information game on single cells, one tier list per provider.
pub fn game(bandwidths: &[f64], thresholds: Vec<Vec<f64>>) -> PricingGame {
    let nets: Vec<ProviderNetwork> = bandwidths.iter().map(|&b| cell(b)).collect();
    let truth = Market::new(&nets, groups(3.0)).unwrap();
    let views = vec![truth.clone(); bandwidths.len()];
    PricingGame::new(truth, views, thresholds, vec![100.0; bandwidths.len()], LogitConfig::default()).unwrap()
}
