#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wimarket::dynamics::{DataplanSchedule, Market, UserGroup};
use wimarket::queueing::{
    handover_rates, hexagonal_cell, mobility_stationary, service_rate, uniform_neighbor_routing, BaseStation,
    MobilityModel, ProviderNetwork,
};

pub fn group(id: usize, population: f64, willingness: f64, sensitivity: f64, session_rate: f64) -> UserGroup {
    UserGroup {
        id,
        population,
        willingness,
        saturation: 1.0,
        rate_sensitivity: sensitivity,
        variance_weight: 0.0,
        price_weight: 1.0,
        session_rate,
        demand_mb: 100.0,
        normalized_rate: 1.0,
    }
}

/// `k` hexagonal cells on a ring, 1.6 km apart, every one of `bandwidth`.
pub fn ring_network(k: usize, bandwidth: f64, speed: f64) -> ProviderNetwork {
    let (area, perimeter) = hexagonal_cell(1.6);
    let stations: Vec<BaseStation> = (0..k)
        .map(|id| BaseStation {
            id,
            position: [1.6 * id as f64, 0.0],
            bandwidth,
            cell_area: area,
            cell_perimeter: perimeter,
        })
        .collect();
    let neighbors: Vec<Vec<usize>> = (0..k)
        .map(|m| match k {
            1 => vec![],
            2 => vec![1 - m],
            _ => vec![(m + k - 1) % k, (m + 1) % k],
        })
        .collect();
    let routing = uniform_neighbor_routing(&neighbors);
    let mu: Vec<f64> = stations.iter().map(|s| service_rate(s.bandwidth, 10.0)).collect();
    let v = if k == 1 { vec![0.0] } else { handover_rates(&stations, speed).unwrap() };
    let d: Vec<f64> = v.iter().zip(&mu).map(|(a, b)| a + b).collect();
    let omega = mobility_stationary(&routing, &d).unwrap();
    let mobility = MobilityModel {
        routing,
        omega,
        group_omega: None,
        mean_speed: speed,
    };
    ProviderNetwork::new(stations, mobility, mu, v).unwrap()
}

/// A random market of `providers` ring networks and `groups` groups. Loads
/// reach past saturation, so congestion is part of the test space.
pub fn random_market(rng: &mut ChaCha8Rng, providers: usize, groups: usize) -> Market {
    let networks: Vec<ProviderNetwork> = (0..providers)
        .map(|_| ring_network(rng.random_range(1..=4), rng.random_range(10.0..30.0), 5.0))
        .collect();
    let groups: Vec<UserGroup> = (0..groups)
        .map(|j| {
            let mut g = group(
                j,
                rng.random_range(10.0..1000.0),
                rng.random_range(5.0..50.0),
                rng.random_range(0.05..1.5),
                rng.random_range(0.0..4.0),
            );
            g.variance_weight = rng.random_range(0.0..0.05);
            g.demand_mb = rng.random_range(10.0..1000.0);
            g
        })
        .collect();
    Market::new(&networks, groups).unwrap()
}

pub fn random_schedules(rng: &mut ChaCha8Rng, providers: usize) -> Vec<DataplanSchedule> {
    (0..providers)
        .map(|_| DataplanSchedule::single(rng.random_range(0.0..30.0), 100.0).unwrap())
        .collect()
}

pub fn single_schedules(prices: &[f64]) -> Vec<DataplanSchedule> {
    prices.iter().map(|&c| DataplanSchedule::single(c, 100.0).unwrap()).collect()
}
