use super::spec::{MarketArea, ScenarioSpec};
use crate::error::ScenarioError;
use crate::queueing::{
    handover_rates, hexagonal_cell, mobility_stationary, service_rate, uniform_neighbor_routing, BaseStation,
    MobilityModel, ProviderNetwork,
};

const EDGE_EPS: f64 = 1e-9;

/// Sites of a triangular lattice anchored at the origin that fall inside
/// the rectangle. Rows are `spacing·√3/2` apart and odd rows are shifted by
/// half a spacing.
pub fn lattice_sites(area: &MarketArea) -> Vec<[f64; 2]> {
    let s = area.spacing_km;
    let row_gap = s * 3f64.sqrt() / 2.0;
    let mut sites = Vec::new();
    let mut r = 0usize;
    loop {
        let y = r as f64 * row_gap;
        if y > area.height_km + EDGE_EPS {
            break;
        }
        let offset = if r % 2 == 1 { s / 2.0 } else { 0.0 };
        let mut c = 0usize;
        loop {
            let x = offset + c as f64 * s;
            if x > area.width_km + EDGE_EPS {
                break;
            }
            sites.push([x, y]);
            c += 1;
        }
        r += 1;
    }
    sites
}

fn neighbours(sites: &[[f64; 2]], spacing: f64) -> Vec<Vec<usize>> {
    let reach = spacing * (1.0 + 1e-6);
    sites
        .iter()
        .enumerate()
        .map(|(a, p)| {
            sites
                .iter()
                .enumerate()
                .filter(|&(b, q)| b != a && (p[0] - q[0]).hypot(p[1] - q[1]) <= reach)
                .map(|(b, _)| b)
                .collect()
        })
        .collect()
}

/// One network per provider, all on the same lattice, each with uniform
/// bandwidth from the capacity list.
pub fn build_network(spec: &ScenarioSpec) -> Result<Vec<ProviderNetwork>, ScenarioError> {
    let area = &spec.area;
    let (cell_area, cell_perimeter) = hexagonal_cell(area.spacing_km);
    if !(area.spacing_km > 0.0) || area.width_km * area.height_km < cell_area {
        return Err(ScenarioError::Geometry(format!(
            "{} x {} km cannot hold a cell of spacing {} km",
            area.width_km, area.height_km, area.spacing_km
        )));
    }
    let sites = lattice_sites(area);
    let adjacency = neighbours(&sites, area.spacing_km);
    let routing = uniform_neighbor_routing(&adjacency);

    spec.capacities_mbps
        .iter()
        .map(|&bandwidth| {
            let stations: Vec<BaseStation> = sites
                .iter()
                .enumerate()
                .map(|(id, &position)| BaseStation {
                    id,
                    position,
                    bandwidth,
                    cell_area,
                    cell_perimeter,
                })
                .collect();
            let handover = if stations.len() > 1 {
                handover_rates(&stations, spec.mean_speed_kmh)?
            } else {
                vec![0.0]
            };
            let service: Vec<f64> = stations.iter().map(|b| service_rate(b.bandwidth, spec.session_mb)).collect();
            let departure: Vec<f64> = handover.iter().zip(&service).map(|(v, m)| v + m).collect();
            let omega = mobility_stationary(&routing, &departure)?;
            let mobility = MobilityModel {
                routing: routing.clone(),
                omega,
                group_omega: None,
                mean_speed: spec.mean_speed_kmh,
            };
            Ok(ProviderNetwork::new(stations, mobility, service, handover)?)
        })
        .collect()
}
