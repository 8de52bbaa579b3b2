use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::MINUTES_PER_HOUR;
use crate::error::QueueError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: usize,
    /// Position in km inside the market rectangle.
    pub position: [f64; 2],
    /// Mbps.
    pub bandwidth: f64,
    /// km².
    pub cell_area: f64,
    /// km.
    pub cell_perimeter: f64,
}

/// Area and perimeter of the hexagonal cell around a site of a triangular
/// lattice with the given site spacing.
pub fn hexagonal_cell(spacing: f64) -> (f64, f64) {
    let side = spacing / 3f64.sqrt();
    let area = 3f64.sqrt() / 2.0 * spacing * spacing;
    (area, 6.0 * side)
}

/// Sessions per minute a station of `bandwidth_mbps` completes when sessions
/// carry `session_mb` megabytes.
pub fn service_rate(bandwidth_mbps: f64, session_mb: f64) -> f64 {
    bandwidth_mbps * MINUTES_PER_HOUR / (8.0 * session_mb)
}

/// Fluid-flow handover rate per station, in sessions per minute.
///
/// A user moving at `mean_speed` km/h in a random direction crosses the
/// boundary of a cell with perimeter `P` and area `A` at rate
/// `mean_speed · P / (π A)` per hour.
pub fn handover_rates(stations: &[BaseStation], mean_speed: f64) -> Result<Vec<f64>, QueueError> {
    if !(mean_speed >= 0.0) {
        return Err(QueueError::NegativeSpeed(mean_speed));
    }
    stations
        .iter()
        .map(|bs| {
            if !(bs.cell_area > 0.0) || !(bs.cell_perimeter >= 0.0) {
                return Err(QueueError::DegenerateGeometry {
                    station: bs.id,
                    area: bs.cell_area,
                    perimeter: bs.cell_perimeter,
                });
            }
            Ok(mean_speed * bs.cell_perimeter / (PI * bs.cell_area) / MINUTES_PER_HOUR)
        })
        .collect()
}
