//! Analytic model of one provider's base-station network.
//!
//! Every base station is a processor-sharing queue. Sessions arrive as
//! Poisson streams, are served at rate `μ` and hand over to neighbouring
//! stations at rate `v`, so the network is an open Jackson network whose
//! stationary distribution factorizes into independent M/M/1 terms.
//!
//! Units: rates are sessions per minute, bandwidths are Mbps, lengths are
//! km. A session of `s` MB carries `8 s` Mb, so a station of `B` Mbps
//! completes `60 B / (8 s)` sessions per minute (25 Mbps and 10 MB give
//! 18.75).

mod geometry;
mod mobility;
mod network;
mod product_form;
mod qos;
mod traffic;

pub use geometry::{handover_rates, hexagonal_cell, service_rate, BaseStation};
pub use mobility::{mobility_stationary, uniform_neighbor_routing, MobilityModel};
pub use network::ProviderNetwork;
pub use product_form::{check_local_balance, stationary_distribution, ProductForm};
pub use qos::{average_rate, effective_rates, rate_variance, QosModel, QosReport};
pub use traffic::{solve_traffic_equations, total_load, traffic_intensities, TotalLoad, TrafficSolution};

/// Truncation per station used by the validation operations.
pub const DEFAULT_TRUNCATION: usize = 30;

/// Minutes in an hour, for converting km/h and sessions/hour.
pub const MINUTES_PER_HOUR: f64 = 60.0;
