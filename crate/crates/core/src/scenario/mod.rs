//! Synthetic markets on a triangular base-station lattice, demand sweeps
//! over the mean session rate, and result export and comparison.

mod compare;
mod io;
mod network;
mod population;
mod spec;
mod sweep;

pub use compare::{compare_runs, relative_change, write_gains_csv, GainRow};
pub use io::{read_run, read_sweep_csv, write_run, write_sweep_csv, SWEEP_CSV};
pub use network::{build_network, lattice_sites};
pub use population::{groups_at, sample_population, sample_profiles, GroupProfile};
pub use spec::{DemandSweep, MarketArea, ProfileDistribution, ScenarioSpec, Seeds, UtilityConstants};
pub use sweep::{
    category_shares, run_sweep, run_sweep_reports, GameSetup, MarketOutcome, OutcomeStatus, PointReport, Scenario,
};
