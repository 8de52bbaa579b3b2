use thiserror::Error;

use crate::dynamics::StrategyProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueueError {
    #[error("degenerate cell geometry at station {station}: area {area} km², perimeter {perimeter} km")]
    DegenerateGeometry {
        station: usize,
        area: f64,
        perimeter: f64,
    },
    #[error("negative mean speed {0} km/h")]
    NegativeSpeed(f64),
    #[error("routing row {row} sums to {sum}, expected 1")]
    NotStochastic { row: usize, sum: f64 },
    #[error("routing matrix has a non-zero diagonal entry at station {0}")]
    SelfHandover(usize),
    #[error("mobility chain is reducible; no unique stationary distribution")]
    Reducible,
    #[error("routing has a closed loop with no exit; traffic equations diverge")]
    Unstable,
    #[error("station {station}: traffic intensity {rho} is not below 1")]
    UnstableQueue { station: usize, rho: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid network parameter: {0}")]
    InvalidParameter(String),
    #[error("truncated state space with {0} states is too large")]
    StateSpaceTooLarge(usize),
}

#[derive(Debug, Error, Clone)]
pub enum DynamicsError {
    #[error("invalid user group {group}: {reason}")]
    InvalidGroup { group: usize, reason: String },
    #[error("invalid dataplan schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),
    #[error("invalid logit configuration: {0}")]
    InvalidConfig(String),
    #[error("logit dynamics did not converge by t = {time} (residual {residual:.3e})")]
    NotConverged {
        time: f64,
        residual: f64,
        last: Box<StrategyProfile>,
    },
    #[error("step size underflow at t = {time}")]
    StepUnderflow { time: f64 },
    #[error(transparent)]
    Queue(#[from] QueueError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SegmentationError {
    #[error("level of detail {level} is invalid for {groups} groups")]
    InvalidDetail { level: usize, groups: usize },
    #[error("at least {needed} groups are required, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("number of dataplans must be at least 1")]
    NoPlans,
}

#[derive(Debug, Error, Clone)]
pub enum GameError {
    #[error("price vector does not match the game: {0}")]
    Shape(String),
    #[error("invalid game: {0}")]
    Invalid(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Queue(#[from] QueueError),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("degenerate market geometry: {0}")]
    Geometry(String),
    #[error("sweep grids are misaligned: {0}")]
    Misaligned(String),
    #[error(transparent)]
    Queue(#[from] QueueError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Segmentation(#[from] SegmentationError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
