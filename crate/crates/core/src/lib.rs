//! Equilibrium engine for multi-provider wireless access markets.
//!
//! Providers run processor-sharing base-station networks ([`queueing`]).
//! User groups choose a provider or disconnection through noisy Logit
//! dynamics ([`dynamics`]). Each provider sees the population through its own
//! clustering ([`segmentation`]) and sets dataplan prices in a Nash game
//! played on those views ([`game`]). [`scenario`] generates synthetic
//! markets, runs demand sweeps and exports results.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod game;
pub mod linalg;
pub mod queueing;
pub mod scenario;
pub mod segmentation;
mod serde_util;

pub use error::{DynamicsError, GameError, QueueError, ScenarioError, SegmentationError};
