//! Price competition among providers. Each provider values a price vector
//! by the user equilibrium of its own clustered view; equilibria of the game
//! are found from the first-order conditions and checked by grid search.

#[cfg(test)]
mod fixtures;
mod nash;
mod prices;
mod revenue;
mod verify;

pub use nash::{solve_nash, Candidate, NashConfig, NashResult, NashStatus, SolverMethod};
pub use prices::PriceVector;
pub use revenue::{provider_revenue, revenue_from_profile, revenue_gradient, PricingGame, RealizedOutcome, ViewOutcome};
pub use verify::{verify_nash, PriceScan, VerificationReport};
