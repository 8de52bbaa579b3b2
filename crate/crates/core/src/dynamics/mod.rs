//! User service selection: utilities, tiered dataplan prices and the Logit
//! dynamics whose rest point is the user equilibrium for a price vector.

mod equilibrium;
mod group;
mod logit;
mod market;
pub mod ode;
mod pricing;
mod profile;

pub use equilibrium::{
    fixed_point_residual, logit_response, solve_user_equilibrium, solve_user_equilibrium_with, LogitConfig, UserEquilibrium,
};
pub use group::UserGroup;
pub use logit::{logit_rhs, softmax_into, softmax_row};
pub use market::{group_utility, market_share, Market, UtilityEvaluator};
pub use pricing::{dataplan_price, DataplanSchedule};
pub use profile::StrategyProfile;
