//! Providers' views of the population: K-means clusters standing in for the
//! ground-truth groups, demand tiers for dataplans, and user categories.

mod categories;
pub mod kmeans;
mod tiers;
mod view;

pub use categories::{categorize_groups, category_counts, UserCategory};
pub use tiers::{dataplan_tiers, type7_quantile};
pub use view::{cluster_population, cluster_population_with, ClusterFeature, ClusterOptions, ProviderView};
