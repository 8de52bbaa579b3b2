use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::kmeans::weighted_kmeans;
use crate::dynamics::UserGroup;
use crate::error::SegmentationError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterFeature {
    Willingness,
    RateSensitivity,
    NormalizedRate,
    Demand,
    VarianceWeight,
}

impl ClusterFeature {
    fn value(self, g: &UserGroup) -> f64 {
        match self {
            Self::Willingness => g.willingness,
            Self::RateSensitivity => g.rate_sensitivity,
            Self::NormalizedRate => g.normalized_rate,
            Self::Demand => g.demand_mb,
            Self::VarianceWeight => g.variance_weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterOptions {
    /// Candidate features; those constant over the population are skipped.
    pub features: Vec<ClusterFeature>,
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            features: vec![
                ClusterFeature::Willingness,
                ClusterFeature::RateSensitivity,
                ClusterFeature::NormalizedRate,
                ClusterFeature::Demand,
                ClusterFeature::VarianceWeight,
            ],
            restarts: 10,
            max_iter: 300,
        }
    }
}

/// A provider's clustered picture of the population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderView {
    pub provider: usize,
    pub level_of_detail: usize,
    /// Representative groups; `clusters[c].id == c`.
    pub clusters: Vec<UserGroup>,
    /// Cluster index of every ground-truth group.
    pub mapping: Vec<usize>,
    /// Features that actually entered the clustering.
    pub features: Vec<ClusterFeature>,
    /// Weighted within-cluster sum of squares in standardized units.
    pub wcss: f64,
}

impl ProviderView {
    pub fn with_provider(mut self, provider: usize) -> Self {
        self.provider = provider;
        self
    }

    /// Ground-truth members of cluster `c`.
    pub fn members(&self, c: usize) -> Vec<usize> {
        self.mapping
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == c)
            .map(|(j, _)| j)
            .collect()
    }
}

pub fn cluster_population(groups: &[UserGroup], level: usize, seed: u64) -> Result<ProviderView, SegmentationError> {
    cluster_population_with(groups, level, seed, &ClusterOptions::default())
}

fn full_key(g: &UserGroup) -> [f64; 9] {
    [
        g.willingness,
        g.rate_sensitivity,
        g.normalized_rate,
        g.demand_mb,
        g.variance_weight,
        g.population,
        g.session_rate,
        g.saturation,
        g.price_weight,
    ]
}

fn cmp_keys(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Population-weighted K-means over z-scored profile features.
///
/// Groups are processed in a canonical order, so the result does not depend
/// on the order in which they are given, and clusters are numbered by their
/// first member in that order.
pub fn cluster_population_with(
    groups: &[UserGroup],
    level: usize,
    seed: u64,
    options: &ClusterOptions,
) -> Result<ProviderView, SegmentationError> {
    let j_count = groups.len();
    if level == 0 || level > j_count {
        return Err(SegmentationError::InvalidDetail {
            level,
            groups: j_count,
        });
    }

    let mut order: Vec<usize> = (0..j_count).collect();
    order.sort_by(|&a, &b| cmp_keys(&full_key(&groups[a]), &full_key(&groups[b])));
    let sorted: Vec<&UserGroup> = order.iter().map(|&j| &groups[j]).collect();
    let weights: Vec<f64> = sorted.iter().map(|g| g.population).collect();
    let total: f64 = weights.iter().sum();

    let mut used = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &f in &options.features {
        if used.contains(&f) {
            continue;
        }
        let raw: Vec<f64> = sorted.iter().map(|g| f.value(g)).collect();
        let (mean, sd) = weighted_moments(&raw, &weights, total);
        if !(sd > 1e-12 * mean.abs().max(1.0)) {
            continue;
        }
        used.push(f);
        columns.push(raw.iter().map(|x| (x - mean) / sd).collect());
    }
    let points: Vec<Vec<f64>> = (0..j_count).map(|r| columns.iter().map(|c| c[r]).collect()).collect();

    let fit = weighted_kmeans(&points, &weights, level, seed, options.restarts, options.max_iter);

    let mut relabel = vec![usize::MAX; level];
    let mut next = 0;
    for &a in &fit.assignment {
        if relabel[a] == usize::MAX {
            relabel[a] = next;
            next += 1;
        }
    }
    let mut mapping = vec![0; j_count];
    let mut members: Vec<Vec<&UserGroup>> = vec![Vec::new(); level];
    for (r, &a) in fit.assignment.iter().enumerate() {
        let c = relabel[a];
        mapping[order[r]] = c;
        members[c].push(sorted[r]);
    }
    let clusters = members
        .iter()
        .enumerate()
        .map(|(c, m)| centroid_group(c, m))
        .collect();

    Ok(ProviderView {
        provider: 0,
        level_of_detail: level,
        clusters,
        mapping,
        features: used,
        wcss: fit.wcss,
    })
}

fn weighted_moments(values: &[f64], weights: &[f64], total: f64) -> (f64, f64) {
    if total > 0.0 {
        let mean = values.iter().zip(weights).map(|(x, w)| w * x).sum::<f64>() / total;
        let var = values.iter().zip(weights).map(|(x, w)| w * (x - mean).powi(2)).sum::<f64>() / total;
        (mean, var.sqrt())
    } else {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }
}

/// Representative group: population and session rate add up, every other
/// attribute is the population-weighted mean.
fn centroid_group(id: usize, members: &[&UserGroup]) -> UserGroup {
    if let [only] = members {
        return UserGroup { id, ..(*only).clone() };
    }
    let population: f64 = members.iter().map(|g| g.population).sum();
    let (weight, norm): (Box<dyn Fn(&UserGroup) -> f64>, f64) = if population > 0.0 {
        (Box::new(|g: &UserGroup| g.population), population)
    } else {
        (Box::new(|_: &UserGroup| 1.0), members.len() as f64)
    };
    let mean = |f: fn(&UserGroup) -> f64| members.iter().map(|g| weight(g) * f(g)).sum::<f64>() / norm;
    UserGroup {
        id,
        population,
        willingness: mean(|g| g.willingness),
        saturation: mean(|g| g.saturation),
        rate_sensitivity: mean(|g| g.rate_sensitivity),
        variance_weight: mean(|g| g.variance_weight),
        price_weight: mean(|g| g.price_weight),
        session_rate: members.iter().map(|g| g.session_rate).sum(),
        demand_mb: mean(|g| g.demand_mb),
        normalized_rate: mean(|g| g.normalized_rate),
    }
}
