use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;

/// Share of each group on each strategy. Column 0 is disconnection,
/// column `i` is provider `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct StrategyProfile {
    groups: usize,
    strategies: usize,
    values: Vec<f64>,
}

impl StrategyProfile {
    /// Every group split evenly over disconnection and the providers.
    pub fn uniform(groups: usize, providers: usize) -> Self {
        let strategies = providers + 1;
        Self {
            groups,
            strategies,
            values: vec![1.0 / strategies as f64; groups * strategies],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, DynamicsError> {
        let groups = rows.len();
        let strategies = rows.first().map_or(0, Vec::len);
        if strategies < 1 || rows.iter().any(|r| r.len() != strategies) {
            return Err(DynamicsError::InvalidProfile("rows must be non-empty and of equal length".into()));
        }
        let p = Self {
            groups,
            strategies,
            values: rows.into_iter().flatten().collect(),
        };
        p.validate(1e-9)?;
        Ok(p)
    }

    pub(crate) fn from_flat(groups: usize, strategies: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), groups * strategies);
        Self {
            groups,
            strategies,
            values,
        }
    }

    pub fn validate(&self, tol: f64) -> Result<(), DynamicsError> {
        for j in 0..self.groups {
            let row = self.row(j);
            if row.iter().any(|&x| !(-tol..=1.0 + tol).contains(&x)) {
                return Err(DynamicsError::InvalidProfile(format!("group {j} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tol {
                return Err(DynamicsError::InvalidProfile(format!("group {j} row sums to {sum}")));
            }
        }
        Ok(())
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn strategies(&self) -> usize {
        self.strategies
    }

    pub fn providers(&self) -> usize {
        self.strategies - 1
    }

    pub fn get(&self, group: usize, strategy: usize) -> f64 {
        self.values[group * self.strategies + strategy]
    }

    pub fn row(&self, group: usize) -> &[f64] {
        &self.values[group * self.strategies..(group + 1) * self.strategies]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.strategies)
    }

    pub fn column(&self, strategy: usize) -> Vec<f64> {
        self.rows().map(|r| r[strategy]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<Vec<f64>>> for StrategyProfile {
    type Error = DynamicsError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self, Self::Error> {
        Self::from_rows(rows)
    }
}

impl From<StrategyProfile> for Vec<Vec<f64>> {
    fn from(p: StrategyProfile) -> Self {
        p.rows().map(<[f64]>::to_vec).collect()
    }
}
