use serde::{Deserialize, Serialize};

use crate::error::GameError;

/// Dataplan prices of every provider, `prices[i][s]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceVector {
    pub prices: Vec<Vec<f64>>,
}

impl PriceVector {
    pub fn new(prices: Vec<Vec<f64>>) -> Self {
        Self { prices }
    }

    pub fn constant(plans: &[usize], value: f64) -> Self {
        Self {
            prices: plans.iter().map(|&s| vec![value; s]).collect(),
        }
    }

    pub fn providers(&self) -> usize {
        self.prices.len()
    }

    pub fn plans(&self) -> Vec<usize> {
        self.prices.iter().map(Vec::len).collect()
    }

    pub fn get(&self, provider: usize, plan: usize) -> f64 {
        self.prices[provider][plan]
    }

    pub fn set(&mut self, provider: usize, plan: usize, value: f64) {
        self.prices[provider][plan] = value;
    }

    pub fn with(&self, provider: usize, plan: usize, value: f64) -> Self {
        let mut c = self.clone();
        c.set(provider, plan, value);
        c
    }

    pub fn flat(&self) -> Vec<f64> {
        self.prices.iter().flatten().copied().collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.flat()
            .iter()
            .zip(other.flat())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Checks the shape against `plans` and every entry against its cap.
    pub fn validate(&self, plans: &[usize], caps: &[f64]) -> Result<(), GameError> {
        if self.plans() != plans {
            return Err(GameError::Shape(format!("expected plans {plans:?}, got {:?}", self.plans())));
        }
        for (i, (row, cap)) in self.prices.iter().zip(caps).enumerate() {
            if let Some(p) = row.iter().find(|&&p| !(0.0..=*cap).contains(&p)) {
                return Err(GameError::Shape(format!("provider {i} price {p} outside [0, {cap}]")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_bounds() {
        let c = PriceVector::new(vec![vec![1.0, 2.0], vec![3.0]]);
        assert_eq!(c.plans(), vec![2, 1]);
        assert_eq!(c.flat(), vec![1.0, 2.0, 3.0]);
        assert!(c.validate(&[2, 1], &[10.0, 10.0]).is_ok());
        assert!(c.validate(&[1, 1], &[10.0, 10.0]).is_err());
        assert!(c.validate(&[2, 1], &[10.0, 2.5]).is_err());
        assert_eq!(c.with(0, 1, 5.0).max_abs_diff(&c), 3.0);
    }

    #[test]
    fn json_is_a_nested_list() {
        let c = PriceVector::constant(&[1, 2], 4.0);
        assert_eq!(serde_json::to_string(&c).unwrap(), "[[4.0],[4.0,4.0]]");
    }
}
