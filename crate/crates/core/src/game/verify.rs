use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::prices::PriceVector;
use super::revenue::{provider_revenue, PricingGame};
use crate::error::GameError;

/// Revenue of one provider along one of its own prices, all else fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceScan {
    pub provider: usize,
    pub plan: usize,
    pub prices: Vec<f64>,
    pub revenues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub grid: usize,
    pub tolerance: f64,
    /// Estimated revenue of each provider at the candidate.
    pub base_revenue: Vec<f64>,
    /// Largest relative gain of any unilateral single-price deviation.
    pub max_gain: Vec<f64>,
    /// The deviation achieving it, `(plan, price)`.
    pub best_deviation: Vec<Option<(usize, f64)>>,
    pub global: bool,
    #[serde(skip)]
    pub scans: Vec<PriceScan>,
}

impl VerificationReport {
    pub fn worst_gain(&self) -> f64 {
        self.max_gain.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes every scan as `provider,plan,price,revenue` rows.
    pub fn write_scans_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["provider", "plan", "price", "revenue"])?;
        for scan in &self.scans {
            for (p, r) in scan.prices.iter().zip(&scan.revenues) {
                w.write_record([
                    scan.provider.to_string(),
                    scan.plan.to_string(),
                    format!("{p:.6}"),
                    format!("{r:.6}"),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn relative_gain(best: f64, base: f64) -> f64 {
    if base > 0.0 {
        (best - base) / base
    } else if best > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Scans `grid` evenly spaced prices over `[0, C^max]` for every populated
/// own price of every provider, re-solving the provider's estimate each
/// time. The candidate is a global equilibrium when no deviation raises any
/// provider's revenue by `tolerance` or more, relatively.
pub fn verify_nash(
    game: &PricingGame,
    c: &PriceVector,
    grid: usize,
    tolerance: f64,
) -> Result<VerificationReport, GameError> {
    assert!(grid >= 2, "verification grid needs at least two points");
    let providers = game.providers();
    let base_revenue = (0..providers)
        .into_par_iter()
        .map(|i| provider_revenue(game, i, c))
        .collect::<Result<Vec<_>, _>>()?;

    let jobs: Vec<(usize, usize)> = (0..providers)
        .flat_map(|i| {
            game.populated_tiers(i)
                .iter()
                .enumerate()
                .filter(|(_, &u)| u)
                .map(move |(s, _)| (i, s))
        })
        .collect();
    let scans = jobs
        .par_iter()
        .map(|&(i, s)| {
            let cap = game.caps()[i];
            let prices: Vec<f64> = (0..grid).map(|k| cap * k as f64 / (grid - 1) as f64).collect();
            let revenues = prices
                .iter()
                .map(|&p| {
                    let mut dev = c.with(i, s, p);
                    game.fill_unpopulated(&mut dev);
                    provider_revenue(game, i, &dev)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PriceScan {
                provider: i,
                plan: s,
                prices,
                revenues,
            })
        })
        .collect::<Result<Vec<_>, GameError>>()?;

    let mut max_gain = vec![0.0f64; providers];
    let mut best_deviation = vec![None; providers];
    for scan in &scans {
        let i = scan.provider;
        for (&p, &r) in scan.prices.iter().zip(&scan.revenues) {
            let gain = relative_gain(r, base_revenue[i]);
            if gain > max_gain[i] {
                max_gain[i] = gain;
                best_deviation[i] = Some((scan.plan, p));
            }
        }
    }
    let global = max_gain.iter().all(|&g| g < tolerance);
    Ok(VerificationReport {
        grid,
        tolerance,
        base_revenue,
        max_gain,
        best_deviation,
        global,
        scans,
    })
}
