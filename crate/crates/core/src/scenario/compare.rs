use std::io::Write;

use serde::{Deserialize, Serialize};

use super::sweep::MarketOutcome;
use crate::error::ScenarioError;

const GRID_TOL: f64 = 1e-9;

/// Variant minus baseline at one demand level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRow {
    pub lambda_bar: f64,
    pub revenue_delta: Vec<f64>,
    /// `(variant − baseline) / baseline`; zero when both are zero.
    pub revenue_gain: Vec<f64>,
    /// Difference of the mean plan price of each provider.
    pub price_delta: Vec<f64>,
    pub share_delta: Vec<f64>,
    pub disconnected_delta: f64,
}

pub fn relative_change(variant: f64, baseline: f64) -> f64 {
    if variant == baseline {
        0.0
    } else if baseline != 0.0 {
        (variant - baseline) / baseline.abs()
    } else {
        f64::NAN
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn compare_runs(baseline: &[MarketOutcome], variant: &[MarketOutcome]) -> Result<Vec<GainRow>, ScenarioError> {
    if baseline.len() != variant.len() {
        return Err(ScenarioError::Misaligned(format!(
            "{} baseline rows, {} variant rows",
            baseline.len(),
            variant.len()
        )));
    }
    baseline
        .iter()
        .zip(variant)
        .map(|(b, v)| {
            if (b.lambda_bar - v.lambda_bar).abs() > GRID_TOL {
                return Err(ScenarioError::Misaligned(format!(
                    "lambda_bar {} against {}",
                    b.lambda_bar, v.lambda_bar
                )));
            }
            if b.revenue.len() != v.revenue.len() {
                return Err(ScenarioError::Misaligned("provider counts differ".into()));
            }
            Ok(GainRow {
                lambda_bar: b.lambda_bar,
                revenue_delta: v.revenue.iter().zip(&b.revenue).map(|(x, y)| x - y).collect(),
                revenue_gain: v.revenue.iter().zip(&b.revenue).map(|(&x, &y)| relative_change(x, y)).collect(),
                price_delta: v.prices.prices.iter().zip(&b.prices.prices).map(|(x, y)| mean(x) - mean(y)).collect(),
                share_delta: v.shares.iter().zip(&b.shares).map(|(x, y)| x - y).collect(),
                disconnected_delta: v.disconnected - b.disconnected,
            })
        })
        .collect()
}

pub fn write_gains_csv<W: Write>(out: W, rows: &[GainRow]) -> Result<(), ScenarioError> {
    let providers = rows.first().map_or(0, |r| r.revenue_delta.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["lambda_bar".to_string()];
    for prefix in ["revenue_delta", "revenue_gain", "price_delta", "share_delta"] {
        header.extend((1..=providers).map(|i| format!("{prefix}_{i}")));
    }
    header.push("disconnected_delta".into());
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.lambda_bar.to_string()];
        for series in [&r.revenue_delta, &r.revenue_gain, &r.price_delta, &r.share_delta] {
            rec.extend(series.iter().map(f64::to_string));
        }
        rec.push(r.disconnected_delta.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
