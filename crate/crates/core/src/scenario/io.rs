use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use super::sweep::{MarketOutcome, OutcomeStatus, PointReport};
use crate::error::ScenarioError;
use crate::game::PriceVector;
use crate::segmentation::UserCategory;

pub const SWEEP_CSV: &str = "sweep.csv";

fn strategy_name(k: usize) -> String {
    if k == 0 {
        "disconnected".into()
    } else {
        format!("p{k}")
    }
}

fn header(plans: &[usize]) -> Vec<String> {
    let providers = plans.len();
    let mut h = vec!["lambda_bar".to_string()];
    for (i, &s) in plans.iter().enumerate() {
        for p in 0..s {
            h.push(format!("price_{}_{}", i + 1, p + 1));
        }
    }
    h.extend((1..=providers).map(|i| format!("revenue_{i}")));
    h.extend((1..=providers).map(|i| format!("share_{i}")));
    h.push("disconnected_frac".into());
    for cat in UserCategory::ALL {
        for k in 0..=providers {
            h.push(format!("share_{}_{}", cat.name(), strategy_name(k)));
        }
    }
    h.push("status".into());
    h
}

/// Writes one row per outcome. Floats use the shortest representation
/// that reads back to the same value.
pub fn write_sweep_csv<W: Write>(out: W, outcomes: &[MarketOutcome]) -> Result<(), ScenarioError> {
    let plans = outcomes.first().map(|o| o.prices.plans()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(&plans))?;
    for o in outcomes {
        let mut row = vec![o.lambda_bar.to_string()];
        row.extend(o.prices.flat().iter().map(f64::to_string));
        row.extend(o.revenue.iter().map(f64::to_string));
        row.extend(o.shares.iter().map(f64::to_string));
        row.push(o.disconnected.to_string());
        for cat in &o.category_shares {
            row.extend(cat.iter().map(f64::to_string));
        }
        row.push(o.status.as_str().to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn bad(m: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(format!("malformed sweep CSV: {}", m.into()))
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<MarketOutcome>, ScenarioError> {
    let mut r = csv::Reader::from_reader(input);
    let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(k, h)| (h.as_str(), k)).collect();

    let mut plans: Vec<usize> = Vec::new();
    for h in &headers {
        if let Some(rest) = h.strip_prefix("price_") {
            let (i, _) = rest.split_once('_').ok_or_else(|| bad(h.clone()))?;
            let i: usize = i.parse().map_err(|_| bad(h.clone()))?;
            if i == 0 {
                return Err(bad(h.clone()));
            }
            if plans.len() < i {
                plans.resize(i, 0);
            }
            plans[i - 1] += 1;
        }
    }
    let providers = plans.len();
    let col = |name: &str| index.get(name).copied().ok_or_else(|| bad(format!("missing column {name}")));

    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let num = |k: usize| -> Result<f64, ScenarioError> {
            record
                .get(k)
                .ok_or_else(|| bad("short row"))?
                .parse::<f64>()
                .map_err(|_| bad(format!("not a number in column {}", headers[k])))
        };
        let mut prices = Vec::with_capacity(providers);
        for (i, &s) in plans.iter().enumerate() {
            let mut row = Vec::with_capacity(s);
            for p in 0..s {
                row.push(num(col(&format!("price_{}_{}", i + 1, p + 1))?)?);
            }
            prices.push(row);
        }
        let series = |prefix: &str| -> Result<Vec<f64>, ScenarioError> {
            (1..=providers).map(|i| num(col(&format!("{prefix}_{i}"))?)).collect()
        };
        let mut category_shares = Vec::new();
        for cat in UserCategory::ALL {
            category_shares.push(
                (0..=providers)
                    .map(|k| num(col(&format!("share_{}_{}", cat.name(), strategy_name(k)))?))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let status_text = record.get(col("status")?).ok_or_else(|| bad("short row"))?;
        out.push(MarketOutcome {
            lambda_bar: num(col("lambda_bar")?)?,
            status: OutcomeStatus::parse(status_text).ok_or_else(|| bad(format!("unknown status {status_text}")))?,
            error: None,
            prices: PriceVector::new(prices),
            revenue: series("revenue")?,
            shares: series("share")?,
            disconnected: num(col("disconnected_frac")?)?,
            category_shares,
        });
    }
    Ok(out)
}

/// Writes `sweep.csv`, one `point_###.json` per point and, where a
/// verification ran, `point_###_scan.csv`.
pub fn write_run(dir: &Path, reports: &[PointReport]) -> Result<(), ScenarioError> {
    fs::create_dir_all(dir)?;
    let outcomes: Vec<MarketOutcome> = reports.iter().map(|r| r.outcome.clone()).collect();
    write_sweep_csv(fs::File::create(dir.join(SWEEP_CSV))?, &outcomes)?;
    for (k, report) in reports.iter().enumerate() {
        let json = serde_json::to_string_pretty(report)?;
        fs::write(dir.join(format!("point_{k:03}.json")), json)?;
        if let Some(v) = report.nash.as_ref().and_then(|n| n.verification.as_ref()) {
            v.write_scans_csv(fs::File::create(dir.join(format!("point_{k:03}_scan.csv")))?)?;
        }
    }
    Ok(())
}

pub fn read_run(dir: &Path) -> Result<Vec<MarketOutcome>, ScenarioError> {
    read_sweep_csv(fs::File::open(dir.join(SWEEP_CSV))?)
}
