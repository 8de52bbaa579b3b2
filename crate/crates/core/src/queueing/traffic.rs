use serde::{Deserialize, Serialize};

use crate::error::QueueError;
use crate::linalg;

const LEAK_TOL: f64 = 1e-12;

/// Per-group traffic at every station of one provider, for `z_ji = 1`.
/// Indexed `[group][station]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficSolution {
    /// New-session rates `a`.
    pub arrivals: Vec<Vec<f64>>,
    /// Total arrival rates `γ`, new sessions plus handovers.
    pub gamma: Vec<Vec<f64>>,
    /// Traffic intensities `ρ = γ / d`.
    pub rho: Vec<Vec<f64>>,
}

/// Aggregate intensity per station for a given share of each group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalLoad {
    pub rho: Vec<f64>,
    /// Some station has total intensity at or above 1.
    pub saturated: bool,
}

/// Every station must be able to reach one from which sessions can leave the
/// network; otherwise the spectral radius of `routing` is 1.
fn has_exit_everywhere(routing: &[Vec<f64>]) -> bool {
    let k = routing.len();
    let mut drains: Vec<bool> = routing
        .iter()
        .map(|row| 1.0 - row.iter().sum::<f64>() > LEAK_TOL)
        .collect();
    // Backward propagation: m drains if it routes into a draining station.
    loop {
        let mut changed = false;
        for m in 0..k {
            if !drains[m] && (0..k).any(|n| routing[m][n] > 0.0 && drains[n]) {
                drains[m] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    drains.into_iter().all(|d| d)
}

/// Solves `γ_k = a_k + Σ_m γ_m p[m][k]` for the total session arrival rates.
///
/// `routing` holds the unconditional handover probabilities; row `m` sums to
/// `v_m / d_m < 1`, the remainder being service completions.
pub fn solve_traffic_equations(arrivals: &[f64], routing: &[Vec<f64>]) -> Result<Vec<f64>, QueueError> {
    let k = arrivals.len();
    if routing.len() != k || routing.iter().any(|r| r.len() != k) {
        return Err(QueueError::Dimension(format!("routing matrix is not {k} x {k}")));
    }
    if routing.iter().flatten().any(|&p| !(p >= 0.0)) {
        return Err(QueueError::InvalidParameter("negative handover probability".into()));
    }
    if routing.iter().any(|row| row.iter().sum::<f64>() > 1.0 + LEAK_TOL) || !has_exit_everywhere(routing) {
        return Err(QueueError::Unstable);
    }
    if arrivals.iter().all(|&a| a == 0.0) {
        return Ok(vec![0.0; k]);
    }

    // (I - Pᵀ) γ = a
    let mut m = vec![0.0; k * k];
    for r in 0..k {
        for c in 0..k {
            m[r * k + c] = if r == c { 1.0 } else { 0.0 } - routing[c][r];
        }
    }
    let gamma = linalg::solve(&m, arrivals).ok_or(QueueError::Unstable)?;
    Ok(gamma.into_iter().zip(arrivals).map(|(g, &a)| g.max(a)).collect())
}

pub fn traffic_intensities(gamma: &[f64], departure: &[f64]) -> Result<Vec<f64>, QueueError> {
    if gamma.len() != departure.len() {
        return Err(QueueError::Dimension("gamma and departure lengths differ".into()));
    }
    gamma
        .iter()
        .zip(departure)
        .map(|(&g, &d)| {
            if d > 0.0 {
                Ok(g / d)
            } else {
                Err(QueueError::InvalidParameter(format!("departure rate {d} is not positive")))
            }
        })
        .collect()
}

/// `ρ_k = Σ_j share_j ρ_jk`, flagging saturation instead of failing.
pub fn total_load(rho: &[Vec<f64>], share: &[f64]) -> TotalLoad {
    let k = rho.first().map_or(0, Vec::len);
    let mut total = vec![0.0; k];
    for (row, &s) in rho.iter().zip(share) {
        for (t, r) in total.iter_mut().zip(row) {
            *t += s * r;
        }
    }
    let saturated = total.iter().any(|&r| r >= 1.0);
    TotalLoad { rho: total, saturated }
}
