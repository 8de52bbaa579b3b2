use serde::{Deserialize, Serialize};

use crate::error::QueueError;
use crate::linalg;

const STOCHASTIC_TOL: f64 = 1e-12;

/// User mobility inside one provider's network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilityModel {
    /// Conditional handover targets `p*[m][k]`: given a handover out of `m`,
    /// the probability it lands in `k`.
    pub routing: Vec<Vec<f64>>,
    /// Shared location distribution over stations.
    pub omega: Vec<f64>,
    /// Optional per-group location distributions overriding `omega`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_omega: Option<Vec<Vec<f64>>>,
    /// km/h.
    pub mean_speed: f64,
}

impl MobilityModel {
    pub fn omega_for(&self, group: usize) -> &[f64] {
        match &self.group_omega {
            Some(rows) => &rows[group],
            None => &self.omega,
        }
    }

    pub(crate) fn validate(&self) -> Result<(), QueueError> {
        let k = self.omega.len();
        check_routing(&self.routing, k)?;
        check_distribution(&self.omega)?;
        if let Some(rows) = &self.group_omega {
            for row in rows {
                if row.len() != k {
                    return Err(QueueError::Dimension(format!(
                        "group location vector has {} entries for {k} stations",
                        row.len()
                    )));
                }
                check_distribution(row)?;
            }
        }
        Ok(())
    }
}

fn check_distribution(p: &[f64]) -> Result<(), QueueError> {
    let sum: f64 = p.iter().sum();
    if p.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(QueueError::InvalidParameter(format!(
            "location distribution must be non-negative and sum to 1 (sum {sum})"
        )));
    }
    Ok(())
}

/// Checks that `routing` is a `k x k` row-stochastic matrix with zero diagonal.
/// A single isolated station may have an all-zero row.
fn check_routing(routing: &[Vec<f64>], k: usize) -> Result<(), QueueError> {
    if routing.len() != k || routing.iter().any(|r| r.len() != k) {
        return Err(QueueError::Dimension(format!("routing matrix is not {k} x {k}")));
    }
    for (m, row) in routing.iter().enumerate() {
        if row[m] != 0.0 {
            return Err(QueueError::SelfHandover(m));
        }
        if row.iter().any(|&p| !(p >= 0.0)) {
            return Err(QueueError::InvalidParameter(format!("negative routing entry in row {m}")));
        }
        let sum: f64 = row.iter().sum();
        let isolated = k == 1 && sum == 0.0;
        if !isolated && (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(QueueError::NotStochastic { row: m, sum });
        }
    }
    Ok(())
}

/// Uniform handover routing over each station's neighbours.
pub fn uniform_neighbor_routing(neighbors: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let k = neighbors.len();
    neighbors
        .iter()
        .map(|adj| {
            let mut row = vec![0.0; k];
            let share = 1.0 / adj.len().max(1) as f64;
            for &n in adj {
                row[n] = share;
            }
            row
        })
        .collect()
}

fn strongly_connected(routing: &[Vec<f64>]) -> bool {
    let k = routing.len();
    let reach = |forward: bool| {
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..k {
                let w = if forward { routing[u][v] } else { routing[v][u] };
                if w > 0.0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Time-stationary location distribution of a user moving between stations.
///
/// The embedded jump chain has transition matrix `routing`; the time spent
/// in station `k` per visit has mean `1 / departure[k]`. The result is the
/// jump chain's stationary vector weighted by mean sojourn time and
/// renormalized.
pub fn mobility_stationary(routing: &[Vec<f64>], departure: &[f64]) -> Result<Vec<f64>, QueueError> {
    let k = routing.len();
    if k == 0 {
        return Err(QueueError::Dimension("empty network".into()));
    }
    if departure.len() != k {
        return Err(QueueError::Dimension(format!(
            "{} departure rates for {k} stations",
            departure.len()
        )));
    }
    if departure.iter().any(|&d| !(d > 0.0)) {
        return Err(QueueError::InvalidParameter("departure rates must be positive".into()));
    }
    check_routing(routing, k)?;
    if k == 1 {
        return Ok(vec![1.0]);
    }
    if !strongly_connected(routing) {
        return Err(QueueError::Reducible);
    }

    // pi (P - I) = 0 with the last balance equation replaced by sum(pi) = 1.
    // Unknowns are pi; row r of the system is column r of (P - I)^T.
    let mut a = vec![0.0; k * k];
    for r in 0..k - 1 {
        for c in 0..k {
            a[r * k + c] = routing[c][r] - if r == c { 1.0 } else { 0.0 };
        }
    }
    for c in 0..k {
        a[(k - 1) * k + c] = 1.0;
    }
    let mut b = vec![0.0; k];
    b[k - 1] = 1.0;
    let pi = linalg::solve(&a, &b).ok_or(QueueError::Reducible)?;

    let mut omega: Vec<f64> = pi.iter().zip(departure).map(|(p, d)| p.max(0.0) / d).collect();
    let total: f64 = omega.iter().sum();
    omega.iter_mut().for_each(|w| *w /= total);
    Ok(omega)
}
