use crate::error::QueueError;

const MAX_STATES: usize = 20_000_000;

/// Joint distribution of the number of sessions per station on the box
/// `[0, truncation]^K`, stored in mixed-radix order (station 0 fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductForm {
    stations: usize,
    truncation: usize,
    probs: Vec<f64>,
}

impl ProductForm {
    pub fn stations(&self) -> usize {
        self.stations
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn index(&self, state: &[usize]) -> usize {
        let radix = self.truncation + 1;
        state.iter().rev().fold(0, |acc, &n| acc * radix + n)
    }

    pub fn state(&self, mut index: usize) -> Vec<usize> {
        let radix = self.truncation + 1;
        (0..self.stations)
            .map(|_| {
                let n = index % radix;
                index /= radix;
                n
            })
            .collect()
    }

    pub fn prob(&self, state: &[usize]) -> f64 {
        self.probs[self.index(state)]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probabilities_mut(&mut self) -> &mut [f64] {
        &mut self.probs
    }
}

/// `Q(n) = Π_k (1 − ρ_k) ρ_k^{n_k}`, renormalized over the truncated box.
pub fn stationary_distribution(rho: &[f64], truncation: usize) -> Result<ProductForm, QueueError> {
    if let Some((station, &r)) = rho.iter().enumerate().find(|(_, &r)| !(0.0..1.0).contains(&r)) {
        return Err(QueueError::UnstableQueue { station, rho: r });
    }
    let k = rho.len();
    let radix = truncation + 1;
    let states = (0..k).try_fold(1usize, |acc, _| acc.checked_mul(radix));
    let states = match states {
        Some(s) if s <= MAX_STATES => s,
        _ => return Err(QueueError::StateSpaceTooLarge(states.unwrap_or(usize::MAX))),
    };

    // Per-station truncated geometric marginals.
    let marginals: Vec<Vec<f64>> = rho
        .iter()
        .map(|&r| {
            let mut m = Vec::with_capacity(radix);
            let mut p = 1.0 - r;
            for _ in 0..radix {
                m.push(p);
                p *= r;
            }
            let total: f64 = m.iter().sum();
            m.iter_mut().for_each(|x| *x /= total);
            m
        })
        .collect();

    let mut out = ProductForm {
        stations: k,
        truncation,
        probs: vec![0.0; states],
    };
    for idx in 0..states {
        let state = out.state(idx);
        out.probs[idx] = state.iter().zip(&marginals).map(|(&n, m)| m[n]).product();
    }
    Ok(out)
}

/// Largest absolute residual of the local-balance equations over the
/// interior of the truncated state space.
///
/// Per station `k` (for `n_k ≥ 1`):
/// `d_k Q(n) = a_k Q(n − e_k) + Σ_m v_m p*[m][k] Q(n − e_k + e_m)`.
/// Per state: `Σ_k a_k Q(n) = Σ_k μ_k Q(n + e_k)`.
/// A state takes part in an equation only when every state it references
/// lies inside the box.
pub fn check_local_balance(
    q: &ProductForm,
    arrivals: &[f64],
    handover: &[f64],
    service: &[f64],
    routing: &[Vec<f64>],
) -> f64 {
    let k = q.stations();
    let cap = q.truncation();
    let departure: Vec<f64> = handover.iter().zip(service).map(|(v, m)| v + m).collect();
    let total_arrivals: f64 = arrivals.iter().sum();
    let mut worst = 0.0f64;

    let mut scratch = vec![0usize; k];
    for idx in 0..q.len() {
        let state = q.state(idx);
        let qn = q.probabilities()[idx];

        for st in 0..k {
            if state[st] == 0 {
                continue;
            }
            let interior = (0..k).all(|m| m == st || routing[m][st] == 0.0 || state[m] < cap);
            if !interior {
                continue;
            }
            scratch.copy_from_slice(&state);
            scratch[st] -= 1;
            let mut rhs = arrivals[st] * q.prob(&scratch);
            for m in 0..k {
                if m == st || routing[m][st] == 0.0 {
                    continue;
                }
                scratch[m] += 1;
                rhs += handover[m] * routing[m][st] * q.prob(&scratch);
                scratch[m] -= 1;
            }
            worst = worst.max((departure[st] * qn - rhs).abs());
        }

        if state.iter().all(|&n| n < cap) {
            let mut rhs = 0.0;
            for st in 0..k {
                scratch.copy_from_slice(&state);
                scratch[st] += 1;
                rhs += service[st] * q.prob(&scratch);
            }
            worst = worst.max((total_arrivals * qn - rhs).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_single_station() {
        let q = stationary_distribution(&[0.5], 60).unwrap();
        assert!((q.prob(&[0]) - 0.5).abs() < 1e-15);
        assert!((q.prob(&[3]) - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn empty_network_concentrates_at_zero() {
        let q = stationary_distribution(&[0.0, 0.0], 5).unwrap();
        assert_eq!(q.prob(&[0, 0]), 1.0);
        assert_eq!(q.probabilities().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn unstable_queue_is_rejected() {
        assert!(matches!(
            stationary_distribution(&[0.3, 1.0], 5),
            Err(QueueError::UnstableQueue { station: 1, .. })
        ));
    }

    #[test]
    fn indexing_round_trips() {
        let q = stationary_distribution(&[0.1, 0.2, 0.3], 4).unwrap();
        for idx in [0, 7, 42, q.len() - 1] {
            assert_eq!(q.index(&q.state(idx)), idx);
        }
    }

    #[test]
    fn zero_load_has_zero_residual() {
        let q = stationary_distribution(&[0.0, 0.0], 10).unwrap();
        let routing = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let r = check_local_balance(&q, &[0.0, 0.0], &[0.5, 0.5], &[10.0, 10.0], &routing);
        assert_eq!(r, 0.0);
    }
}
