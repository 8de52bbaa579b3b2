use super::profile::StrategyProfile;

/// Logit choice probabilities `exp(u_i / ε) / Σ_k exp(u_k / ε)`.
///
/// This is `1 / (1 + Σ_{k≠i} exp((u_k − u_i) / ε))` evaluated with the
/// maximum utility subtracted first, so it never overflows.
pub fn softmax_into(utilities: &[f64], noise: f64, out: &mut [f64]) {
    let max = utilities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, &u) in out.iter_mut().zip(utilities) {
        *o = ((u - max) / noise).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

pub fn softmax_row(utilities: &[f64], noise: f64) -> Vec<f64> {
    let mut out = vec![0.0; utilities.len()];
    softmax_into(utilities, noise, &mut out);
    out
}

/// Right-hand side of the Logit dynamics,
/// `dz_ji/dt = r softmax_i(u_j / ε) − r z_ji`.
///
/// `utilities` is laid out like the profile, one row per group.
pub fn logit_rhs(z: &StrategyProfile, utilities: &[f64], noise: f64, speed: f64) -> Vec<f64> {
    let s = z.strategies();
    let mut out = vec![0.0; z.as_slice().len()];
    for ((row_out, row_u), row_z) in out.chunks_mut(s).zip(utilities.chunks(s)).zip(z.rows()) {
        softmax_into(row_u, noise, row_out);
        for (o, &zz) in row_out.iter_mut().zip(row_z) {
            *o = speed * (*o - zz);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of `1 / (1 + Σ_{k≠i} exp((u_k − u_i)/ε))`.
    fn direct(u: &[f64], noise: f64) -> Vec<f64> {
        (0..u.len())
            .map(|i| {
                let s: f64 = (0..u.len())
                    .filter(|&k| k != i)
                    .map(|k| ((u[k] - u[i]) / noise).exp())
                    .sum();
                1.0 / (1.0 + s)
            })
            .collect()
    }

    #[test]
    fn equal_utilities_are_a_fixed_point() {
        let z = StrategyProfile::uniform(2, 3);
        let rhs = logit_rhs(&z, &[4.0; 8], 1.5, 2.0);
        assert!(rhs.iter().all(|&x| x.abs() < 1e-16));
    }

    #[test]
    fn large_noise_is_uniform() {
        let z = StrategyProfile::from_rows(vec![vec![0.7, 0.2, 0.1]]).unwrap();
        let rhs = logit_rhs(&z, &[0.0, 25.0, -40.0], 1e9, 3.0);
        for (d, zz) in rhs.iter().zip(z.row(0)) {
            assert!((d - 3.0 * (1.0 / 3.0 - zz)).abs() < 1e-6);
        }
    }

    #[test]
    fn matches_direct_formula() {
        let u = [0.0, 3.2, -1.7, 2.9, 0.4];
        let stable = softmax_row(&u, 1.5);
        for (a, b) in stable.iter().zip(direct(&u, 1.5)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn no_overflow_for_huge_utilities() {
        let p = softmax_row(&[0.0, 5000.0, 4999.0], 0.5);
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
