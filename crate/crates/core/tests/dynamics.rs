mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wimarket::dynamics::{
    fixed_point_residual, market_share, softmax_row, solve_user_equilibrium, LogitConfig, Market, StrategyProfile,
};
use wimarket::DynamicsError;

#[test]
fn random_equilibria_are_fixed_points() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let config = LogitConfig::default();
    let mut solved = 0;
    for _ in 0..60 {
        let providers = rng.random_range(2..=4);
        let groups = rng.random_range(5..=20);
        let market = common::random_market(&mut rng, providers, groups);
        let schedules = common::random_schedules(&mut rng, providers);
        let eq = solve_user_equilibrium(&market, &schedules, &config, None).unwrap();
        eq.profile.validate(1e-9).unwrap();
        // Recomputed from scratch rather than trusting the reported value.
        let residual = fixed_point_residual(&market, &schedules, &eq.profile, config.noise).unwrap();
        assert!(residual < 1e-7, "residual {residual}");
        assert!(eq.residual < 10.0 * config.tolerance);
        solved += 1;
    }
    assert!(solved >= 50);
    assert!(start.elapsed().as_secs() < 120);
}

/// `z ← (1 − α) z + α softmax(u(z)/ε)` from the uniform profile.
fn damped_iteration(market: &Market, schedules: &[wimarket::dynamics::DataplanSchedule], noise: f64) -> StrategyProfile {
    let groups = market.groups().len();
    let s = market.providers() + 1;
    let mut z: Vec<Vec<f64>> = vec![vec![1.0 / s as f64; s]; groups];
    for _ in 0..20_000 {
        let profile = StrategyProfile::from_rows(z.clone()).unwrap();
        let u = market.utilities(&profile, schedules).unwrap();
        let mut change = 0.0f64;
        for j in 0..groups {
            let target = softmax_row(&u[j * s..(j + 1) * s], noise);
            for k in 0..s {
                let next = 0.9 * z[j][k] + 0.1 * target[k];
                change = change.max((next - z[j][k]).abs());
                z[j][k] = next;
            }
        }
        if change < 1e-13 {
            break;
        }
    }
    StrategyProfile::from_rows(z).unwrap()
}

#[test]
fn damped_iteration_reaches_the_same_equilibrium() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let market = common::random_market(&mut rng, 2, 5);
    let schedules = common::single_schedules(&[6.0, 4.0]);
    let config = LogitConfig::default();
    let eq = solve_user_equilibrium(&market, &schedules, &config, None).unwrap();
    let oracle = damped_iteration(&market, &schedules, config.noise);
    assert!(eq.profile.max_abs_diff(&oracle) < 1e-5);
}

#[test]
fn speed_does_not_move_the_equilibrium() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let market = common::random_market(&mut rng, 3, 8);
        let schedules = common::random_schedules(&mut rng, 3);
        let slow = LogitConfig::default();
        let fast = LogitConfig { speed: 5.0, ..slow };
        let a = solve_user_equilibrium(&market, &schedules, &slow, None).unwrap();
        let b = solve_user_equilibrium(&market, &schedules, &fast, None).unwrap();
        assert!(a.profile.max_abs_diff(&b.profile) < 1e-6);
    }
}

#[test]
fn raising_a_price_never_raises_the_share() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let config = LogitConfig::default();
    for _ in 0..25 {
        let providers = rng.random_range(1..=3);
        let groups = rng.random_range(3..10);
        let market = common::random_market(&mut rng, providers, groups);
        let mut prices: Vec<f64> = (0..providers).map(|_| rng.random_range(0.0..20.0)).collect();
        let low = solve_user_equilibrium(&market, &common::single_schedules(&prices), &config, None).unwrap();
        let target = rng.random_range(0..providers);
        prices[target] += rng.random_range(0.5..10.0);
        let high = solve_user_equilibrium(&market, &common::single_schedules(&prices), &config, None).unwrap();
        let before = market_share(&low.profile, market.groups())[target + 1];
        let after = market_share(&high.profile, market.groups())[target + 1];
        assert!(after <= before + 1e-9, "{before} -> {after}");
    }
}

#[test]
fn symmetric_providers_split_evenly() {
    let nets = vec![common::ring_network(3, 20.0, 5.0); 3];
    let groups = (0..4).map(|j| common::group(j, 250.0, 20.0 + 5.0 * j as f64, 0.3, 3.0)).collect();
    let market = Market::new(&nets, groups).unwrap();
    let schedules = common::single_schedules(&[5.0, 5.0, 5.0]);
    let eq = solve_user_equilibrium(&market, &schedules, &LogitConfig::default(), None).unwrap();
    for row in eq.profile.rows() {
        assert!((row[1] - row[2]).abs() < 1e-6 && (row[2] - row[3]).abs() < 1e-6);
    }
}

#[test]
fn short_horizon_reports_the_last_iterate() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let market = common::random_market(&mut rng, 2, 5);
    let schedules = common::random_schedules(&mut rng, 2);
    let config = LogitConfig {
        max_time: 0.01,
        ..LogitConfig::default()
    };
    match solve_user_equilibrium(&market, &schedules, &config, None) {
        Err(DynamicsError::NotConverged { residual, last, .. }) => {
            assert!(residual > config.tolerance);
            last.validate(1e-9).unwrap();
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn starting_point_does_not_matter_for_a_unique_equilibrium() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let market = common::random_market(&mut rng, 2, 6);
    let schedules = common::random_schedules(&mut rng, 2);
    let config = LogitConfig::default();
    let from_uniform = solve_user_equilibrium(&market, &schedules, &config, None).unwrap();
    let corner = StrategyProfile::from_rows(vec![vec![0.0, 0.0, 1.0]; 6]).unwrap();
    let from_corner = solve_user_equilibrium(&market, &schedules, &config, Some(&corner)).unwrap();
    assert!(from_uniform.profile.max_abs_diff(&from_corner.profile) < 1e-6);
}
