use std::path::Path;
use std::time::Instant;

use wimarket::dynamics::{solve_user_equilibrium, Market};
use wimarket::game::{
    provider_revenue, revenue_gradient, solve_nash, verify_nash, NashConfig, NashStatus, PriceVector, PricingGame,
};
use wimarket::scenario::{Scenario, ScenarioSpec};

fn spec(edit: impl FnOnce(&mut ScenarioSpec)) -> ScenarioSpec {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk_correlated_L9.json");
    let mut spec = ScenarioSpec::load(&path).unwrap();
    edit(&mut spec);
    spec.validate().unwrap();
    spec
}

fn game_at(spec: ScenarioSpec, lambda_bar: f64) -> PricingGame {
    Scenario::new(spec).unwrap().game(lambda_bar).unwrap().0
}

fn monopoly() -> PricingGame {
    game_at(
        spec(|s| {
            s.capacities_mbps = vec![25.0];
            s.level_of_detail = vec![5];
            s.plans = vec![1];
            s.price_caps = vec![100.0];
            s.population = 40000.0;
        }),
        0.8,
    )
}

fn duopoly() -> PricingGame {
    game_at(
        spec(|s| {
            s.capacities_mbps = vec![20.0, 20.0];
            s.level_of_detail = vec![4, 4];
            s.plans = vec![1, 1];
            s.price_caps = vec![100.0, 100.0];
            s.population = 60000.0;
        }),
        1.2,
    )
}

/// Revenue of a single-plan provider on a market, solved directly.
fn direct_revenue(market: &Market, game: &PricingGame, prices: &[f64], provider: usize) -> f64 {
    let schedules: Vec<_> = prices
        .iter()
        .map(|&c| wimarket::dynamics::DataplanSchedule::single(c, 100.0).unwrap())
        .collect();
    let eq = solve_user_equilibrium(market, &schedules, game.logit(), None).unwrap();
    market
        .groups()
        .iter()
        .zip(eq.profile.rows())
        .map(|(g, row)| g.population * row[provider + 1] * prices[provider])
        .sum()
}

#[test]
fn monopoly_matches_grid_search() {
    let start = Instant::now();
    let game = monopoly();
    let result = solve_nash(&game, None, &NashConfig::default()).unwrap();
    assert_eq!(result.status, NashStatus::Global);

    let cell = 100.0 / 499.0;
    let grid: Vec<f64> = (0..500).map(|k| k as f64 * cell).collect();
    let revenue: Vec<f64> = grid.iter().map(|&c| direct_revenue(game.view(0), &game, &[c], 0)).collect();
    let best = (0..500).max_by(|&a, &b| revenue[a].total_cmp(&revenue[b])).unwrap();
    let found = result.prices.get(0, 0);
    assert!((found - grid[best]).abs() <= cell, "solver {found}, grid {}", grid[best]);
    assert!(start.elapsed().as_secs() < 300);
}

#[test]
fn gradient_vanishes_at_the_grid_argmax() {
    let game = monopoly();
    let cell = 100.0 / 499.0;
    let revenue = |c: f64| direct_revenue(game.view(0), &game, &[c], 0);
    let grid: Vec<f64> = (0..500).map(|k| k as f64 * cell).collect();
    let values: Vec<f64> = grid.iter().map(|&c| revenue(c)).collect();
    let k = (1..499).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    // Curvature from the grid itself bounds the slope within one cell.
    let curvature = (values[k + 1] - 2.0 * values[k] + values[k - 1]).abs() / (cell * cell);
    let bound = curvature * cell;
    let grad = revenue_gradient(&game, &PriceVector::new(vec![vec![grid[k]]]), 0.05).unwrap()[0][0];
    assert!(grad.abs() < 2.0 * bound, "gradient {grad}, bound {bound}");
}

#[test]
fn step_halving_is_consistent() {
    let game = duopoly();
    for c in [[3.0, 5.0], [8.0, 6.0], [15.0, 12.0]] {
        let prices = PriceVector::new(vec![vec![c[0]], vec![c[1]]]);
        let coarse = revenue_gradient(&game, &prices, 0.05).unwrap();
        let fine = revenue_gradient(&game, &prices, 0.025).unwrap();
        for i in 0..2 {
            let (a, b) = (coarse[i][0], fine[i][0]);
            assert!((a - b).abs() < 0.05 * a.abs().max(b.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn symmetric_duopoly() {
    let game = duopoly();
    let at = PriceVector::new(vec![vec![6.0], vec![6.0]]);
    let grad = revenue_gradient(&game, &at, 0.05).unwrap();
    assert!((grad[0][0] - grad[1][0]).abs() < 1e-4 * grad[0][0].abs().max(1.0));

    let result = solve_nash(&game, None, &NashConfig::default()).unwrap();
    assert_eq!(result.status, NashStatus::Global);
    let (c1, c2) = (result.prices.get(0, 0), result.prices.get(1, 0));
    assert!((c1 - c2).abs() < 1e-3, "{c1} vs {c2}");
}

#[test]
fn verification_flags_a_perturbed_equilibrium() {
    let game = duopoly();
    let result = solve_nash(&game, None, &NashConfig::default()).unwrap();
    assert_eq!(result.status, NashStatus::Global);

    // Finer grids and a looser tolerance still accept it.
    let fine = verify_nash(&game, &result.prices, 400, 0.01).unwrap();
    assert!(fine.global);

    let pushed = result.prices.with(0, 0, result.prices.get(0, 0) * 1.2);
    let report = verify_nash(&game, &pushed, 200, 0.005).unwrap();
    assert!(!report.global);
    assert!(report.max_gain[0] > 0.005);
}

#[test]
fn tiered_revenue_is_a_sum_over_tiers() {
    let game = game_at(
        spec(|s| {
            s.profile.std_dev[2] = 0.2;
            s.plans = vec![3, 3, 3, 3];
        }),
        0.8,
    );
    let c = PriceVector::new(vec![vec![4.0, 6.0, 9.0], vec![5.0, 5.0, 5.0], vec![3.0, 7.0, 8.0], vec![6.0, 6.0, 2.0]]);
    for i in 0..4 {
        let out = game.estimate(i, &c).unwrap();
        let t = &game.thresholds()[i];
        let mut oracle = 0.0;
        for (g, row) in game.view(i).groups().iter().zip(out.profile.rows()) {
            let mut s = 0;
            while g.demand_mb > t[s] {
                s += 1;
            }
            oracle += g.population * row[i + 1] * c.get(i, s);
        }
        assert!((out.revenue - oracle).abs() < 1e-9 * oracle.max(1.0));
        assert_eq!(provider_revenue(&game, i, &c).unwrap(), out.revenue);
    }
}

#[test]
fn zero_prices_earn_nothing() {
    let game = duopoly();
    let zero = PriceVector::new(vec![vec![0.0], vec![0.0]]);
    for i in 0..2 {
        assert_eq!(provider_revenue(&game, i, &zero).unwrap(), 0.0);
    }
    assert_eq!(game.realize(&zero).unwrap().revenue, vec![0.0, 0.0]);
}

#[test]
fn full_detail_views_match_the_truth() {
    let scenario = Scenario::new(spec(|s| {
        s.level_of_detail = vec![20; 4];
    }))
    .unwrap();
    let (game, views, _) = scenario.game(1.0).unwrap();
    let c = PriceVector::new(vec![vec![12.0], vec![10.0], vec![9.0], vec![8.0]]);
    let truth = game.realize(&c).unwrap();
    for i in 0..4 {
        let est = game.estimate(i, &c).unwrap();
        // Clusters come back in canonical order, so compare through the mapping.
        let rows = est.profile.rows().collect::<Vec<_>>();
        for (j, row) in truth.profile.rows().enumerate() {
            let cluster = rows[views[i].mapping[j]];
            for (a, b) in row.iter().zip(cluster) {
                assert!((a - b).abs() < 1e-7, "group {j}: {a} vs {b}");
            }
        }
        assert!((est.revenue - truth.revenue[i]).abs() < 1e-6 * truth.revenue[i]);
    }
}

#[test]
fn revenue_is_unimodal_in_own_price() {
    let game = game_at(spec(|_| {}), 0.7);
    let c = PriceVector::new(vec![vec![7.0]; 4]);
    let values: Vec<f64> = (0..200)
        .map(|k| provider_revenue(&game, 0, &c.with(0, 0, 100.0 * k as f64 / 199.0)).unwrap())
        .collect();
    let top = values.iter().cloned().fold(f64::MIN, f64::max);
    for k in 1..199 {
        let local_max = values[k] >= values[k - 1] && values[k] >= values[k + 1];
        if local_max {
            assert!(values[k] >= top * (1.0 - 0.005), "interior local maximum at grid point {k}");
        }
    }
}

#[test]
fn solving_twice_gives_identical_prices() {
    let game = duopoly();
    let a = solve_nash(&game, None, &NashConfig::default()).unwrap();
    let b = solve_nash(&game, None, &NashConfig::default()).unwrap();
    assert_eq!(a.prices, b.prices);
    assert_eq!(a.realized.revenue, b.realized.revenue);
}
