use proptest::prelude::*;

use wimarket::dynamics::UserGroup;
use wimarket::segmentation::{categorize_groups, category_counts, cluster_population};

fn population(min: usize, max: usize) -> impl Strategy<Value = Vec<UserGroup>> {
    prop::collection::vec((1.0f64..1e4, 5.0f64..60.0, 0.05f64..1.5, 0.3f64..1.7), min..=max).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(id, (population, willingness, rate_sensitivity, normalized_rate))| UserGroup {
                id,
                population,
                willingness,
                saturation: 1.0,
                rate_sensitivity,
                variance_weight: 0.0,
                price_weight: 1.0,
                session_rate: normalized_rate * population / 60.0,
                demand_mb: normalized_rate * 7200.0,
                normalized_rate,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn clustering_conserves_population(groups in population(2, 25), level in 1usize..25, seed in 0u64..1000) {
        let level = level.min(groups.len());
        let view = cluster_population(&groups, level, seed).unwrap();
        let total: f64 = groups.iter().map(|g| g.population).sum();
        let clustered: f64 = view.clusters.iter().map(|c| c.population).sum();
        prop_assert!((total - clustered).abs() <= 1e-9 * total);
        prop_assert_eq!(view.clusters.len(), level);
        prop_assert_eq!(view.mapping.len(), groups.len());
        for c in 0..level {
            let members = view.members(c);
            prop_assert!(!members.is_empty());
            let mass: f64 = members.iter().map(|&j| groups[j].population).sum();
            prop_assert!((mass - view.clusters[c].population).abs() <= 1e-9 * mass);
        }
    }

    #[test]
    fn objective_falls_with_detail(groups in population(20, 24), seed in 0u64..1000) {
        let mut last = f64::INFINITY;
        for level in [1, 5, 9, 20] {
            let w = cluster_population(&groups, level, seed).unwrap().wcss;
            prop_assert!(w <= last * (1.0 + 1e-12) + 1e-12, "L = {}: {} after {}", level, w, last);
            last = w;
        }
    }

    #[test]
    fn clustering_ignores_group_order(groups in population(2, 20), level in 1usize..8, rot in 1usize..20) {
        let level = level.min(groups.len());
        let a = cluster_population(&groups, level, 3).unwrap();
        let mut shuffled = groups.clone();
        shuffled.rotate_left(rot % groups.len());
        shuffled.reverse();
        let b = cluster_population(&shuffled, level, 3).unwrap();
        prop_assert_eq!(a.wcss, b.wcss);
        let key = |v: &wimarket::segmentation::ProviderView| {
            let mut k: Vec<(u64, u64)> = v
                .clusters
                .iter()
                .map(|c| (c.willingness.to_bits(), c.population.to_bits()))
                .collect();
            k.sort();
            k
        };
        prop_assert_eq!(key(&a), key(&b));
    }

    #[test]
    fn every_group_gets_one_category(groups in population(2, 40)) {
        let cats = categorize_groups(&groups).unwrap();
        prop_assert_eq!(cats.len(), groups.len());
        prop_assert_eq!(category_counts(&cats).iter().sum::<usize>(), groups.len());
    }
}
