//! Population-weighted K-means with k-means++ seeding.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Weighted within-cluster sum of squares.
    pub wcss: f64,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = dist2(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Weighted within-cluster sum of squares of an arbitrary assignment, with
/// centroids at the weighted cluster means.
pub fn wcss_of(points: &[Vec<f64>], weights: &[f64], assignment: &[usize], k: usize) -> f64 {
    let centroids = centroids_of(points, weights, assignment, k);
    points
        .iter()
        .zip(weights)
        .zip(assignment)
        .map(|((p, w), &a)| w * dist2(p, &centroids[a]))
        .sum()
}

fn centroids_of(points: &[Vec<f64>], weights: &[f64], assignment: &[usize], k: usize) -> Vec<Vec<f64>> {
    let dim = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut mass = vec![0.0; k];
    let mut count = vec![0usize; k];
    for ((p, &w), &a) in points.iter().zip(weights).zip(assignment) {
        mass[a] += w;
        count[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(p) {
            *s += w * x;
        }
    }
    // Zero-weight clusters fall back to unweighted means.
    for c in 0..k {
        if mass[c] <= 0.0 && count[c] > 0 {
            sums[c].iter_mut().for_each(|s| *s = 0.0);
            for (p, &a) in points.iter().zip(assignment) {
                if a == c {
                    for (s, x) in sums[c].iter_mut().zip(p) {
                        *s += x;
                    }
                }
            }
            mass[c] = count[c] as f64;
        }
    }
    let mut centroids: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(mass)
        .map(|(s, m)| if m > 0.0 { s.into_iter().map(|x| x / m).collect() } else { s })
        .collect();
    // Singletons sit exactly on their point.
    for (p, &a) in points.iter().zip(assignment) {
        if count[a] == 1 {
            centroids[a].clone_from(p);
        }
    }
    centroids
}

fn sample_index(rng: &mut ChaCha8Rng, scores: &[f64]) -> Option<usize> {
    let total: f64 = scores.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &s) in scores.iter().enumerate() {
        if s > 0.0 {
            acc += s;
            last = Some(i);
            if target < acc {
                return Some(i);
            }
        }
    }
    last
}

fn seed_centroids(points: &[Vec<f64>], weights: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = sample_index(rng, weights).unwrap_or(0);
    chosen[first] = true;
    let mut centroids = vec![points[first].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &points[first])).collect();
    while centroids.len() < k {
        let scores: Vec<f64> = d2
            .iter()
            .zip(weights)
            .zip(&chosen)
            .map(|((d, w), &c)| if c { 0.0 } else { d * w.max(0.0) })
            .collect();
        let next = sample_index(rng, &scores)
            .or_else(|| chosen.iter().position(|&c| !c))
            .expect("k never exceeds the number of points");
        chosen[next] = true;
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &points[next]));
        }
        centroids.push(points[next].clone());
    }
    centroids
}

fn lloyd(points: &[Vec<f64>], weights: &[f64], mut centroids: Vec<Vec<f64>>, max_iter: usize) -> KMeansFit {
    let k = centroids.len();
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
    for _ in 0..max_iter {
        // Refill empty clusters with the worst-served point of a cluster that
        // can spare one.
        loop {
            let mut sizes = vec![0usize; k];
            assignment.iter().for_each(|&a| sizes[a] += 1);
            let Some(empty) = sizes.iter().position(|&s| s == 0) else {
                break;
            };
            let donor = points
                .iter()
                .enumerate()
                .filter(|(i, _)| sizes[assignment[*i]] > 1)
                .map(|(i, p)| (i, weights[i].max(1e-300) * dist2(p, &centroids[assignment[i]])))
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
                .expect("k never exceeds the number of points");
            assignment[donor] = empty;
            centroids[empty] = points[donor].clone();
        }
        centroids = centroids_of(points, weights, &assignment, k);
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
        if next == assignment {
            break;
        }
        assignment = next;
    }
    let wcss = points
        .iter()
        .zip(weights)
        .zip(&assignment)
        .map(|((p, w), &a)| w * dist2(p, &centroids[a]))
        .sum();
    KMeansFit {
        assignment,
        centroids,
        wcss,
    }
}

/// Best of `restarts` k-means++ seeded Lloyd runs, deterministic in `seed`.
pub fn weighted_kmeans(
    points: &[Vec<f64>],
    weights: &[f64],
    k: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> KMeansFit {
    assert!(k >= 1 && k <= points.len(), "k must be in 1..=points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansFit> = None;
    for _ in 0..restarts.max(1) {
        let init = seed_centroids(points, weights, k, &mut rng);
        let fit = lloyd(points, weights, init, max_iter);
        if best.as_ref().is_none_or(|b| fit.wcss < b.wcss) {
            best = Some(fit);
        }
    }
    best.unwrap()
}
