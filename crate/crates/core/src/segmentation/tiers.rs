use crate::dynamics::UserGroup;
use crate::error::SegmentationError;

/// Sample quantile with linear interpolation between order statistics
/// (`x[⌊h⌋] + (h − ⌊h⌋)(x[⌊h⌋+1] − x[⌊h⌋])`, `h = (n − 1) p`).
pub fn type7_quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Upper demand thresholds `D_1..D_S` (MB/month) of `plans` tiers cut at
/// equal percentiles of the groups' demand. Since demand is proportional to
/// the normalized session rate, these are the percentiles of `n_j` in MB.
///
/// `D_S` is infinite. Coinciding thresholds, e.g. at zero demand, are
/// nudged upward so the tiers stay strictly ordered; the nudged tiers are
/// empty.
pub fn dataplan_tiers(groups: &[UserGroup], plans: usize) -> Result<Vec<f64>, SegmentationError> {
    if plans == 0 {
        return Err(SegmentationError::NoPlans);
    }
    if groups.is_empty() {
        return Err(SegmentationError::TooFewGroups { needed: 1, got: 0 });
    }
    let mut demand: Vec<f64> = groups.iter().map(|g| g.demand_mb).collect();
    demand.sort_by(f64::total_cmp);
    let mut out = Vec::with_capacity(plans);
    for s in 1..plans {
        let mut t = type7_quantile(&demand, s as f64 / plans as f64);
        if let Some(&prev) = out.last() {
            if t <= prev {
                t = f64::next_up(prev);
            }
        }
        out.push(t);
    }
    out.push(f64::INFINITY);
    Ok(out)
}
