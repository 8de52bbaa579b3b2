use serde::{Deserialize, Serialize};

use super::tiers::type7_quantile;
use crate::dynamics::UserGroup;
use crate::error::SegmentationError;

/// Quadrants of the (willingness-to-pay, rate tolerance) plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserCategory {
    /// High willingness to pay, low tolerance to poor rates.
    Business,
    /// Low willingness to pay, high tolerance.
    LowProfile,
    /// Low willingness to pay, low tolerance.
    ValueForMoney,
    /// High willingness to pay, high tolerance.
    Lenient,
}

impl UserCategory {
    pub const ALL: [UserCategory; 4] = [Self::Business, Self::LowProfile, Self::ValueForMoney, Self::Lenient];

    pub fn name(self) -> &'static str {
        match self {
            Self::Business => "business",
            Self::LowProfile => "low_profile",
            Self::ValueForMoney => "value_for_money",
            Self::Lenient => "lenient",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Splits groups at the medians of `w_R` and `h`. A value equal to the
/// median counts as below it.
pub fn categorize_groups(groups: &[UserGroup]) -> Result<Vec<UserCategory>, SegmentationError> {
    if groups.len() < 2 {
        return Err(SegmentationError::TooFewGroups {
            needed: 2,
            got: groups.len(),
        });
    }
    let median = |f: fn(&UserGroup) -> f64| {
        let mut v: Vec<f64> = groups.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        type7_quantile(&v, 0.5)
    };
    let w_med = median(|g| g.willingness);
    let h_med = median(|g| g.rate_sensitivity);
    let ties = groups
        .iter()
        .filter(|g| g.willingness == w_med || g.rate_sensitivity == h_med)
        .count();
    if ties > 0 {
        log::debug!("{ties} groups sit on a category median and were assigned below it");
    }
    Ok(groups
        .iter()
        .map(|g| match (g.willingness > w_med, g.rate_sensitivity > h_med) {
            (true, false) => UserCategory::Business,
            (false, true) => UserCategory::LowProfile,
            (false, false) => UserCategory::ValueForMoney,
            (true, true) => UserCategory::Lenient,
        })
        .collect())
}

pub fn category_counts(categories: &[UserCategory]) -> [usize; 4] {
    let mut counts = [0; 4];
    for c in categories {
        counts[c.index()] += 1;
    }
    counts
}
