//! Choosing the number of upper order statistics `k`.
//!
//! The raw choice minimizes the Kolmogorov-Smirnov distance between the
//! empirical tail and a Pareto fit with Hill index. The raw choice is then
//! clamped into `[base, base + span]`, by default `[80, 120]`.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::tail::{hill_log_mean_sorted, positive_descending, OrderedTail};

/// Clamp applied to the raw minimum-distance choice:
/// `base + min(span, (k_star - base)+)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KCap {
    pub base: usize,
    pub span: usize,
}

impl Default for KCap {
    fn default() -> Self {
        Self { base: 80, span: 40 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    pub k_min: usize,
    /// `None` means `floor(n / 2)`.
    pub k_max: Option<usize>,
    /// `None` disables the cap and uses the raw minimum-distance choice.
    pub cap: Option<KCap>,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            k_min: 10,
            k_max: None,
            cap: Some(KCap::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSelection {
    pub k_star: usize,
    pub k_used: usize,
    pub ks_distance_at_star: f64,
}

/// KS distance between the tail and its Hill-fitted Pareto law.
///
/// Returns 1 for a tail whose radii are all equal.
pub fn ks_distance(tail: &OrderedTail) -> f64 {
    ks_distance_sorted(tail.radii())
}

/// [`ks_distance`] on a descending slice of positive radii.
pub fn ks_distance_sorted(desc: &[f64]) -> f64 {
    let log_mean = hill_log_mean_sorted(desc);
    if !(log_mean > 0.0) {
        return 1.0;
    }
    ks_distance_with_alpha(desc, 1.0 / log_mean)
}

/// KS distance against `F(x) = 1 - (x / R_(k))^(-alpha)` for a given `alpha`.
///
/// At the i-th largest radius the empirical CDF of the tail steps from
/// `(k - i) / k` to `(k - i + 1) / k`; both step heights are compared.
pub fn ks_distance_with_alpha(desc: &[f64], alpha: f64) -> f64 {
    let k = desc.len();
    let rk = desc[k - 1];
    let kf = k as f64;
    desc.iter()
        .enumerate()
        .map(|(idx, &r)| {
            let i = (idx + 1) as f64;
            let fit = 1.0 - (r / rk).powf(-alpha);
            let below = (kf - i) / kf;
            let above = (kf - i + 1.0) / kf;
            (below - fit).abs().max((above - fit).abs())
        })
        .fold(0.0, f64::max)
}

/// Raw minimum-distance choice of `k` over `[k_min, k_max]`.
///
/// `radii` need not be sorted. Ties go to the smaller `k`. The returned
/// selection has `k_used == k_star`; apply [`capped_k`] separately.
pub fn min_distance_k(radii: &[f64], k_min: usize, k_max: usize) -> Result<ThresholdSelection> {
    let desc = positive_descending(radii);
    min_distance_k_sorted(&desc, k_min, k_max)
}

fn min_distance_k_sorted(desc: &[f64], k_min: usize, k_max: usize) -> Result<ThresholdSelection> {
    if k_min < 2 || k_min > k_max || k_max > desc.len() {
        return Err(param(format!(
            "candidate range [{k_min}, {k_max}] invalid for {} positive radii",
            desc.len()
        )));
    }
    let mut best = (k_min, f64::INFINITY);
    for k in k_min..=k_max {
        let d = ks_distance_sorted(&desc[..k]);
        if d < best.1 {
            best = (k, d);
        }
    }
    Ok(ThresholdSelection {
        k_star: best.0,
        k_used: best.0,
        ks_distance_at_star: best.1,
    })
}

/// `base + min(span, (k_star - base)+)`.
pub fn capped_k(k_star: usize, cap: KCap) -> usize {
    cap.base + cap.span.min(k_star.saturating_sub(cap.base))
}

/// Full threshold rule on a sample of nonnegative magnitudes: minimum-distance
/// scan, then the cap. Zero values are ignored. `k_used` never exceeds the
/// number of positive values.
pub fn select_threshold(values: &[f64], cfg: &ThresholdConfig) -> Result<ThresholdSelection> {
    let desc = positive_descending(values);
    let n = desc.len();
    let k_max = cfg.k_max.unwrap_or(n / 2).min(n);
    let k_min = cfg.k_min.max(2).min(k_max);
    let mut sel = min_distance_k_sorted(&desc, k_min, k_max)?;
    if let Some(cap) = cfg.cap {
        sel.k_used = capped_k(sel.k_star, cap).min(n);
    }
    Ok(sel)
}
