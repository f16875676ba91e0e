//! Upper order statistics with angular concomitants, and the Hill estimator.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::polar::PolarObservation;

/// The `k` largest radii of a sample, in non-increasing order, each paired
/// with the angle of the observation it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedTail {
    radii: Vec<f64>,
    concomitants: Vec<f64>,
    n: usize,
}

impl OrderedTail {
    /// Builds a tail from already ordered parts. Checks the ordering.
    pub fn from_sorted(radii: Vec<f64>, concomitants: Vec<f64>, n: usize) -> Result<Self> {
        if radii.is_empty() || radii.len() != concomitants.len() || radii.len() > n {
            return Err(param(format!(
                "tail needs 1 <= k = {} == {} concomitants <= n = {n}",
                radii.len(),
                concomitants.len()
            )));
        }
        if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(param("tail radii must be finite and positive"));
        }
        if radii.windows(2).any(|w| w[0] < w[1]) {
            return Err(param("tail radii must be non-increasing"));
        }
        if concomitants.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(param("concomitants must lie in [0, 1]"));
        }
        Ok(Self {
            radii,
            concomitants,
            n,
        })
    }

    pub fn k(&self) -> usize {
        self.radii.len()
    }

    /// Size of the sample the tail was taken from.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn concomitants(&self) -> &[f64] {
        &self.concomitants
    }

    /// The `k`-th largest radius, the reference level for log-spacings.
    pub fn threshold_radius(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// The leading `k` entries as a new tail.
    pub fn head(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.k() {
            return Err(param(format!("k = {k} outside 1..={}", self.k())));
        }
        Ok(Self {
            radii: self.radii[..k].to_vec(),
            concomitants: self.concomitants[..k].to_vec(),
            n: self.n,
        })
    }

    /// `log(R_(i) / R_(k))` for each entry.
    pub fn log_spacings(&self) -> impl Iterator<Item = f64> + '_ {
        let rk = self.threshold_radius();
        self.radii.iter().map(move |r| (r / rk).ln())
    }

    pub fn points(&self) -> impl Iterator<Item = PolarObservation> + '_ {
        self.radii
            .iter()
            .zip(&self.concomitants)
            .map(|(&r, &theta)| PolarObservation { r, theta })
    }
}

/// Sorts the whole sample by radius, largest first. Equal radii keep their
/// original sample order.
pub fn sort_descending(sample: &[PolarObservation]) -> Vec<PolarObservation> {
    let mut sorted = sample.to_vec();
    // stable: ties stay in index order
    sorted.sort_by(|p, q| q.r.total_cmp(&p.r));
    sorted
}

/// The `k` largest radii of `sample` with their concomitants.
pub fn order_tail(sample: &[PolarObservation], k: usize) -> Result<OrderedTail> {
    if k == 0 || k > sample.len() {
        return Err(param(format!(
            "k = {k} outside 1..={} for order_tail",
            sample.len()
        )));
    }
    if sample.iter().any(|p| !(p.r > 0.0)) {
        return Err(param("order_tail requires positive radii"));
    }
    let sorted = sort_descending(sample);
    let (radii, concomitants) = sorted[..k].iter().map(|p| (p.r, p.theta)).unzip();
    Ok(OrderedTail {
        radii,
        concomitants,
        n: sample.len(),
    })
}

/// `(1/k) sum log(R_(i) / R_(k))` over the tail: the reciprocal Hill estimate.
pub fn hill_log_mean(tail: &OrderedTail) -> f64 {
    hill_log_mean_sorted(tail.radii())
}

/// Hill log-mean over a descending slice of positive values.
pub fn hill_log_mean_sorted(desc: &[f64]) -> f64 {
    let k = desc.len();
    let rk = desc[k - 1];
    desc.iter().map(|r| (r / rk).ln()).sum::<f64>() / k as f64
}

/// Hill estimate of the tail index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailIndexEstimate {
    pub alpha_hat: f64,
    pub inv_alpha_hat: f64,
    pub k_used: usize,
}

impl TailIndexEstimate {
    /// From a Hill log-mean; fails when it is zero.
    pub fn from_log_mean(log_mean: f64, k: usize) -> Result<Self> {
        if !(log_mean > 0.0) || !log_mean.is_finite() {
            return Err(Error::DegenerateTail { k });
        }
        Ok(Self {
            alpha_hat: 1.0 / log_mean,
            inv_alpha_hat: log_mean,
            k_used: k,
        })
    }
}

pub fn hill_alpha(tail: &OrderedTail) -> Result<TailIndexEstimate> {
    TailIndexEstimate::from_log_mean(hill_log_mean(tail), tail.k())
}

/// Hill estimate on the `k` largest entries of an unsorted series of
/// nonnegative values.
pub fn hill_alpha_series(values: &[f64], k: usize) -> Result<TailIndexEstimate> {
    let desc = positive_descending(values);
    if k == 0 || k > desc.len() {
        return Err(param(format!(
            "k = {k} outside 1..={} positive values",
            desc.len()
        )));
    }
    TailIndexEstimate::from_log_mean(hill_log_mean_sorted(&desc[..k]), k)
}

/// Strictly positive entries of `values`, largest first.
pub fn positive_descending(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| *x > 0.0).collect();
    v.sort_by(|p, q| q.total_cmp(p));
    v
}

/// Maps each value to `x^(alpha_source / alpha_target)`, moving a tail index
/// of `alpha_source` to `alpha_target`.
pub fn power_transform(series: &[f64], alpha_source: f64, alpha_target: f64) -> Result<Vec<f64>> {
    if !(alpha_source > 0.0 && alpha_target > 0.0)
        || !alpha_source.is_finite()
        || !alpha_target.is_finite()
    {
        return Err(param(format!(
            "power transform needs positive alphas, got {alpha_source} and {alpha_target}"
        )));
    }
    if series.iter().any(|x| *x < 0.0) {
        return Err(param("power transform needs nonnegative values"));
    }
    let p = alpha_source / alpha_target;
    if p == 1.0 {
        return Ok(series.to_vec());
    }
    Ok(series.iter().map(|x| x.powf(p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn pol(r: f64, t: f64) -> PolarObservation {
        PolarObservation::new(r, t).unwrap()
    }

    #[test]
    fn order_examples() {
        let s = [pol(1.0, 0.2), pol(5.0, 0.9), pol(3.0, 0.5)];
        let t = order_tail(&s, 2).unwrap();
        assert_eq!(t.radii(), &[5.0, 3.0]);
        assert_eq!(t.concomitants(), &[0.9, 0.5]);
        assert_eq!(t.n(), 3);

        let ties = [pol(2.0, 0.1), pol(2.0, 0.7)];
        assert_eq!(order_tail(&ties, 2).unwrap().concomitants(), &[0.1, 0.7]);

        let all = order_tail(&s, 3).unwrap();
        assert_eq!(all.radii(), &[5.0, 3.0, 1.0]);
    }

    #[test]
    fn order_rejects_bad_k() {
        let s = [pol(1.0, 0.2)];
        assert!(order_tail(&s, 0).is_err());
        assert!(order_tail(&s, 2).is_err());
    }

    #[test]
    fn from_sorted_checks_order() {
        assert!(OrderedTail::from_sorted(vec![1.0, 2.0], vec![0.5, 0.5], 2).is_err());
        assert!(OrderedTail::from_sorted(vec![2.0, 1.0], vec![0.5], 2).is_err());
        assert!(OrderedTail::from_sorted(vec![2.0, 1.0], vec![0.5, 0.5], 2).is_ok());
    }

    #[test]
    fn hill_examples() {
        let t = OrderedTail::from_sorted(vec![E * E, E], vec![0.5, 0.5], 3).unwrap();
        assert!((hill_log_mean(&t) - 0.5).abs() < 1e-15);
        assert!((hill_alpha(&t).unwrap().alpha_hat - 2.0).abs() < 1e-14);

        let t = OrderedTail::from_sorted(vec![8.0, 4.0, 2.0], vec![0.0; 3], 3).unwrap();
        assert!((hill_log_mean(&t) - 2f64.ln()).abs() < 1e-15);
        assert!((hill_alpha(&t).unwrap().alpha_hat - 1.0 / 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn hill_degenerate() {
        let t = OrderedTail::from_sorted(vec![3.0; 4], vec![0.5; 4], 4).unwrap();
        assert_eq!(hill_log_mean(&t), 0.0);
        assert_eq!(hill_alpha(&t), Err(Error::DegenerateTail { k: 4 }));
    }

    #[test]
    fn tail_estimate_reciprocal() {
        let e = TailIndexEstimate::from_log_mean(0.37, 10).unwrap();
        assert!((e.alpha_hat * e.inv_alpha_hat - 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_examples() {
        let out = power_transform(&[4.0], 2.0, 3.0).unwrap();
        assert!((out[0] - 4f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((out[0] - 2.519_842_099_789_746).abs() < 1e-12);
        assert_eq!(power_transform(&[1.5, 0.0, 7.0], 2.0, 2.0).unwrap(), vec![1.5, 0.0, 7.0]);
        assert!(power_transform(&[1.0], 0.0, 1.0).is_err());
        assert!(power_transform(&[1.0], 1.0, -2.0).is_err());
    }

    proptest! {
        #[test]
        fn hill_scale_invariant(mut radii in prop::collection::vec(0.01f64..100.0, 2..50),
                                c in 1e-3f64..1e3) {
            radii.sort_by(|a, b| b.total_cmp(a));
            let base = hill_log_mean_sorted(&radii);
            let scaled: Vec<f64> = radii.iter().map(|r| r * c).collect();
            prop_assert!((hill_log_mean_sorted(&scaled) - base).abs() <= 1e-12 * base.max(1.0));
        }

        #[test]
        fn power_monotone(mut xs in prop::collection::vec(0.0f64..1e3, 2..30),
                          s in 0.2f64..5.0, t in 0.2f64..5.0) {
            xs.sort_by(|a, b| a.total_cmp(b));
            let out = power_transform(&xs, s, t).unwrap();
            prop_assert!(out.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
