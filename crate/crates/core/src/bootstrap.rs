//! m-out-of-n bootstrap of the tail statistics and the three decision rules.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chi2::{chi2_quantile, normal_quantile};
use crate::error::{param, Error, Result};
use crate::polar::{Cone, PolarObservation};
use crate::stats::{d_stat, t_stat, AngularWeight, StatisticKind};
use crate::stream::{StreamKey, StreamRng};
use crate::tail::{order_tail, OrderedTail};

/// Significance setting for the band and variance tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Significance {
    /// z = 1.96, 95% chi-square quantile.
    #[default]
    Standard,
    /// Both tests at level 0.025: z = 2.2414, 97.5% chi-square quantile.
    Bonferroni,
}

impl Significance {
    pub fn z_crit(self) -> f64 {
        match self {
            Significance::Standard => 1.96,
            Significance::Bonferroni => normal_quantile(1.0 - 0.025 / 2.0),
        }
    }

    pub fn chi2_level(self) -> f64 {
        match self {
            Significance::Standard => 0.95,
            Significance::Bonferroni => 0.975,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of resamples `B`.
    pub resamples: usize,
    /// Resample size `m`.
    pub m: usize,
    /// Tail size inside a resample, `k(m)`.
    pub k_m: usize,
    pub z_crit: f64,
    pub chi2_level: f64,
    /// Fraction of band exceedances at which the cone hypothesis is rejected.
    pub reject_fraction: f64,
    /// Largest tolerated fraction of failed resamples.
    pub max_failed_fraction: f64,
    pub seed: u64,
}

/// `ceil(6 n / k)`.
pub fn default_resample_size(n: usize, k: usize) -> usize {
    (6 * n).div_ceil(k)
}

/// `ceil(2 m^0.4)`.
pub fn default_resample_tail(m: usize) -> usize {
    (2.0 * (m as f64).powf(0.4)).ceil() as usize
}

impl BootstrapConfig {
    /// Defaults for a sample of size `n` analysed with `k` upper order
    /// statistics: `B = 200`, `m = ceil(6n/k)`, `k(m) = ceil(2 m^0.4)`.
    pub fn for_sample(n: usize, k: usize, significance: Significance, seed: u64) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return Err(param(format!("need 1 <= k = {k} <= n = {n}")));
        }
        let m = default_resample_size(n, k).min(n);
        let k_m = default_resample_tail(m).clamp(1, m);
        Ok(Self {
            resamples: 200,
            m,
            k_m,
            z_crit: significance.z_crit(),
            chi2_level: significance.chi2_level(),
            reject_fraction: 0.05,
            max_failed_fraction: 0.1,
            seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.resamples < 2 {
            return Err(param("need at least 2 bootstrap resamples"));
        }
        if self.k_m == 0 || self.k_m > self.m {
            return Err(param(format!("need 1 <= k_m = {} <= m = {}", self.k_m, self.m)));
        }
        if !(self.z_crit > 0.0) {
            return Err(param("z_crit must be positive"));
        }
        for (name, v) in [
            ("chi2_level", self.chi2_level),
            ("reject_fraction", self.reject_fraction),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(param(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        Ok(())
    }

    /// Smallest exceedance count that rejects the cone hypothesis.
    pub fn reject_count(&self) -> usize {
        (self.reject_fraction * self.resamples as f64 - 1e-9).ceil() as usize
    }

    /// Half-width of the acceptance band around `1/alpha`.
    pub fn band_half_width(&self, inv_alpha_hat: f64) -> f64 {
        self.z_crit * inv_alpha_hat / (self.k_m as f64).sqrt()
    }
}

/// `m` uniform draws with replacement, in draw order.
pub fn resample(sample: &[PolarObservation], m: usize, rng: &mut StreamRng) -> Vec<PolarObservation> {
    if sample.is_empty() {
        return Vec::new();
    }
    (0..m)
        .map(|_| sample[rng.random_range(0..sample.len())])
        .collect()
}

/// Ordered tails of all `B` resamples. Resample `i` is drawn from the
/// stream `(seed, i)`, so every statistic computed from one set of tails
/// sees the same resamples.
#[derive(Debug, Clone)]
pub struct ResampledTails {
    tails: Vec<OrderedTail>,
}

impl ResampledTails {
    pub fn draw(sample: &[PolarObservation], cfg: &BootstrapConfig) -> Result<Self> {
        cfg.validate()?;
        if sample.is_empty() {
            return Err(param("cannot resample an empty sample"));
        }
        let root = StreamKey::new(cfg.seed);
        let one = |i: usize| -> Result<OrderedTail> {
            let mut rng = root.child(i as u64).rng();
            order_tail(&resample(sample, cfg.m, &mut rng), cfg.k_m)
        };
        #[cfg(feature = "parallel")]
        let tails = {
            use rayon::prelude::*;
            (0..cfg.resamples)
                .into_par_iter()
                .map(one)
                .collect::<Result<Vec<_>>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let tails = (0..cfg.resamples).map(one).collect::<Result<Vec<_>>>()?;
        Ok(Self { tails })
    }

    pub fn tails(&self) -> &[OrderedTail] {
        &self.tails
    }

    /// Statistic of the given kind on every resample. `cone` is required
    /// for [`StatisticKind::D`].
    pub fn statistics(
        &self,
        kind: StatisticKind,
        cone: Option<&Cone>,
        cfg: &BootstrapConfig,
    ) -> Result<BootstrapDraws> {
        let mut values = Vec::with_capacity(self.tails.len());
        let mut failed = 0;
        for tail in &self.tails {
            let v = match kind {
                StatisticKind::D => {
                    let cone = cone.ok_or_else(|| param("D statistic needs a cone"))?;
                    Ok(d_stat(tail, cone))
                }
                StatisticKind::T => t_stat(tail, AngularWeight::Identity),
                StatisticKind::Tg => t_stat(tail, AngularWeight::G),
            };
            match v {
                Ok(v) => values.push(v.value),
                Err(Error::DegenerateWeights) => failed += 1,
                Err(e) => return Err(e),
            }
        }
        let total = self.tails.len();
        if failed as f64 > cfg.max_failed_fraction * total as f64 {
            return Err(Error::InvalidRun { failed, total });
        }
        Ok(BootstrapDraws {
            values,
            kind,
            failed,
        })
    }
}

/// One bootstrap statistic per successful resample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDraws {
    pub values: Vec<f64>,
    pub kind: StatisticKind,
    /// Resamples whose T-statistic had zero weight sum.
    pub failed: usize,
}

impl BootstrapDraws {
    pub fn total(&self) -> usize {
        self.values.len() + self.failed
    }
}

/// Draw `B` resamples and compute one statistic on each.
pub fn bootstrap_draws(
    sample: &[PolarObservation],
    cfg: &BootstrapConfig,
    cone: Option<&Cone>,
    kind: StatisticKind,
) -> Result<BootstrapDraws> {
    ResampledTails::draw(sample, cfg)?.statistics(kind, cone, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

/// A decision together with the quantity it was based on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub decision: Decision,
    pub statistic: f64,
    pub critical: f64,
}

impl TestOutcome {
    pub fn rejected(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// Band test for the cone hypothesis: count resamples with
/// `|D_i - 1/alpha| > z * (1/alpha) / sqrt(k(m))` and reject when the count
/// reaches `reject_fraction * B`.
///
/// `statistic` is the exceedance count, `critical` the rejecting count.
pub fn decide_strong(draws: &BootstrapDraws, inv_alpha_hat: f64, cfg: &BootstrapConfig) -> Result<TestOutcome> {
    if draws.kind != StatisticKind::D {
        return Err(param("band test needs D draws"));
    }
    let half = cfg.band_half_width(inv_alpha_hat);
    let count = draws
        .values
        .iter()
        .filter(|d| (*d - inv_alpha_hat).abs() > half)
        .count();
    Ok(decide_by_count(count, cfg))
}

/// Unbiased variance, shifted by the first value so identical draws give
/// exactly zero.
fn sample_variance(values: &[f64]) -> f64 {
    let shift = values[0];
    let b = values.len() as f64;
    let (sum, sq) = values.iter().fold((0.0, 0.0), |(s, q), v| {
        let d = v - shift;
        (s + d, q + d * d)
    });
    ((sq - sum * sum / b) / (b - 1.0)).max(0.0)
}

pub(crate) fn decide_by_count(count: usize, cfg: &BootstrapConfig) -> TestOutcome {
    let need = cfg.reject_count();
    TestOutcome {
        decision: if count >= need {
            Decision::Reject
        } else {
            Decision::Accept
        },
        statistic: count as f64,
        critical: need as f64,
    }
}

/// Variance test: reject when `k(m) S^2 / (1/alpha)^2` exceeds
/// `chi2_{level, B'-1} / (B'-1)`, where `S^2` is the unbiased variance of
/// the `B'` successful draws.
pub fn decide_variance(draws: &BootstrapDraws, inv_alpha_hat: f64, cfg: &BootstrapConfig) -> Result<TestOutcome> {
    if draws.kind == StatisticKind::D {
        return Err(param("variance test needs T or T_g draws"));
    }
    let b = draws.values.len();
    if b < 2 {
        return Err(Error::InvalidRun {
            failed: draws.failed,
            total: draws.total(),
        });
    }
    let s2 = sample_variance(&draws.values);
    let statistic = cfg.k_m as f64 * s2 / (inv_alpha_hat * inv_alpha_hat);
    let dof = (b - 1) as u32;
    let critical = chi2_quantile(cfg.chi2_level, dof)? / f64::from(dof);
    Ok(TestOutcome {
        decision: if statistic > critical {
            Decision::Reject
        } else {
            Decision::Accept
        },
        statistic,
        critical,
    })
}
