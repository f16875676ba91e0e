//! The cone statistic `D`, the angle-weighted statistic `T` and the
//! penalized cone fit.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::polar::{g_unchecked, Cone};
use crate::tail::{hill_log_mean, OrderedTail};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatisticKind {
    /// Cone-distance weighted log-spacing mean.
    D,
    /// Angle-weighted log-spacing mean.
    T,
    /// `T` with angles passed through the tent map `g`.
    #[serde(rename = "T_g")]
    Tg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub value: f64,
    pub k: usize,
    pub kind: StatisticKind,
}

/// Angular weight used by the T-statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularWeight {
    Identity,
    G,
}

impl AngularWeight {
    #[inline]
    fn apply(self, theta: f64) -> f64 {
        match self {
            AngularWeight::Identity => theta,
            AngularWeight::G => g_unchecked(theta),
        }
    }

    pub fn kind(self) -> StatisticKind {
        match self {
            AngularWeight::Identity => StatisticKind::T,
            AngularWeight::G => StatisticKind::Tg,
        }
    }
}

/// `(1/k) sum (1 + d(Z_i, C) / R_(k)) log(R_(i) / R_(k))`.
pub fn d_stat(tail: &OrderedTail, cone: &Cone) -> StatisticValue {
    let rk = tail.threshold_radius();
    let sum: f64 = tail
        .points()
        .map(|p| (1.0 + cone.distance(&p) / rk) * (p.r / rk).ln())
        .sum();
    StatisticValue {
        value: sum / tail.k() as f64,
        k: tail.k(),
        kind: StatisticKind::D,
    }
}

/// `sum w(theta_i) log(R_(i) / R_(k)) / sum w(theta_i)`.
pub fn t_stat(tail: &OrderedTail, weight: AngularWeight) -> Result<StatisticValue> {
    let rk = tail.threshold_radius();
    let (num, den) = tail
        .radii()
        .iter()
        .zip(tail.concomitants())
        .fold((0.0, 0.0), |(num, den), (&r, &theta)| {
            let w = weight.apply(theta);
            (num + w * (r / rk).ln(), den + w)
        });
    if !(den > 0.0) {
        return Err(Error::DegenerateWeights);
    }
    Ok(StatisticValue {
        value: num / den,
        k: tail.k(),
        kind: weight.kind(),
    })
}

/// Result of the penalized cone fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeFit {
    pub cone: Cone,
    pub objective: f64,
    pub lambda: f64,
    pub grid_step: f64,
}

impl ConeFit {
    pub fn width(&self) -> f64 {
        self.cone.width()
    }
}

/// `(b - a) + lambda * sqrt(k) * |D(a, b) - inv_alpha_hat|`, via [`d_stat`].
pub fn cone_objective(tail: &OrderedTail, cone: &Cone, inv_alpha_hat: f64, lambda: f64) -> f64 {
    let d = d_stat(tail, cone).value;
    cone.width() + lambda * (tail.k() as f64).sqrt() * (d - inv_alpha_hat).abs()
}

/// Grid points `step, 2 step, ..., 1` (1 is always included).
pub fn cone_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(param(format!("grid step {step} must be in (0, 1]")));
    }
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (1..=count).map(|i| (i as f64 * step).min(1.0)).collect();
    if grid.last().is_none_or(|&last| last < 1.0 - 1e-12) {
        grid.push(1.0);
    }
    Ok(grid)
}

/// Exhaustive grid search for the cone minimizing
/// `(b - a) + lambda * sqrt(k) * |D(a, b) - inv_alpha_hat|` over
/// `0 < a <= b <= 1`.
///
/// Ties go to the narrower cone, then to the smaller `a`.
pub fn fit_cone(
    tail: &OrderedTail,
    inv_alpha_hat: f64,
    lambda: f64,
    grid_step: f64,
) -> Result<ConeFit> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(param(format!("lambda {lambda} must be nonnegative")));
    }
    let grid = cone_grid(grid_step)?;
    let k = tail.k() as f64;
    let rk = tail.threshold_radius();

    // D(a, b) = H + U(b) + V(a): the upper and lower parts of the cone
    // distance depend on b and a separately.
    let weights: Vec<(f64, f64)> = tail
        .points()
        .map(|p| {
            let ratio = p.r / rk;
            (ratio * ratio.ln(), p.theta)
        })
        .collect();
    let upper: Vec<f64> = grid
        .iter()
        .map(|&b| {
            weights
                .iter()
                .map(|&(w, t)| w * (t / b - 1.0).max(0.0))
                .sum::<f64>()
                / k
        })
        .collect();
    let lower: Vec<f64> = grid
        .iter()
        .map(|&a| {
            weights
                .iter()
                .map(|&(w, t)| w * (1.0 - t / a).max(0.0))
                .sum::<f64>()
                / k
        })
        .collect();
    let hill = hill_log_mean(tail);
    let penalty = lambda * k.sqrt();

    // (objective, width index, a index, b index)
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for (i, &a) in grid.iter().enumerate() {
        for (j, &b) in grid.iter().enumerate().skip(i) {
            let obj = (b - a) + penalty * (hill + upper[j] + lower[i] - inv_alpha_hat).abs();
            let cand = (obj, j - i, i, j);
            let better = match best {
                None => true,
                Some(cur) => {
                    cand.0 < cur.0 || (cand.0 == cur.0 && (cand.1, cand.2) < (cur.1, cur.2))
                }
            };
            if better {
                best = Some(cand);
            }
        }
    }
    let (_, _, i, j) = best.expect("grid is never empty");
    let cone = Cone::new(grid[i], grid[j])?;
    Ok(ConeFit {
        cone,
        objective: cone_objective(tail, &cone, inv_alpha_hat, lambda),
        lambda,
        grid_step,
    })
}
