//! Chi-square quantiles by inverting the regularized lower incomplete gamma
//! function with safeguarded Newton steps.

use statrs::function::erf::erfc_inv;
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{param, Result};

/// Chi-square CDF with `df` degrees of freedom.
pub fn chi2_cdf(x: f64, df: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    gamma_lr(f64::from(df) / 2.0, x / 2.0)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

/// Wilson-Hilferty cube-root approximation to the chi-square quantile.
pub fn wilson_hilferty(p: f64, df: u32) -> f64 {
    let v = f64::from(df);
    let c = 2.0 / (9.0 * v);
    v * (1.0 - c + normal_quantile(p) * c.sqrt()).powi(3)
}

/// Inverse CDF of the chi-square distribution.
pub fn chi2_quantile(p: f64, df: u32) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(param(format!("probability {p} must lie in (0, 1)")));
    }
    if df == 0 {
        return Err(param("chi-square needs df >= 1"));
    }
    let a = f64::from(df) / 2.0;
    // work in y = x / 2, a Gamma(a, 1) quantile
    let cdf = |y: f64| gamma_lr(a, y);
    let log_norm = ln_gamma(a);
    let pdf = |y: f64| ((a - 1.0) * y.ln() - y - log_norm).exp();

    let mut lo = 0.0;
    let mut hi = f64::max(1.0, 2.0 * a);
    while cdf(hi) < p {
        lo = hi;
        hi *= 2.0;
    }
    let wh = wilson_hilferty(p, df) / 2.0;
    let mut y = if wh > lo && wh < hi { wh } else { 0.5 * (lo + hi) };

    for _ in 0..200 {
        let f = cdf(y) - p;
        if f == 0.0 {
            break;
        }
        if f < 0.0 {
            lo = y;
        } else {
            hi = y;
        }
        let dens = pdf(y);
        let mut next = if dens > 0.0 { y - f / dens } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - y).abs() <= 1e-15 * y.abs() || hi - lo <= 1e-15 * hi {
            y = next;
            break;
        }
        y = next;
    }
    Ok(2.0 * y)
}
