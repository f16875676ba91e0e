//! Bivariate heavy-tailed samples with a known extremal dependence class.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use chrono::{Datelike, Days, NaiveDate, Weekday};

use crate::classifier::DependenceClass;
use crate::error::{param, Result};
use crate::pipeline::prices::PriceSeries;
use crate::polar::BivariateObservation;
use crate::stream::{StreamKey, StreamRng};

/// Inverse transform for the Pareto law with survival `x^-alpha` on `[1, inf)`.
pub fn pareto_from_uniform(u: f64, alpha: f64) -> f64 {
    u.powf(-1.0 / alpha)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(param(format!("alpha {alpha} must be positive")))
    }
}

fn pareto(rng: &mut StreamRng, alpha: f64) -> f64 {
    // random() is in [0, 1); flip it to (0, 1] so the draw stays finite
    pareto_from_uniform(1.0 - rng.random::<f64>(), alpha)
}

/// `n` iid Pareto(`alpha`) draws with lower endpoint 1.
pub fn gen_pareto(alpha: f64, n: usize, key: StreamKey) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let mut rng = key.rng();
    Ok((0..n).map(|_| pareto(&mut rng, alpha)).collect())
}

/// Angular law for the weak-dependence generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum AngularLaw {
    #[default]
    Uniform,
    /// Beta(2, 2): full support, mass concentrated around 1/2.
    Beta22,
}

/// Generator specification for one dependence class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ClassSpec {
    /// All mass on the ray `theta = theta0`.
    Full { alpha: f64, theta0: f64 },
    /// Angle uniform on `[a, b]`, independent of the radius.
    Strong { alpha: f64, a: f64, b: f64 },
    /// Angle with full support on `[0, 1]`, independent of the radius.
    Weak { alpha: f64, law: AngularLaw },
    /// Independent Pareto components.
    Independence { alpha: f64 },
}

impl ClassSpec {
    pub fn full(alpha: f64, theta0: f64) -> Self {
        ClassSpec::Full { alpha, theta0 }
    }

    pub fn strong(alpha: f64, a: f64, b: f64) -> Self {
        ClassSpec::Strong { alpha, a, b }
    }

    pub fn weak(alpha: f64) -> Self {
        ClassSpec::Weak {
            alpha,
            law: AngularLaw::Uniform,
        }
    }

    pub fn independence(alpha: f64) -> Self {
        ClassSpec::Independence { alpha }
    }

    pub fn class(&self) -> DependenceClass {
        match self {
            ClassSpec::Full { .. } => DependenceClass::Full,
            ClassSpec::Strong { .. } => DependenceClass::Strong,
            ClassSpec::Weak { .. } => DependenceClass::Weak,
            ClassSpec::Independence { .. } => DependenceClass::Independence,
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            ClassSpec::Full { alpha, .. }
            | ClassSpec::Strong { alpha, .. }
            | ClassSpec::Weak { alpha, .. }
            | ClassSpec::Independence { alpha } => alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha())?;
        match *self {
            ClassSpec::Full { theta0, .. } if !(theta0 > 0.0 && theta0 < 1.0) => {
                Err(param(format!("theta0 = {theta0} must lie in (0, 1)")))
            }
            ClassSpec::Strong { a, b, .. } if !(0.0 < a && a <= b && b < 1.0 && b - a < 0.85) => {
                Err(param(format!(
                    "strong interval [{a}, {b}] needs 0 < a <= b < 1 and b - a < 0.85"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// `n` observations from the class described by `spec`.
pub fn gen_class_sample(spec: &ClassSpec, n: usize, key: StreamKey) -> Result<Vec<BivariateObservation>> {
    spec.validate()?;
    let alpha = spec.alpha();
    let mut rng = key.rng();
    let on_ray = |r: f64, theta: f64| BivariateObservation {
        x: r * theta,
        y: r * (1.0 - theta),
    };
    let out = match *spec {
        ClassSpec::Full { theta0, .. } => (0..n).map(|_| on_ray(pareto(&mut rng, alpha), theta0)).collect(),
        ClassSpec::Strong { a, b, .. } => (0..n)
            .map(|_| {
                let r = pareto(&mut rng, alpha);
                on_ray(r, a + (b - a) * rng.random::<f64>())
            })
            .collect(),
        ClassSpec::Weak { law, .. } => {
            let beta = Beta::new(2.0, 2.0).expect("valid beta parameters");
            (0..n)
                .map(|_| {
                    let r = pareto(&mut rng, alpha);
                    let theta = match law {
                        AngularLaw::Uniform => rng.random::<f64>(),
                        AngularLaw::Beta22 => beta.sample(&mut rng),
                    };
                    on_ray(r, theta)
                })
                .collect()
        }
        ClassSpec::Independence { .. } => (0..n)
            .map(|_| BivariateObservation {
                x: pareto(&mut rng, alpha),
                y: pareto(&mut rng, alpha),
            })
            .collect(),
    };
    Ok(out)
}

/// Six assets of daily prices whose every-other-day returns have known
/// extremal dependence:
///
/// * `US_TECH_A` / `US_TECH_B`: one ray, B = 3A.
/// * `US_TECH_A` / `US_FIN_C`: shared radius, angles uniform on [0.3, 0.7].
/// * `CN_ENE_D` / `CN_ENE_E`: shared radius, angles uniform on [0, 1].
/// * `CN_FIN_F`: independent of everything.
///
/// Radii are Pareto(1). Each engineered absolute return is split evenly over
/// two weekdays with a random sign, so subsampling at offset 0 recovers it.
pub fn engineered_panel(returns: usize, key: StreamKey) -> Result<Vec<PriceSeries>> {
    const SCALE: f64 = 0.002;
    let strong = gen_class_sample(&ClassSpec::strong(1.0, 0.3, 0.7), returns, key.child(0))?;
    let weak = gen_class_sample(&ClassSpec::weak(1.0), returns, key.child(1))?;
    let lone = gen_pareto(1.0, returns, key.child(2))?;
    let a: Vec<f64> = strong.iter().map(|o| o.x).collect();
    let assets: [(&str, &str, &str, Vec<f64>); 6] = [
        ("US_TECH_A", "US", "Tech", a.clone()),
        ("US_TECH_B", "US", "Tech", a.iter().map(|v| 3.0 * v).collect()),
        ("US_FIN_C", "US", "Finance", strong.iter().map(|o| o.y).collect()),
        ("CN_ENE_D", "CN", "Energy", weak.iter().map(|o| o.x).collect()),
        ("CN_ENE_E", "CN", "Energy", weak.iter().map(|o| o.y).collect()),
        ("CN_FIN_F", "CN", "Finance", lone),
    ];

    let mut days = Vec::with_capacity(2 * returns + 1);
    let mut d = NaiveDate::from_ymd_opt(2016, 1, 4).expect("valid date");
    while days.len() < 2 * returns + 1 {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            days.push(d);
        }
        d = d + Days::new(1);
    }

    Ok(assets
        .into_iter()
        .enumerate()
        .map(|(idx, (id, market, sector, values))| {
            let mut rng = key.child(10 + idx as u64).rng();
            let mut log_p = 50.0_f64.ln();
            let mut points = Vec::with_capacity(days.len());
            points.push((days[0], log_p.exp()));
            for (j, r) in values.iter().enumerate() {
                let half = 0.5 * SCALE * r * if rng.random::<bool>() { 1.0 } else { -1.0 };
                log_p += half;
                points.push((days[2 * j + 1], log_p.exp()));
                log_p += half;
                points.push((days[2 * j + 2], log_p.exp()));
            }
            PriceSeries {
                asset_id: id.to_string(),
                sector: sector.to_string(),
                market: market.to_string(),
                points,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::to_polar_sample;
    use crate::tail::{hill_alpha, order_tail};

    #[test]
    fn inverse_transform_value() {
        assert_eq!(pareto_from_uniform(0.25, 2.0), 2.0);
    }

    #[test]
    fn support_and_mean() {
        let xs = gen_pareto(3.0, 100_000, StreamKey::new(1)).unwrap();
        assert!(xs.iter().all(|x| *x >= 1.0));
        let mean = xs.iter().map(|x| x.min(1e6)).sum::<f64>() / xs.len() as f64;
        assert!((mean - 1.5).abs() / 1.5 < 0.02, "mean {mean}");
        assert!(gen_pareto(0.0, 10, StreamKey::new(1)).is_err());
    }

    #[test]
    fn full_class_is_on_the_diagonal() {
        let s = gen_class_sample(&ClassSpec::full(1.0, 0.5), 500, StreamKey::new(2)).unwrap();
        assert!(s.iter().all(|o| o.x == o.y));
    }

    #[test]
    fn strong_class_angles_in_interval() {
        let s = gen_class_sample(&ClassSpec::strong(1.0, 0.3, 0.7), 2000, StreamKey::new(3)).unwrap();
        let (p, _) = to_polar_sample(&s);
        assert!(p.iter().all(|q| (0.3 - 1e-12..=0.7 + 1e-12).contains(&q.theta)));
    }

    #[test]
    fn weak_beta_law_has_full_support() {
        let spec = ClassSpec::Weak { alpha: 1.0, law: AngularLaw::Beta22 };
        let s = gen_class_sample(&spec, 5000, StreamKey::new(4)).unwrap();
        let (p, _) = to_polar_sample(&s);
        assert!(p.iter().any(|q| q.theta < 0.05));
        assert!(p.iter().any(|q| q.theta > 0.95));
        let mid = p.iter().filter(|q| (0.25..0.75).contains(&q.theta)).count();
        assert!(mid as f64 / 5000.0 > 0.6);
    }

    #[test]
    fn invalid_specs() {
        assert!(ClassSpec::full(1.0, 0.0).validate().is_err());
        assert!(ClassSpec::strong(1.0, 0.05, 0.95).validate().is_err());
        assert!(ClassSpec::strong(1.0, 0.6, 0.4).validate().is_err());
        assert!(ClassSpec::independence(-1.0).validate().is_err());
    }

    fn interior_share(n: usize, seed: u64) -> f64 {
        let s = gen_class_sample(&ClassSpec::independence(1.0), n, StreamKey::new(seed)).unwrap();
        let (p, _) = to_polar_sample(&s);
        let tail = order_tail(&p, 100).unwrap();
        let interior = tail.concomitants().iter().filter(|t| **t > 0.1 && **t < 0.9).count();
        interior as f64 / 100.0
    }

    // Reference values from an independent Monte Carlo of iid Pareto(1)
    // pairs: the top-100 interior share is about 0.31 at n = 822 and about
    // 0.03 at n = 10^4.
    #[test]
    fn independence_extremes_move_to_the_axes() {
        let shallow: f64 = (0..100).map(|s| interior_share(822, s)).sum::<f64>() / 100.0;
        assert!((shallow - 0.31).abs() < 0.04, "n = 822 share {shallow}");
        let deep = (0..100).filter(|s| interior_share(10_000, 500 + s) < 0.2).count();
        assert!(deep >= 90, "{deep}/100");
    }

    #[test]
    fn radius_hill_near_alpha_for_every_class() {
        let specs = [
            ClassSpec::full(2.0, 0.3),
            ClassSpec::strong(2.0, 0.2, 0.6),
            ClassSpec::weak(2.0),
            ClassSpec::independence(2.0),
        ];
        for spec in specs {
            let mut inside = 0;
            for seed in 0..100 {
                let s = gen_class_sample(&spec, 10_000, StreamKey::new(seed)).unwrap();
                let (p, _) = to_polar_sample(&s);
                let a = hill_alpha(&order_tail(&p, 100).unwrap()).unwrap().alpha_hat;
                if (a - 2.0).abs() <= 0.3 * 2.0 {
                    inside += 1;
                }
            }
            assert!(inside >= 90, "{:?}: {inside}/100", spec.class());
        }
    }

    #[test]
    fn engineered_panel_recovers_returns() {
        use crate::pipeline::prices::{abs_log_returns, every_other_day};
        let panel = engineered_panel(40, StreamKey::new(3)).unwrap();
        assert_eq!(panel.len(), 6);
        let ret = |i: usize| abs_log_returns(&every_other_day(&panel[i], 0).unwrap()).unwrap().values();
        let (a, b) = (ret(0), ret(1));
        assert_eq!(a.len(), 40);
        for (x, y) in a.iter().zip(&b) {
            assert!((3.0 * x - y).abs() < 1e-9 * y.max(1.0), "{x} {y}");
        }
        assert!(panel.iter().all(|s| s.points.len() == 81));
    }
}
