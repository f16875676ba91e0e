//! L1 polar coordinates, angular cones and the distance of a point to a cone.
//!
//! A nonnegative observation `(x, y)` maps to radius `r = x + y` and angle
//! `theta = x / (x + y)`. The angle lives in `[0, 1]`: `0` is the y-axis,
//! `1` is the x-axis and `0.5` the diagonal.

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// A nonnegative, finite bivariate observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateObservation {
    pub x: f64,
    pub y: f64,
}

impl BivariateObservation {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 {
            return Err(param(format!(
                "observation ({x}, {y}) must be finite and nonnegative"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn to_polar(&self) -> Result<PolarObservation> {
        to_polar(*self)
    }
}

/// One observation in L1 polar form. `r > 0` and `theta` in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarObservation {
    pub r: f64,
    pub theta: f64,
}

impl PolarObservation {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(param(format!("radius {r} must be finite and positive")));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Domain {
                value: theta,
                domain: "[0, 1]",
            });
        }
        Ok(Self { r, theta })
    }

    /// Same angle, radius multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            r: self.r * c,
            theta: self.theta,
        }
    }
}

/// L1 polar transform. Returns [`Error::Degenerate`] at the origin.
pub fn to_polar(obs: BivariateObservation) -> Result<PolarObservation> {
    let r = obs.x + obs.y;
    if r == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(PolarObservation {
        r,
        theta: obs.x / r,
    })
}

/// Polar-transform a sample, dropping observations at the origin.
///
/// Returns the transformed sample and the number of dropped points.
pub fn to_polar_sample(obs: &[BivariateObservation]) -> (Vec<PolarObservation>, usize) {
    let polar: Vec<_> = obs.iter().filter_map(|o| to_polar(*o).ok()).collect();
    let dropped = obs.len() - polar.len();
    (polar, dropped)
}

/// The tent map with `g(0) = g(1) = 1` that sends angular mass sitting on
/// both axes to a single point.
pub fn g_transform(theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Domain {
            value: theta,
            domain: "[0, 1]",
        });
    }
    Ok(g_unchecked(theta))
}

#[inline]
pub(crate) fn g_unchecked(theta: f64) -> f64 {
    if theta < 0.5 {
        1.0 - 2.0 * theta
    } else {
        3.0 - 2.0 * theta
    }
}

/// Angular interval `[a, b]` with `0 <= a <= b <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    a: f64,
    b: f64,
}

impl Cone {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b > 1.0 || a > b {
            return Err(param(format!("cone [{a}, {b}] needs 0 <= a <= b <= 1")));
        }
        Ok(Self { a, b })
    }

    /// The whole quadrant `[0, 1]`.
    pub fn full() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.a <= theta && theta <= self.b
    }

    /// Cone seen from the swapped pair `(y, x)`: `[1 - b, 1 - a]`.
    pub fn mirrored(&self) -> Self {
        Self {
            a: 1.0 - self.b,
            b: 1.0 - self.a,
        }
    }

    /// Distance of a polar point to the cone.
    #[inline]
    pub fn distance(&self, p: &PolarObservation) -> f64 {
        p.r * self.angular_excess(p.theta)
    }

    /// `(theta/b - 1)+ + (1 - theta/a)+`, the distance per unit radius.
    ///
    /// `a = 0` drops the second term. With `b = 0` the first term is
    /// infinite for `theta > 0` and zero at `theta = 0`.
    #[inline]
    pub fn angular_excess(&self, theta: f64) -> f64 {
        let upper = if self.b > 0.0 {
            (theta / self.b - 1.0).max(0.0)
        } else if theta > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let lower = if self.a > 0.0 {
            (1.0 - theta / self.a).max(0.0)
        } else {
            0.0
        };
        upper + lower
    }

    /// Distance of a Cartesian point to the cone, evaluated directly in
    /// `(x, y)` without going through the polar form.
    pub fn distance_xy(&self, obs: &BivariateObservation) -> f64 {
        let (x, y) = (obs.x, obs.y);
        let upper = if self.b > 0.0 {
            ((1.0 / self.b - 1.0) * x - y).max(0.0)
        } else if x > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let lower = if self.a > 0.0 {
            (y - (1.0 / self.a - 1.0) * x).max(0.0)
        } else {
            0.0
        };
        upper + lower
    }
}

/// Free-function form of [`Cone::distance`].
pub fn cone_distance(p: &PolarObservation, cone: &Cone) -> f64 {
    cone.distance(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn obs(x: f64, y: f64) -> BivariateObservation {
        BivariateObservation::new(x, y).unwrap()
    }

    #[test]
    fn polar_examples() {
        let p = to_polar(obs(3.0, 1.0)).unwrap();
        assert_eq!(p.r, 4.0);
        assert_eq!(p.theta, 0.75);

        let p = to_polar(obs(0.0, 5.0)).unwrap();
        assert_eq!((p.r, p.theta), (5.0, 0.0));

        assert_eq!(to_polar(obs(0.0, 0.0)), Err(Error::Degenerate));
    }

    #[test]
    fn rejects_negative_or_nan() {
        assert!(BivariateObservation::new(-1.0, 0.0).is_err());
        assert!(BivariateObservation::new(f64::NAN, 1.0).is_err());
        assert!(BivariateObservation::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn polar_sample_drops_origin() {
        let (p, dropped) = to_polar_sample(&[obs(1.0, 1.0), obs(0.0, 0.0), obs(2.0, 0.0)]);
        assert_eq!(p.len(), 2);
        assert_eq!(dropped, 1);
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_transform(0.0).unwrap(), 1.0);
        assert_eq!(g_transform(1.0).unwrap(), 1.0);
        assert_eq!(g_transform(0.25).unwrap(), 0.5);
        assert_eq!(g_transform(0.5).unwrap(), 2.0);
        assert!(g_transform(-0.01).is_err());
        assert!(g_transform(1.01).is_err());
    }

    #[test]
    fn g_range_on_grid() {
        for i in 0..=100_000 {
            let v = g_transform(i as f64 / 100_000.0).unwrap();
            assert!(v > 0.0 && v <= 2.0, "g out of range: {v}");
        }
    }

    #[test]
    fn cone_validation() {
        assert!(Cone::new(0.6, 0.4).is_err());
        assert!(Cone::new(-0.1, 0.4).is_err());
        assert!(Cone::new(0.1, 1.1).is_err());
        assert!(Cone::new(0.0, 0.0).is_ok());
    }

    #[test]
    fn distance_examples() {
        let inside = PolarObservation::new(4.0, 0.5).unwrap();
        assert_eq!(Cone::new(0.4, 0.6).unwrap().distance(&inside), 0.0);

        let p = PolarObservation::new(4.0, 0.75).unwrap();
        let point = Cone::new(0.5, 0.5).unwrap();
        assert!((point.distance(&p) - 2.0).abs() < 1e-12);
        assert!((point.distance_xy(&obs(3.0, 1.0)) - 2.0).abs() < 1e-12);

        let from_zero = Cone::new(0.0, 0.5).unwrap();
        assert!((from_zero.distance(&p) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_zero_cone() {
        let c = Cone::new(0.0, 0.0).unwrap();
        assert_eq!(c.distance(&PolarObservation::new(1.0, 0.0).unwrap()), 0.0);
        assert!(c.distance(&PolarObservation::new(1.0, 0.1).unwrap()).is_infinite());
    }

    #[test]
    fn mirrored_cone() {
        let c = Cone::new(0.2, 0.7).unwrap().mirrored();
        assert!((c.a() - 0.3).abs() < 1e-15 && (c.b() - 0.8).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn polar_round_trip(r in 1e-6f64..1e6, theta in 0.0f64..=1.0) {
            let p = to_polar(obs(r * theta, r * (1.0 - theta))).unwrap();
            prop_assert!(((p.r - r) / r).abs() < 1e-12);
            prop_assert!((p.theta - theta).abs() < 1e-12);
        }

        #[test]
        fn scale_equivariance(r in 1e-3f64..1e3, theta in 0.0f64..=1.0,
                              a in 0.01f64..=1.0, w in 0.0f64..=1.0, c in 1e-3f64..1e3) {
            let b = a + (1.0 - a) * w;
            let cone = Cone::new(a, b).unwrap();
            let p = PolarObservation::new(r, theta).unwrap();
            let lhs = cone.distance(&p.scaled(c));
            let rhs = c * cone.distance(&p);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }

        #[test]
        fn zero_iff_inside(theta in 0.0f64..=1.0, a in 0.01f64..=1.0, w in 0.0f64..=1.0) {
            let b = a + (1.0 - a) * w;
            let cone = Cone::new(a, b).unwrap();
            let d = cone.distance(&PolarObservation::new(2.0, theta).unwrap());
            prop_assert_eq!(d == 0.0, cone.contains(theta));
        }

        #[test]
        fn nested_cones_are_closer(theta in 0.0f64..=1.0, a in 0.0f64..=1.0,
                                   w in 0.0f64..=1.0, s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
            let b = a + (1.0 - a) * w;
            let outer = Cone::new(a * (1.0 - s), b + (1.0 - b) * t).unwrap();
            let inner = Cone::new(a, b).unwrap();
            let p = PolarObservation::new(3.0, theta).unwrap();
            prop_assert!(inner.distance(&p) >= outer.distance(&p));
        }
    }
}
