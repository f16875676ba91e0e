//! Classification of the extremal dependence between two heavy-tailed,
//! nonnegative series into asymptotic independence, weak, strong or full
//! dependence, using an m-out-of-n bootstrap test cascade on the angular
//! part of the largest observations.
//!
//! The building blocks, bottom up:
//!
//! - [`polar`]: L1 polar coordinates, cones and cone distances.
//! - [`tail`]: upper order statistics, Hill estimation, power transforms.
//! - [`threshold`]: minimum-distance choice of `k` with a cap.
//! - [`stats`]: the `D`, `T` and `T_g` statistics and the cone fit.
//! - [`bootstrap`]: resampling and the decision rules.
//! - [`classifier`]: the cascade and its repetition.
//! - [`synth`]: generators with known dependence class.
//! - [`pipeline`]: prices to returns, pairwise matrices, heatmaps.
//!
//! ```
//! use extremaldep::polar::to_polar_sample;
//! use extremaldep::synth::{gen_class_sample, ClassSpec};
//! use extremaldep::{classify_repeated, ClassifierConfig, StreamKey};
//!
//! let obs = gen_class_sample(&ClassSpec::strong(1.0, 0.3, 0.7), 822, StreamKey::new(1))?;
//! let (sample, _dropped) = to_polar_sample(&obs);
//! let cfg = ClassifierConfig { seed: 7, repetitions: 5, ..Default::default() };
//! let result = classify_repeated(&sample, &cfg)?;
//! if let Some(v) = result.vector {
//!     println!("{:?} -> {}", v.weights, v.majority());
//! }
//! # Ok::<(), extremaldep::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails the guard too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bootstrap;
pub mod chi2;
pub mod classifier;
pub mod error;
pub mod pipeline;
pub mod polar;
pub mod stats;
pub mod stream;
pub mod synth;
pub mod tail;
pub mod threshold;

pub use classifier::{
    classify_repeated, Classification, ClassifierConfig, DependenceClass, DependenceVector,
};
pub use error::{Error, Result};
pub use polar::{BivariateObservation, Cone, PolarObservation};
pub use stream::StreamKey;
