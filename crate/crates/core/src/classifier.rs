//! The test cascade that assigns one of four extremal dependence classes, and
//! its repetition into a frequency vector.
//!
//! ```text
//!            H1: cone [a, b] carries all angular mass   (D, band test)
//!           /accept                              \reject
//!   H2: single point (T, variance)        H3: mass on {0, 1} (T_g, variance)
//!     /accept      \reject                  /accept        \reject
//!   Full          Strong              Independence         Weak
//! ```
//!
//! When the fitted cone is at least `precheck_width` wide the cascade starts
//! directly at H3.

use serde::{Deserialize, Serialize};

use crate::bootstrap::{
    decide_strong, decide_variance, BootstrapConfig, ResampledTails, Significance, TestOutcome,
};
use crate::error::{param, Error, Result};
use crate::polar::PolarObservation;
use crate::stats::{fit_cone, ConeFit, StatisticKind};
use crate::stream::StreamKey;
use crate::tail::{hill_alpha, order_tail, TailIndexEstimate};
use crate::threshold::{select_threshold, ThresholdConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DependenceClass {
    Independence,
    Weak,
    Strong,
    Full,
}

impl DependenceClass {
    pub const ALL: [DependenceClass; 4] = [
        DependenceClass::Independence,
        DependenceClass::Weak,
        DependenceClass::Strong,
        DependenceClass::Full,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DependenceClass::Independence => "independence",
            DependenceClass::Weak => "weak",
            DependenceClass::Strong => "strong",
            DependenceClass::Full => "full",
        }
    }
}

impl std::fmt::Display for DependenceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Frequencies of the four classes over the repetitions, indexed by
/// [`DependenceClass::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceVector {
    pub weights: [f64; 4],
    pub repetitions: usize,
}

impl DependenceVector {
    pub fn from_classes(classes: &[DependenceClass]) -> Result<Self> {
        if classes.is_empty() {
            return Err(param("dependence vector needs at least one repetition"));
        }
        let mut counts = [0usize; 4];
        for c in classes {
            counts[c.index()] += 1;
        }
        let n = classes.len() as f64;
        Ok(Self {
            weights: counts.map(|c| c as f64 / n),
            repetitions: classes.len(),
        })
    }

    pub fn weight(&self, class: DependenceClass) -> f64 {
        self.weights[class.index()]
    }

    /// Class with the largest weight; ties go to the stronger dependence.
    pub fn majority(&self) -> DependenceClass {
        let mut best = DependenceClass::Independence;
        for c in DependenceClass::ALL {
            if self.weight(c) >= self.weight(best) {
                best = c;
            }
        }
        best
    }
}

/// What happened in one pass through the cascade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepetitionOutcome {
    pub class: DependenceClass,
    pub precheck: bool,
    pub h1: Option<TestOutcome>,
    pub h2: Option<TestOutcome>,
    pub h3: Option<TestOutcome>,
}

/// One pass of the cascade on `sample`. The cone fit and `1/alpha` come from
/// the original sample; `cfg.seed` selects the bootstrap resamples.
pub fn classify_once(
    sample: &[PolarObservation],
    cfg: &BootstrapConfig,
    fit: &ConeFit,
    inv_alpha_hat: f64,
    precheck_width: Option<f64>,
) -> Result<RepetitionOutcome> {
    let tails = ResampledTails::draw(sample, cfg)?;
    let precheck = precheck_width.is_some_and(|w| fit.width() >= w - 1e-9);

    let mut out = RepetitionOutcome {
        class: DependenceClass::Independence,
        precheck,
        h1: None,
        h2: None,
        h3: None,
    };
    let run_h3 = |out: &mut RepetitionOutcome| -> Result<()> {
        let draws = tails.statistics(StatisticKind::Tg, None, cfg)?;
        let h3 = decide_variance(&draws, inv_alpha_hat, cfg)?;
        out.class = if h3.rejected() {
            DependenceClass::Weak
        } else {
            DependenceClass::Independence
        };
        out.h3 = Some(h3);
        Ok(())
    };

    if precheck {
        run_h3(&mut out)?;
        return Ok(out);
    }
    let draws = tails.statistics(StatisticKind::D, Some(&fit.cone), cfg)?;
    let h1 = decide_strong(&draws, inv_alpha_hat, cfg)?;
    out.h1 = Some(h1);
    if h1.rejected() {
        run_h3(&mut out)?;
    } else {
        let draws = tails.statistics(StatisticKind::T, None, cfg)?;
        let h2 = decide_variance(&draws, inv_alpha_hat, cfg)?;
        out.class = if h2.rejected() {
            DependenceClass::Strong
        } else {
            DependenceClass::Full
        };
        out.h2 = Some(h2);
    }
    Ok(out)
}

/// How `k(n)` is chosen for the radius sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailSize {
    Rule(ThresholdConfig),
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub tail_size: TailSize,
    pub lambda: f64,
    pub grid_step: f64,
    /// `None` disables the wide-cone shortcut.
    pub precheck_width: Option<f64>,
    pub repetitions: usize,
    pub resamples: usize,
    pub significance: Significance,
    /// Largest tolerated fraction of failed repetitions.
    pub max_failed_repetitions: f64,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            tail_size: TailSize::Rule(ThresholdConfig::default()),
            lambda: 4.0,
            grid_step: 0.01,
            precheck_width: Some(0.85),
            repetitions: 50,
            resamples: 200,
            significance: Significance::Standard,
            max_failed_repetitions: 0.2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationDiagnostics {
    pub alpha_hat: TailIndexEstimate,
    pub cone_fit: ConeFit,
    pub k_n: usize,
    pub m: usize,
    pub k_m: usize,
    /// One entry per repetition; `None` where the bootstrap run was invalid.
    pub per_repetition: Vec<Option<RepetitionOutcome>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    /// `None` when too many repetitions failed.
    pub vector: Option<DependenceVector>,
    pub diagnostics: ClassificationDiagnostics,
}

/// Estimates `alpha`, `k(n)` and the cone once, then runs the cascade
/// `cfg.repetitions` times with independent resamples.
pub fn classify_repeated(sample: &[PolarObservation], cfg: &ClassifierConfig) -> Result<Classification> {
    if cfg.repetitions == 0 {
        return Err(param("need at least one repetition"));
    }
    let n = sample.len();
    let k_n = match cfg.tail_size {
        TailSize::Fixed(k) => k,
        TailSize::Rule(rule) => {
            let radii: Vec<f64> = sample.iter().map(|p| p.r).collect();
            select_threshold(&radii, &rule)?.k_used
        }
    };
    let tail = order_tail(sample, k_n)?;
    let alpha_hat = hill_alpha(&tail)?;
    let cone_fit = fit_cone(&tail, alpha_hat.inv_alpha_hat, cfg.lambda, cfg.grid_step)?;
    let mut boot = BootstrapConfig::for_sample(n, k_n, cfg.significance, cfg.seed)?;
    boot.resamples = cfg.resamples;

    let root = StreamKey::new(cfg.seed);
    let per_repetition = (0..cfg.repetitions)
        .map(|rep| {
            let rep_cfg = BootstrapConfig {
                seed: root.child(rep as u64).value(),
                ..boot
            };
            match classify_once(sample, &rep_cfg, &cone_fit, alpha_hat.inv_alpha_hat, cfg.precheck_width) {
                Ok(o) => Ok(Some(o)),
                Err(Error::InvalidRun { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let classes: Vec<DependenceClass> = per_repetition.iter().flatten().map(|o| o.class).collect();
    let failed = cfg.repetitions - classes.len();
    let vector = if failed as f64 > cfg.max_failed_repetitions * cfg.repetitions as f64 {
        None
    } else {
        Some(DependenceVector::from_classes(&classes)?)
    };
    Ok(Classification {
        vector,
        diagnostics: ClassificationDiagnostics {
            alpha_hat,
            cone_fit,
            k_n,
            m: boot.m,
            k_m: boot.k_m,
            per_repetition,
        },
    })
}
