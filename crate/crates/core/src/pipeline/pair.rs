//! One asset pair: standardize the tails, align the dates, classify.

use serde::{Deserialize, Serialize};

use crate::classifier::{classify_repeated, ClassifierConfig, DependenceVector};
use crate::error::{Error, Result};
use crate::pipeline::prices::ReturnSeries;
use crate::polar::{to_polar_sample, BivariateObservation};
use crate::stats::ConeFit;
use crate::stream::StreamKey;
use crate::tail::{hill_alpha_series, power_transform, TailIndexEstimate};
use crate::threshold::{select_threshold, ThresholdConfig, ThresholdSelection};

/// Tail index of one asset's return magnitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetEstimate {
    pub asset_id: String,
    pub n: usize,
    pub selection: ThresholdSelection,
    pub tail: TailIndexEstimate,
}

pub fn estimate_asset(series: &ReturnSeries, cfg: &ThresholdConfig) -> Result<AssetEstimate> {
    let values = series.values();
    let selection = select_threshold(&values, cfg)?;
    let tail = hill_alpha_series(&values, selection.k_used)?;
    Ok(AssetEstimate {
        asset_id: series.asset_id.clone(),
        n: values.len(),
        selection,
        tail,
    })
}

/// Inner join on date; `x` from `a`, `y` from `b`, ascending dates.
pub fn align_pair(a: &ReturnSeries, b: &ReturnSeries) -> Vec<BivariateObservation> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.points.len() && j < b.points.len() {
        let (da, xa) = a.points[i];
        let (db, yb) = b.points[j];
        match da.cmp(&db) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(BivariateObservation { x: xa, y: yb });
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairStatus {
    Ok,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    /// The lexicographically smaller id; its returns are the `x` coordinate.
    pub asset_a: String,
    pub asset_b: String,
    pub alpha_a: Option<f64>,
    pub alpha_b: Option<f64>,
    pub alpha_bar: Option<f64>,
    /// Joint observations with a positive radius.
    pub n_obs: usize,
    pub k_n: Option<usize>,
    pub cone_fit: Option<ConeFit>,
    pub vector: Option<DependenceVector>,
    pub status: PairStatus,
    /// Why the pair is unclassified.
    pub note: Option<String>,
}

impl PairResult {
    fn unclassified(a: &str, b: &str, note: String) -> Self {
        Self {
            asset_a: a.to_string(),
            asset_b: b.to_string(),
            alpha_a: None,
            alpha_b: None,
            alpha_bar: None,
            n_obs: 0,
            k_n: None,
            cone_fit: None,
            vector: None,
            status: PairStatus::Unclassified,
            note: Some(note),
        }
    }
}

/// Seed for a pair, independent of argument order.
pub fn pair_key(seed: u64, a: &str, b: &str) -> StreamKey {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    StreamKey::new(seed).child_str(&format!("{lo}\u{1f}{hi}"))
}

/// Classifies one pair. Failures become an unclassified result.
pub fn classify_pair(
    a: (&ReturnSeries, &Result<AssetEstimate>),
    b: (&ReturnSeries, &Result<AssetEstimate>),
    cfg: &ClassifierConfig,
) -> PairResult {
    let (a, b) = if a.0.asset_id <= b.0.asset_id { (a, b) } else { (b, a) };
    let (ida, idb) = (a.0.asset_id.as_str(), b.0.asset_id.as_str());
    let (est_a, est_b) = match (a.1, b.1) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => {
            return PairResult::unclassified(ida, idb, format!("tail estimate failed: {e}"))
        }
    };
    let mut res = match classify_standardized(a.0, b.0, est_a, est_b, cfg) {
        Ok(r) => r,
        Err(e) => PairResult::unclassified(ida, idb, e.to_string()),
    };
    res.alpha_a = Some(est_a.tail.alpha_hat);
    res.alpha_b = Some(est_b.tail.alpha_hat);
    res.alpha_bar = Some(0.5 * (est_a.tail.alpha_hat + est_b.tail.alpha_hat));
    res
}

fn classify_standardized(
    a: &ReturnSeries,
    b: &ReturnSeries,
    est_a: &AssetEstimate,
    est_b: &AssetEstimate,
    cfg: &ClassifierConfig,
) -> Result<PairResult> {
    let alpha_bar = 0.5 * (est_a.tail.alpha_hat + est_b.tail.alpha_hat);
    let standardize = |s: &ReturnSeries, alpha: f64| -> Result<ReturnSeries> {
        let values = power_transform(&s.values(), alpha, alpha_bar)?;
        Ok(ReturnSeries {
            points: s.points.iter().zip(values).map(|((d, _), v)| (*d, v)).collect(),
            ..s.clone()
        })
    };
    let joint = align_pair(
        &standardize(a, est_a.tail.alpha_hat)?,
        &standardize(b, est_b.tail.alpha_hat)?,
    );
    if joint.is_empty() {
        return Err(Error::EmptySeries("no common dates".into()));
    }
    let (sample, _) = to_polar_sample(&joint);
    let pair_cfg = ClassifierConfig {
        seed: pair_key(cfg.seed, &a.asset_id, &b.asset_id).value(),
        ..*cfg
    };
    let cls = classify_repeated(&sample, &pair_cfg)?;
    let status = if cls.vector.is_some() {
        PairStatus::Ok
    } else {
        PairStatus::Unclassified
    };
    Ok(PairResult {
        asset_a: a.asset_id.clone(),
        asset_b: b.asset_id.clone(),
        alpha_a: None,
        alpha_b: None,
        alpha_bar: Some(alpha_bar),
        n_obs: sample.len(),
        k_n: Some(cls.diagnostics.k_n),
        cone_fit: Some(cls.diagnostics.cone_fit),
        vector: cls.vector,
        status,
        note: (status == PairStatus::Unclassified)
            .then(|| "too many invalid bootstrap repetitions".to_string()),
    })
}
