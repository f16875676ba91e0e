//! All pairs of a collection of assets, and the `matrix.json` / `matrix.csv`
//! outputs.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierConfig;
use crate::error::{param, Error, Result};
use crate::pipeline::pair::{classify_pair, estimate_asset, AssetEstimate, PairResult, PairStatus};
use crate::pipeline::prices::ReturnSeries;
use crate::threshold::ThresholdConfig;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    /// Threshold rule for each asset's own tail index.
    pub asset_threshold: ThresholdConfig,
    pub classifier: ClassifierConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetInfo {
    pub asset_id: String,
    pub market: String,
    pub sector: String,
    pub n: usize,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
}

/// Pairwise results. Each unordered pair is stored once, keyed by
/// `(asset_a, asset_b)` with `asset_a < asset_b`, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceMatrix {
    pub assets: Vec<AssetInfo>,
    pub pairs: Vec<PairResult>,
}

impl DependenceMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<&PairResult> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.pairs
            .binary_search_by(|p| (p.asset_a.as_str(), p.asset_b.as_str()).cmp(&key))
            .ok()
            .map(|i| &self.pairs[i])
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            assets: self.assets.clone(),
            pairs: self.pairs.iter().map(MatrixRecord::from).collect(),
        }
    }
}

/// One line of `matrix.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub asset_a: String,
    pub asset_b: String,
    pub alpha_a: Option<f64>,
    pub alpha_b: Option<f64>,
    pub a_hat: Option<f64>,
    pub b_hat: Option<f64>,
    /// `[independence, weak, strong, full]`.
    pub weights: Option<[f64; 4]>,
    pub status: PairStatus,
}

impl From<&PairResult> for MatrixRecord {
    fn from(p: &PairResult) -> Self {
        Self {
            asset_a: p.asset_a.clone(),
            asset_b: p.asset_b.clone(),
            alpha_a: p.alpha_a,
            alpha_b: p.alpha_b,
            a_hat: p.cone_fit.map(|f| f.cone.a()),
            b_hat: p.cone_fit.map(|f| f.cone.b()),
            weights: p.vector.map(|v| v.weights),
            status: p.status,
        }
    }
}

/// Contents of `matrix.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub assets: Vec<AssetInfo>,
    pub pairs: Vec<MatrixRecord>,
}

impl MatrixFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("matrix serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })
    }

    /// Flat export, one row per pair.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "asset_a", "asset_b", "alpha_a", "alpha_b", "a_hat", "b_hat", "w_independence",
            "w_weak", "w_strong", "w_full", "status",
        ])
        .expect("in-memory write");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.pairs {
            let w4 = r.weights.map(|w| w.map(|x| x.to_string()));
            let wcol = |i: usize| w4.as_ref().map(|w| w[i].clone()).unwrap_or_default();
            let status = match r.status {
                PairStatus::Ok => "ok",
                PairStatus::Unclassified => "unclassified",
            };
            w.write_record([
                r.asset_a.clone(),
                r.asset_b.clone(),
                opt(r.alpha_a),
                opt(r.alpha_b),
                opt(r.a_hat),
                opt(r.b_hat),
                wcol(0),
                wcol(1),
                wcol(2),
                wcol(3),
                status.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

/// Classifies every unordered pair of `assets`. Pair failures are recorded
/// as unclassified and never abort the run.
pub fn run_matrix(assets: &[ReturnSeries], cfg: &RunConfig) -> Result<DependenceMatrix> {
    if assets.len() < 2 {
        return Err(param("need at least two assets"));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = assets.iter().find(|a| !seen.insert(a.asset_id.as_str())) {
        return Err(param(format!("duplicate asset id {}", dup.asset_id)));
    }
    let mut order: Vec<&ReturnSeries> = assets.iter().collect();
    order.sort_by(|a, b| a.asset_id.cmp(&b.asset_id));

    let estimates: Vec<Result<AssetEstimate>> = order
        .iter()
        .map(|s| estimate_asset(s, &cfg.asset_threshold))
        .collect();

    let jobs: Vec<(usize, usize)> = (0..order.len())
        .flat_map(|i| (i + 1..order.len()).map(move |j| (i, j)))
        .collect();
    let run = |&(i, j): &(usize, usize)| {
        classify_pair(
            (order[i], &estimates[i]),
            (order[j], &estimates[j]),
            &cfg.classifier,
        )
    };
    #[cfg(feature = "parallel")]
    let pairs: Vec<PairResult> = {
        use rayon::prelude::*;
        jobs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let pairs: Vec<PairResult> = jobs.iter().map(run).collect();

    let assets = order
        .iter()
        .zip(&estimates)
        .map(|(s, e)| AssetInfo {
            asset_id: s.asset_id.clone(),
            market: s.market.clone(),
            sector: s.sector.clone(),
            n: s.len(),
            k: e.as_ref().ok().map(|e| e.selection.k_used),
            alpha: e.as_ref().ok().map(|e| e.tail.alpha_hat),
        })
        .collect();
    Ok(DependenceMatrix { assets, pairs })
}
