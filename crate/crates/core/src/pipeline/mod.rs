//! From a long-format price file to a pairwise dependence matrix and heatmap.

pub mod heatmap;
pub mod matrix;
pub mod pair;
pub mod prices;

use crate::error::Result;
use prices::{abs_log_returns, every_other_day, PriceTable, ReturnSeries};

/// Subsamples every other trading day starting at `offset` and takes
/// absolute log returns of each asset. An asset left with fewer than two
/// prices gets an empty series, so its pairs end up unclassified instead of
/// failing the run.
pub fn prepare_returns(table: &PriceTable, offset: usize) -> Result<Vec<ReturnSeries>> {
    table
        .series
        .iter()
        .map(|s| {
            let sub = every_other_day(s, offset)?;
            Ok(abs_log_returns(&sub).unwrap_or_else(|_| ReturnSeries {
                asset_id: sub.asset_id.clone(),
                sector: sub.sector.clone(),
                market: sub.market.clone(),
                points: Vec::new(),
            }))
        })
        .collect()
}
