//! Long-format price files, every-other-day subsampling and absolute log returns.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PRICE_HEADER: [&str; 5] = ["asset_id", "market", "sector", "date", "adjusted_close"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub asset_id: String,
    pub sector: String,
    pub market: String,
    /// Strictly increasing dates, positive prices.
    pub points: Vec<(NaiveDate, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub asset_id: String,
    pub sector: String,
    pub market: String,
    /// `|log(P_t / P_{t-1})|`, dated by the later price.
    pub points: Vec<(NaiveDate, f64)>,
}

impl ReturnSeries {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|(_, v)| *v).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Parsed price file.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceTable {
    /// In order of first appearance in the file.
    pub series: Vec<PriceSeries>,
    /// Rows dropped for a missing or non-positive price.
    pub dropped_rows: usize,
}

pub fn load_prices(path: impl AsRef<Path>) -> Result<PriceTable> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_prices(file)
}

/// Parses `asset_id,market,sector,date,adjusted_close` rows.
pub fn read_prices(reader: impl Read) -> Result<PriceTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if header.iter().ne(PRICE_HEADER) {
        return Err(parse_err(
            1,
            format!("header must be `{}`", PRICE_HEADER.join(",")),
        ));
    }

    let mut series: Vec<PriceSeries> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut dropped_rows = 0;
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let (asset, market, sector, date, price) = (&row[0], &row[1], &row[2], &row[3], &row[4]);
        if asset.is_empty() {
            return Err(parse_err(line, "empty asset_id"));
        }
        let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|e| parse_err(line, format!("bad date `{date}`: {e}")))?;
        if price.is_empty() {
            dropped_rows += 1;
            continue;
        }
        let price: f64 = price
            .parse()
            .map_err(|_| parse_err(line, format!("bad price `{price}`")))?;
        if !(price > 0.0 && price.is_finite()) {
            dropped_rows += 1;
            continue;
        }
        let slot = *index.entry(asset.to_string()).or_insert_with(|| {
            series.push(PriceSeries {
                asset_id: asset.to_string(),
                sector: sector.to_string(),
                market: market.to_string(),
                points: Vec::new(),
            });
            series.len() - 1
        });
        let s = &mut series[slot];
        if s.market != market || s.sector != sector {
            return Err(parse_err(
                line,
                format!("asset {asset} changes market/sector"),
            ));
        }
        s.points.push((date, price));
    }

    for s in &mut series {
        s.points.sort_by_key(|(d, _)| *d);
        if let Some(w) = s.points.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Parse {
                line: 0,
                message: format!("asset {} has two prices on {}", s.asset_id, w[0].0),
            });
        }
    }
    Ok(PriceTable {
        series,
        dropped_rows,
    })
}

/// Long-format CSV of `series`, in order, with the standard header.
pub fn write_prices(series: &[PriceSeries]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PRICE_HEADER).expect("in-memory write");
    for s in series {
        for (date, price) in &s.points {
            w.write_record([
                s.asset_id.as_str(),
                s.market.as_str(),
                s.sector.as_str(),
                &date.to_string(),
                &price.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Keeps positions `offset, offset + 2, ...` of the date-sorted series.
pub fn every_other_day(series: &PriceSeries, offset: usize) -> Result<PriceSeries> {
    if offset > 1 {
        return Err(crate::error::param(format!("offset {offset} must be 0 or 1")));
    }
    Ok(PriceSeries {
        points: series.points.iter().skip(offset).step_by(2).copied().collect(),
        ..series.clone()
    })
}

pub fn abs_log_returns(series: &PriceSeries) -> Result<ReturnSeries> {
    if series.points.len() < 2 {
        return Err(Error::EmptySeries(format!(
            "{} has {} prices, need 2",
            series.asset_id,
            series.points.len()
        )));
    }
    let points = series
        .points
        .windows(2)
        .map(|w| (w[1].0, (w[1].1 / w[0].1).ln().abs()))
        .collect();
    Ok(ReturnSeries {
        asset_id: series.asset_id.clone(),
        sector: series.sector.clone(),
        market: series.market.clone(),
        points,
    })
}
