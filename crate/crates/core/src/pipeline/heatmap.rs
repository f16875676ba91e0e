//! Upper-triangular SVG heatmap of a dependence matrix, grouped by market
//! and sector.
//!
//! Full dependence is blue, strong yellow, weak gray and independence white.
//! A cell mixes the dependent colours in proportion to their weights and
//! fades toward white as the largest dependent weight drops, so a pair the
//! repetitions agree on is drawn at full strength. Unclassified pairs are
//! hatched.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::matrix::MatrixFile;
use crate::pipeline::pair::PairStatus;

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLUE: Rgb = [31, 78, 196];
pub const YELLOW: Rgb = [242, 196, 15];
pub const GRAY: Rgb = [128, 128, 128];

const CELL: f64 = 16.0;
const LABEL: f64 = 120.0;
const GROUP: f64 = 150.0;
const LEGEND: f64 = 70.0;

/// Grouping of one asset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorMeta {
    pub asset_id: String,
    pub market: String,
    pub sector: String,
}

pub fn load_meta(path: impl AsRef<Path>) -> Result<Vec<SectorMeta>> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_meta(file)
}

/// Reads `asset_id,market,sector` rows.
pub fn read_meta(reader: impl Read) -> Result<Vec<SectorMeta>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(["asset_id", "market", "sector"]) {
        return Err(Error::Parse {
            line: 1,
            message: "header must be `asset_id,market,sector`".into(),
        });
    }
    rdr.deserialize()
        .map(|row| {
            row.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })
        })
        .collect()
}

/// Colour of a cell with weights `[independence, weak, strong, full]`.
pub fn cell_color(weights: [f64; 4]) -> Rgb {
    let [_, weak, strong, full] = weights;
    let dependent = weak + strong + full;
    if dependent <= 0.0 {
        return WHITE;
    }
    let strength = weak.max(strong).max(full);
    let mut out = [0u8; 3];
    for (c, slot) in out.iter_mut().enumerate() {
        let hue = (weak * f64::from(GRAY[c]) + strong * f64::from(YELLOW[c]) + full * f64::from(BLUE[c]))
            / dependent;
        let v = (1.0 - strength) * f64::from(WHITE[c]) + strength * hue;
        *slot = v.round().clamp(0.0, 255.0) as u8;
    }
    out
}

fn hex(c: Rgb) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders the matrix as an SVG document. Every asset in the matrix must
/// appear in `meta`.
pub fn render_heatmap(matrix: &MatrixFile, meta: &[SectorMeta]) -> Result<String> {
    let by_id: HashMap<&str, &SectorMeta> = meta.iter().map(|m| (m.asset_id.as_str(), m)).collect();
    let mut ids: Vec<&str> = matrix.assets.iter().map(|a| a.asset_id.as_str()).collect();
    for p in &matrix.pairs {
        ids.push(&p.asset_a);
        ids.push(&p.asset_b);
    }
    ids.sort_unstable();
    ids.dedup();
    let mut order: Vec<&SectorMeta> = ids
        .iter()
        .map(|id| {
            by_id
                .get(id)
                .copied()
                .ok_or_else(|| Error::Metadata(format!("asset {id} missing from sector metadata")))
        })
        .collect::<Result<_>>()?;
    order.sort_by(|a, b| {
        (&a.market, &a.sector, &a.asset_id).cmp(&(&b.market, &b.sector, &b.asset_id))
    });
    let pos: HashMap<&str, usize> = order
        .iter()
        .enumerate()
        .map(|(i, m)| (m.asset_id.as_str(), i))
        .collect();

    let n = order.len();
    let x0 = GROUP + LABEL;
    let y0 = LABEL;
    let side = n as f64 * CELL;
    let width = x0 + side + 20.0;
    let height = y0 + side + LEGEND;

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    )
    .unwrap();
    writeln!(
        w,
        r##"<defs><pattern id="hatch" width="4" height="4" patternUnits="userSpaceOnUse" patternTransform="rotate(45)"><rect width="4" height="4" fill="#ffffff"/><line x1="0" y1="0" x2="0" y2="4" stroke="#c0392b" stroke-width="1.5"/></pattern></defs>"##
    )
    .unwrap();
    writeln!(w, r##"<rect width="{width}" height="{height}" fill="#ffffff"/>"##).unwrap();

    for (i, m) in order.iter().enumerate() {
        let y = y0 + (i as f64 + 0.5) * CELL;
        let x = x0 + (i as f64 + 0.5) * CELL;
        let id = escape(&m.asset_id);
        writeln!(w, r#"<text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{id}</text>"#, x0 - 4.0).unwrap();
        writeln!(
            w,
            r#"<text x="{x}" y="{}" transform="rotate(-90 {x} {})" dominant-baseline="middle">{id}</text>"#,
            y0 - 4.0,
            y0 - 4.0
        )
        .unwrap();
    }

    // cells
    let mut cells: Vec<(usize, usize, String, String)> = matrix
        .pairs
        .iter()
        .map(|p| {
            let (i, j) = (pos[p.asset_a.as_str()], pos[p.asset_b.as_str()]);
            let (r, c) = if i < j { (i, j) } else { (j, i) };
            let fill = match (p.status, p.weights) {
                (PairStatus::Ok, Some(wts)) => hex(cell_color(wts)),
                _ => "url(#hatch)".to_string(),
            };
            let title = match p.weights {
                Some(wt) => format!(
                    "{} / {}: ind {:.2} weak {:.2} strong {:.2} full {:.2}",
                    p.asset_a, p.asset_b, wt[0], wt[1], wt[2], wt[3]
                ),
                None => format!("{} / {}: unclassified", p.asset_a, p.asset_b),
            };
            (r, c, fill, escape(&title))
        })
        .collect();
    cells.sort();
    for (r, c, fill, title) in cells {
        writeln!(
            w,
            r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#dddddd" stroke-width="0.5"><title>{title}</title></rect>"##,
            x0 + c as f64 * CELL,
            y0 + r as f64 * CELL
        )
        .unwrap();
    }
    for i in 0..n {
        writeln!(
            w,
            r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#f4f4f4"/>"##,
            x0 + i as f64 * CELL,
            y0 + i as f64 * CELL
        )
        .unwrap();
    }

    // group rules and labels
    let mut start = 0;
    for i in 1..=n {
        let boundary = i == n
            || order[i].market != order[start].market
            || order[i].sector != order[start].sector;
        if !boundary {
            continue;
        }
        let label = escape(&format!("{} / {}", order[start].market, order[start].sector));
        let mid = y0 + (start + i) as f64 * CELL / 2.0;
        writeln!(w, r#"<text x="4" y="{mid}" dominant-baseline="middle" font-weight="bold">{label}</text>"#).unwrap();
        if i < n {
            let market_change = order[i].market != order[i - 1].market;
            let stroke = if market_change { 2.0 } else { 1.0 };
            let at = i as f64 * CELL;
            writeln!(
                w,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#222222" stroke-width="{stroke}"/>"##,
                GROUP,
                y0 + at,
                x0 + side,
                y0 + at
            )
            .unwrap();
            writeln!(
                w,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#222222" stroke-width="{stroke}"/>"##,
                x0 + at,
                y0,
                x0 + at,
                y0 + side
            )
            .unwrap();
        }
        start = i;
    }
    writeln!(
        w,
        r##"<rect x="{x0}" y="{y0}" width="{side}" height="{side}" fill="none" stroke="#222222" stroke-width="1"/>"##
    )
    .unwrap();

    // legend
    let ly = y0 + side + 25.0;
    let entries = [
        ("full", hex(BLUE)),
        ("strong", hex(YELLOW)),
        ("weak", hex(GRAY)),
        ("independence", hex(WHITE)),
        ("unclassified", "url(#hatch)".to_string()),
    ];
    for (idx, (name, fill)) in entries.iter().enumerate() {
        let lx = x0 + idx as f64 * 95.0;
        writeln!(
            w,
            r##"<rect x="{lx}" y="{ly}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#999999"/><text x="{}" y="{}" dominant-baseline="middle">{name}</text>"##,
            lx + CELL + 4.0,
            ly + CELL / 2.0
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::matrix::{AssetInfo, MatrixRecord};

    fn meta(id: &str, market: &str, sector: &str) -> SectorMeta {
        SectorMeta {
            asset_id: id.into(),
            market: market.into(),
            sector: sector.into(),
        }
    }

    fn record(a: &str, b: &str, w: Option<[f64; 4]>) -> MatrixRecord {
        MatrixRecord {
            asset_a: a.into(),
            asset_b: b.into(),
            alpha_a: Some(2.0),
            alpha_b: Some(2.0),
            a_hat: Some(0.3),
            b_hat: Some(0.6),
            weights: w,
            status: if w.is_some() { PairStatus::Ok } else { PairStatus::Unclassified },
        }
    }

    fn asset(id: &str) -> AssetInfo {
        AssetInfo {
            asset_id: id.into(),
            market: String::new(),
            sector: String::new(),
            n: 0,
            k: None,
            alpha: None,
        }
    }

    #[test]
    fn colour_examples() {
        assert_eq!(cell_color([0.0, 0.0, 0.0, 1.0]), BLUE);
        assert_eq!(cell_color([1.0, 0.0, 0.0, 0.0]), WHITE);
        assert_eq!(cell_color([0.0, 0.0, 1.0, 0.0]), YELLOW);
        assert_eq!(cell_color([0.0, 1.0, 0.0, 0.0]), GRAY);
        // equal yellow/blue mix, half strength
        let half = cell_color([0.0, 0.0, 0.5, 0.5]);
        for c in 0..3 {
            let mix = (f64::from(YELLOW[c]) + f64::from(BLUE[c])) / 2.0;
            let expect = (0.5 * 255.0 + 0.5 * mix).round() as u8;
            assert_eq!(half[c], expect);
        }
    }

    #[test]
    fn lighter_when_less_consistent() {
        let strong = cell_color([0.0, 0.0, 0.0, 0.9]);
        let weak = cell_color([0.6, 0.0, 0.0, 0.4]);
        assert!(weak.iter().zip(strong).all(|(w, s)| *w >= s));
    }

    #[test]
    fn renders_grouped_upper_triangle() {
        let file = MatrixFile {
            assets: vec![asset("A"), asset("B"), asset("C")],
            pairs: vec![
                record("A", "B", Some([0.0, 0.0, 0.0, 1.0])),
                record("A", "C", Some([1.0, 0.0, 0.0, 0.0])),
                record("B", "C", None),
            ],
        };
        let m = [meta("C", "CN", "Energy"), meta("A", "US", "Tech"), meta("B", "CN", "Energy")];
        let svg = render_heatmap(&file, &m).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(&hex(BLUE)));
        assert!(svg.contains("url(#hatch)"));
        assert!(svg.contains("CN / Energy") && svg.contains("US / Tech"));
        // B sorts before C inside CN / Energy, A comes last
        let b = svg.find(">B</text>").unwrap();
        let c = svg.find(">C</text>").unwrap();
        let a = svg.find(">A</text>").unwrap();
        assert!(b < c && c < a);
        assert_eq!(svg, render_heatmap(&file, &m).unwrap());
    }

    #[test]
    fn unknown_asset_is_metadata_error() {
        let file = MatrixFile {
            assets: vec![],
            pairs: vec![record("A", "B", Some([0.0, 0.0, 0.0, 1.0]))],
        };
        let err = render_heatmap(&file, &[meta("A", "US", "T")]).unwrap_err();
        assert!(matches!(err, Error::Metadata(_)));
    }

    #[test]
    fn meta_parsing() {
        let m = read_meta("asset_id,market,sector\nA,US,Tech\nB,CN,Energy\n".as_bytes()).unwrap();
        assert_eq!(m[1], meta("B", "CN", "Energy"));
        assert!(read_meta("id,market,sector\n".as_bytes()).is_err());
    }
}
