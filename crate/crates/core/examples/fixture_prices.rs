//! Writes the six-asset synthetic price file and its sector file.
//!
//! cargo run --example fixture_prices -- prices.csv sectors.csv [seed]

use std::error::Error;

use extremaldep::pipeline::prices::write_prices;
use extremaldep::stream::StreamKey;
use extremaldep::synth::engineered_panel;

fn main() -> Result<(), Box<dyn Error>> {
    let mut args = std::env::args().skip(1);
    let prices_path = args.next().ok_or("missing prices path")?;
    let meta_path = args.next().ok_or("missing sectors path")?;
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2024);

    let panel = engineered_panel(822, StreamKey::new(seed))?;
    std::fs::write(prices_path, write_prices(&panel))?;
    let mut meta = String::from("asset_id,market,sector\n");
    for s in &panel {
        meta.push_str(&format!("{},{},{}\n", s.asset_id, s.market, s.sector));
    }
    std::fs::write(meta_path, meta)?;
    Ok(())
}
