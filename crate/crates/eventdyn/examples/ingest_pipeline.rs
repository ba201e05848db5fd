//! The ingest path end to end: parse a raw event CSV leniently (collecting
//! rejected lines), filter to sufficiently active countries, and export the
//! metrics table in the 19-column CSV schema.
//!
//! Run with `cargo run --example ingest_pipeline`.

use eventdyn::dynamics::compute_all_metrics;
use eventdyn::export::metrics_csv;
use eventdyn::ingest::{
    build_transactions, filter_countries, parse_events, EventFormat, ParseOptions,
};

const RAW: &str = "\
date,country,city,category
2019-01-07,US,Chicago,Music
2019-01-07,US,Chicago,Tech
2019-01-21,US,Boston,Music
2019-02-04,US,Chicago,Food & Drink
2019-02-18,US,Boston,Tech
2019-03-04,US,Chicago,Music
not-a-date,US,Chicago,Music
2019-01-09,FRA,Paris,Music
2019-01-09,FR,Paris,Music
2019-02-20,FR,Lyon,Tech
2019-03-06,FR,Paris,Music
2019-01-15,JP,Tokyo,Games
";

fn main() -> eventdyn::Result<()> {
    // Lenient parse: malformed lines are collected, not fatal.
    let parsed = parse_events(RAW.as_bytes(), &ParseOptions::new(EventFormat::Csv))?;
    println!(
        "parsed {} events, rejected {} line(s):",
        parsed.log.len(),
        parsed.rejected_total
    );
    for rejected in &parsed.rejected {
        println!("  line {}: {}", rejected.line, rejected.reason);
    }

    // Keep countries with at least 3 events, at most the 10 most active.
    let log = filter_countries(&parsed.log, 3, 10);
    let tables = build_transactions(&log);
    let kept: Vec<&str> = tables.keys().map(|c| c.as_str()).collect();
    println!("\nafter filtering (≥ 3 events): {kept:?}");

    let metrics = compute_all_metrics(&tables)?;
    println!("\nmetrics CSV:\n{}", metrics_csv(&metrics));
    Ok(())
}
