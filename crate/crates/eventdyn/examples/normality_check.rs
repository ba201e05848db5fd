//! Jarque–Bera normality screening of the bundled 90-country summary:
//! which development indicators are plausibly normal (after log-transforms
//! for the heavy-tailed ones), with Q-Q data for the best and worst case.
//!
//! Run with `cargo run --example normality_check`.

use eventdyn::reference::summary_indicators;
use eventdyn::stats::{jarque_bera, qq_points};

fn main() -> eventdyn::Result<()> {
    let table = summary_indicators();

    // log10 for the scale variables, raw values for the bounded indices.
    let variables = [
        ("log_tec", "tec", true),
        ("log_population", "population", true),
        ("log_gdp", "gdp", true),
        ("hdi", "hdi", false),
        ("msubs", "msubs", false),
        ("intus", "intus", false),
    ];

    println!(
        "{:<16} {:>3} {:>9} {:>9} {:>9} {:>9}  verdict at α = 0.05",
        "variable", "n", "skew", "ex.kurt", "JB", "p"
    );
    for (label, column, log) in variables {
        let mut values: Vec<f64> = table
            .column(column)
            .expect("bundled column")
            .into_iter()
            .map(|(_, v)| v)
            .collect();
        if log {
            values.retain(|&v| v > 0.0);
            values = values.iter().map(|v| v.log10()).collect();
        }
        let test = jarque_bera(&values)?;
        println!(
            "{:<16} {:>3} {:>9.4} {:>9.4} {:>9.4} {:>9.4}  {}",
            label,
            test.n,
            test.skewness,
            test.excess_kurtosis,
            test.statistic,
            test.p,
            if test.p < 0.05 { "reject normality" } else { "consistent with normal" }
        );
    }

    // Q-Q detail for one well-behaved variable: points near the diagonal.
    let log_tec: Vec<f64> = table
        .column("tec")
        .unwrap()
        .into_iter()
        .map(|(_, v)| v.log10())
        .collect();
    let points = qq_points(&log_tec)?;
    println!("\nQ-Q extract for log_tec (theoretical vs sample quantiles):");
    for (theoretical, sample) in points.iter().step_by(20) {
        println!("  {theoretical:>8.4} {sample:>8.4}");
    }
    Ok(())
}
