//! Correlates dynamics features against external per-country indicators
//! with optional log10 transforms, Pearson r, two-sided p-values, and
//! significance stars.
//!
//! Run with `cargo run --example correlations`.

use eventdyn::dynamics::compute_all_metrics;
use eventdyn::indicators::IndicatorTable;
use eventdyn::ingest::build_transactions;
use eventdyn::stats::{correlate_all, CorrelationSpec, Transform};
use eventdyn::synth::{generate, SynthSpec};

fn main() -> eventdyn::Result<()> {
    // Twelve countries whose event volume rises with a made-up "wealth"
    // indicator; diversity is unrelated to it.
    let mut countries = Vec::new();
    let mut wealth = Vec::new();
    for i in 0..12 {
        let code = format!("A{}", (b'A' + i as u8) as char);
        let w = 10.0 + 8.0 * i as f64;
        wealth.push((code.clone(), w));
        countries.push(format!(
            r#"{{"code": "{code}", "n_events": {n},
                "gap_distribution": {{"kind": "geometric", "p": 0.4}},
                "category_weights": [
                    {{"category": "Music", "weight": 0.5}},
                    {{"category": "Tech", "weight": 0.3}},
                    {{"category": "Outdoors", "weight": 0.2}}]}}"#,
            n = 200 + 300 * i,
        ));
    }
    let spec = SynthSpec::from_json(&format!(
        r#"{{"seed": 5, "countries": [{}]}}"#,
        countries.join(",")
    ))?;
    let tables = build_transactions(&generate(&spec)?);
    let metrics = compute_all_metrics(&tables)?;

    let mut indicators = IndicatorTable::new(vec!["wealth".into()])?;
    for (code, w) in &wealth {
        indicators.insert_row(eventdyn::ingest::CountryCode::new(code)?, vec![Some(*w)])?;
    }

    let pairs = vec![
        CorrelationSpec {
            feature: "tec".into(),
            indicator: "wealth".into(),
            transform_feature: Transform::Log10,
            transform_indicator: Transform::Log10,
        },
        CorrelationSpec {
            feature: "d_cat".into(),
            indicator: "wealth".into(),
            transform_feature: Transform::Identity,
            transform_indicator: Transform::Identity,
        },
        CorrelationSpec {
            feature: "beta".into(),
            indicator: "wealth".into(),
            transform_feature: Transform::Identity,
            transform_indicator: Transform::Identity,
        },
    ];
    let report = correlate_all(&metrics, &indicators, &pairs)?;

    println!(
        "{:<22} {:>4} {:>8} {:>10} {:>5}",
        "pair", "n", "r", "p", ""
    );
    for result in &report.results {
        println!(
            "{:<22} {:>4} {:>8.4} {:>10.6} {:>5}",
            format!("{} ~ {}", result.feature, result.indicator),
            result.n,
            result.r,
            result.p.unwrap_or(f64::NAN),
            result.stars(),
        );
    }
    for warning in &report.warnings {
        println!("note: {warning}");
    }
    Ok(())
}
