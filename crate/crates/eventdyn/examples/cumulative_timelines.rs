//! Cumulative per-category event timelines on a shared monthly grid,
//! grouped by country and then rolled up by continent with the bundled
//! country→continent map.
//!
//! Run with `cargo run --example cumulative_timelines`.

use eventdyn::reference::ContinentMap;
use eventdyn::synth::{generate, SynthSpec};
use eventdyn::timeline::{cumulative_category_timeline, Grouping};

fn main() -> eventdyn::Result<()> {
    let spec = SynthSpec::from_json(
        r#"{
            "seed": 21,
            "start_date": "2019-01-01",
            "countries": [
                {"code": "US", "n_events": 600,
                 "gap_distribution": {"kind": "geometric", "p": 0.25},
                 "category_weights": [
                    {"category": "Tech", "weight": 0.6},
                    {"category": "Music", "weight": 0.4}]},
                {"code": "CA", "n_events": 300,
                 "gap_distribution": {"kind": "geometric", "p": 0.25},
                 "category_weights": [
                    {"category": "Tech", "weight": 0.5},
                    {"category": "Music", "weight": 0.5}]},
                {"code": "FR", "n_events": 450,
                 "gap_distribution": {"kind": "geometric", "p": 0.25},
                 "category_weights": [
                    {"category": "Music", "weight": 0.7},
                    {"category": "Tech", "weight": 0.3}]}
            ]
        }"#,
    )?;
    let log = generate(&spec)?;

    let by_country = cumulative_category_timeline(&log, Grouping::Country)?;
    println!("per-country series (months on each country's own span):");
    for series in &by_country.series {
        let (first_year, first_month) = series.months[0];
        let total = *series.cumulative.last().unwrap();
        println!(
            "  {:<14} {:<8} {} months from {first_year}-{first_month:02}, final total {total}",
            series.group,
            series.category,
            series.months.len(),
        );
    }

    let map = ContinentMap::builtin();
    let by_continent = cumulative_category_timeline(&log, Grouping::Continent(map))?;
    println!("\ncontinent roll-up:");
    for series in &by_continent.series {
        let last_z = *series.zscores.last().unwrap();
        println!(
            "  {:<14} {:<8} final total {:>4}, final z = {last_z:.3}",
            series.group,
            series.category,
            series.cumulative.last().unwrap(),
        );
    }

    // A cumulative series always ends above its own mean.
    assert!(by_continent.series.iter().all(|s| *s.zscores.last().unwrap() > 0.0));
    println!("\n(no countries excluded: {:?})", by_continent.excluded_countries);
    Ok(())
}
