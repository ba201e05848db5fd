//! Builds the category-prevalence rank matrix: each selected country ranks
//! the union of everyone's top-k categories, with absent categories pinned
//! at a shared sentinel rank, then z-scores the ranks per category.
//!
//! Run with `cargo run --example rank_matrix`.

use eventdyn::dynamics::compute_all_metrics;
use eventdyn::ingest::build_transactions;
use eventdyn::prevalence::{
    build_rank_matrix, select_countries, top_k_union, zscore_ranks, CategoryCounts, ZscoreAxis,
};
use eventdyn::synth::{generate, SynthSpec};

fn main() -> eventdyn::Result<()> {
    let spec = SynthSpec::from_json(
        r#"{
            "seed": 3,
            "countries": [
                {"code": "US", "n_events": 3000,
                 "gap_distribution": {"kind": "geometric", "p": 0.5},
                 "category_weights": [
                    {"category": "Tech", "weight": 0.45},
                    {"category": "Music", "weight": 0.25},
                    {"category": "Games", "weight": 0.2},
                    {"category": "Outdoors", "weight": 0.1}]},
                {"code": "FR", "n_events": 2000,
                 "gap_distribution": {"kind": "geometric", "p": 0.5},
                 "category_weights": [
                    {"category": "Food & Drink", "weight": 0.4},
                    {"category": "Music", "weight": 0.35},
                    {"category": "Tech", "weight": 0.15},
                    {"category": "Outdoors", "weight": 0.1}]},
                {"code": "BR", "n_events": 1500,
                 "gap_distribution": {"kind": "geometric", "p": 0.5},
                 "category_weights": [
                    {"category": "Music", "weight": 0.5},
                    {"category": "Outdoors", "weight": 0.3},
                    {"category": "Food & Drink", "weight": 0.2}]}
            ]
        }"#,
    )?;
    let tables = build_transactions(&generate(&spec)?);
    let metrics = compute_all_metrics(&tables)?;

    // Keep countries with at least 3 distinct categories, most active first.
    let selected = select_countries(&metrics, 3);
    let counts: CategoryCounts = selected
        .iter()
        .map(|&code| (code, tables[&code].category_counts()))
        .collect();

    let union = top_k_union(&counts, 3);
    let matrix = build_rank_matrix(&counts, &union)?;
    println!("union of per-country top-3 categories, most events first:");
    println!("  {:?}\n", matrix.categories);

    println!("ranks (1 = most prevalent, {} = absent):", matrix.sentinel_rank);
    print!("{:<8}", "");
    for cat in &matrix.categories {
        print!("{:>14}", cat);
    }
    println!();
    for (country, row) in matrix.countries.iter().zip(&matrix.ranks) {
        print!("{:<8}", country);
        for rank in row {
            print!("{rank:>14}");
        }
        println!();
    }

    let z = zscore_ranks(&matrix, ZscoreAxis::Category);
    println!("\nper-category z-scores (negative = ranked higher than peers):");
    for (country, row) in matrix.countries.iter().zip(&z) {
        print!("{:<8}", country);
        for v in row {
            print!("{v:>14.3}");
        }
        println!();
    }
    Ok(())
}
