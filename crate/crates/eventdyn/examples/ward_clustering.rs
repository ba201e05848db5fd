//! Ward-clusters countries on their z-scored category-rank profiles and
//! walks the dendrogram: two planted taste groups separate at the top split.
//!
//! Run with `cargo run --example ward_clustering`.

use eventdyn::cluster::{cut_dendrogram, euclidean_distances, ward_cluster};
use eventdyn::dynamics::compute_all_metrics;
use eventdyn::ingest::build_transactions;
use eventdyn::prevalence::{
    build_rank_matrix, select_countries, top_k_union, zscore_ranks, CategoryCounts, ZscoreAxis,
};
use eventdyn::synth::{generate, SynthSpec};

fn main() -> eventdyn::Result<()> {
    // Six countries, two planted groups: US/GB/CA lean Tech+Games,
    // FR/IT/ES lean Food+Music.
    let mut countries = Vec::new();
    for (code, tech) in [
        ("US", 0.7), ("GB", 0.65), ("CA", 0.6),
        ("FR", 0.3), ("IT", 0.25), ("ES", 0.35),
    ] {
        countries.push(format!(
            r#"{{"code": "{code}", "n_events": 2500,
                "gap_distribution": {{"kind": "geometric", "p": 0.45}},
                "category_weights": [
                    {{"category": "Tech", "weight": {w1}}},
                    {{"category": "Games", "weight": {w2}}},
                    {{"category": "Food & Drink", "weight": {w3}}},
                    {{"category": "Music", "weight": {w4}}}]}}"#,
            w1 = tech * 0.6,
            w2 = tech * 0.4,
            w3 = (1.0 - tech) * 0.55,
            w4 = (1.0 - tech) * 0.45,
        ));
    }
    let spec = SynthSpec::from_json(&format!(
        r#"{{"seed": 12, "countries": [{}]}}"#,
        countries.join(",")
    ))?;

    let tables = build_transactions(&generate(&spec)?);
    let metrics = compute_all_metrics(&tables)?;
    let selected = select_countries(&metrics, 4);
    let counts: CategoryCounts = selected
        .iter()
        .map(|&code| (code, tables[&code].category_counts()))
        .collect();
    let matrix = build_rank_matrix(&counts, &top_k_union(&counts, 4))?;
    let z = zscore_ranks(&matrix, ZscoreAxis::Category);

    let distances = euclidean_distances(&matrix.countries, &z)?;
    let dendrogram = ward_cluster(&distances)?;

    println!("merge sequence (leaf ids 0..{}, merge t creates id {}+t):",
        dendrogram.n_leaves - 1, dendrogram.n_leaves);
    for (t, merge) in dendrogram.merges.iter().enumerate() {
        println!(
            "  step {t}: {:>2} + {:>2}  height {:.3}  size {}",
            merge.left, merge.right, merge.height, merge.size
        );
    }

    for k in [2, 3] {
        let cut = cut_dendrogram(&dendrogram, &matrix.countries, k)?;
        print!("\nk = {k}:");
        for id in 1..=k as u32 {
            let members: Vec<&str> = cut
                .labels
                .iter()
                .zip(&cut.cluster_ids)
                .filter(|(_, &c)| c == id)
                .map(|(l, _)| l.as_str())
                .collect();
            print!("  cluster {id} = {members:?}");
        }
        println!();
    }
    Ok(())
}
