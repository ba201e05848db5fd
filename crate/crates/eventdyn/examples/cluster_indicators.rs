//! Tests whether an external indicator separates clusters: one-way ANOVA
//! across all clusters, Wilcoxon rank-sum per cluster pair, and a boxplot
//! summary per cluster.
//!
//! Run with `cargo run --example cluster_indicators`.

use eventdyn::cluster::ClusterAssignment;
use eventdyn::compare::compare_cluster_indicators;
use eventdyn::indicators::IndicatorTable;
use eventdyn::ingest::CountryCode;

fn main() -> eventdyn::Result<()> {
    // A flat clustering of ten countries into two groups, as a dendrogram
    // cut would produce it.
    let labels: Vec<CountryCode> = ["US", "GB", "CA", "AU", "NZ", "FR", "IT", "ES", "PT", "GR"]
        .iter()
        .map(|c| CountryCode::new(c))
        .collect::<eventdyn::Result<_>>()?;
    let assignment = ClusterAssignment {
        labels: labels.clone(),
        cluster_ids: vec![1, 1, 1, 1, 1, 2, 2, 2, 2, 2],
    };

    // Cluster 1 sits visibly higher on "gdp"; "hdi" barely differs.
    let mut indicators = IndicatorTable::new(vec!["gdp".into(), "hdi".into()])?;
    let gdp = [65.0, 47.0, 52.0, 55.0, 42.0, 41.0, 34.0, 30.0, 24.0, 20.0];
    let hdi = [0.92, 0.93, 0.93, 0.94, 0.92, 0.90, 0.89, 0.90, 0.86, 0.89];
    for ((&country, &g), &h) in labels.iter().zip(&gdp).zip(&hdi) {
        indicators.insert_row(country, vec![Some(g), Some(h)])?;
    }

    for name in ["gdp", "hdi"] {
        let comparison = compare_cluster_indicators(&assignment, &indicators, name)?;
        println!("indicator {name:?}:");
        match &comparison.anova {
            Some(a) => println!(
                "  ANOVA      F({}, {}) = {:.3}, p = {:.4}",
                a.df_between, a.df_within, a.f, a.p
            ),
            None => println!("  ANOVA      not defined (too few populated clusters)"),
        }
        for pair in &comparison.pairwise {
            match (pair.w, pair.p) {
                (Some(w), Some(p)) => println!(
                    "  rank-sum   cluster {} vs {}: W = {w}, p = {p:.4}",
                    pair.a, pair.b
                ),
                _ => println!("  rank-sum   cluster {} vs {}: skipped", pair.a, pair.b),
            }
        }
        for group in &comparison.groups {
            if let Some(s) = &group.summary {
                println!(
                    "  cluster {}  n = {}, median {:.3}, IQR [{:.3}, {:.3}], whiskers [{:.3}, {:.3}]",
                    group.cluster, group.n, s.median, s.q1, s.q3, s.whisker_low, s.whisker_high
                );
            }
        }
        println!();
    }
    Ok(())
}
