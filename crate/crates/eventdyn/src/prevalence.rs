//! Category-prevalence rank matrix: select eligible countries, take each
//! country's top-k categories, union them, and rank the union per country
//! with a sentinel rank for absent categories.

use std::collections::BTreeMap;

use crate::dynamics::CountryMetrics;
use crate::error::{Error, Result};
use crate::ingest::CountryCode;
use crate::stats::zscores;

/// Per-country category counts keyed by country, the input shape for the
/// rank-matrix pipeline.
pub type CategoryCounts = BTreeMap<CountryCode, BTreeMap<String, u64>>;

/// Integer prevalence ranks, rows = countries, columns = the top-k category
/// union. Present categories rank 1..r by descending count; absent ones get
/// `sentinel_rank` = number of columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankMatrix {
    pub countries: Vec<CountryCode>,
    pub categories: Vec<String>,
    pub ranks: Vec<Vec<u32>>,
    pub sentinel_rank: u32,
}

/// Z-scoring direction for [`zscore_ranks`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZscoreAxis {
    /// Standardize each category column across countries.
    #[default]
    Category,
    /// Standardize each country row across categories.
    Country,
}

/// Countries with at least `min_categories` distinct categories, ordered by
/// total event count descending (ties by code ascending).
pub fn select_countries(metrics: &[CountryMetrics], min_categories: u64) -> Vec<CountryCode> {
    let mut eligible: Vec<&CountryMetrics> =
        metrics.iter().filter(|m| m.n_cat >= min_categories).collect();
    eligible.sort_by(|a, b| b.tec.cmp(&a.tec).then_with(|| a.country.cmp(&b.country)));
    eligible.into_iter().map(|m| m.country).collect()
}

/// A country's `k` highest-count categories, count descending with name
/// ascending on ties.
fn top_k(counts: &BTreeMap<String, u64>, k: usize) -> Vec<&String> {
    let mut ordered: Vec<(&String, u64)> = counts.iter().map(|(c, &n)| (c, n)).collect();
    ordered.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ordered.into_iter().take(k).map(|(c, _)| c).collect()
}

/// Union of every country's top-`k` categories, ordered by total count
/// across all countries descending, then name ascending.
pub fn top_k_union(per_country_counts: &CategoryCounts, k: usize) -> Vec<String> {
    let mut totals: BTreeMap<&String, u64> = BTreeMap::new();
    for counts in per_country_counts.values() {
        for (category, &n) in counts {
            *totals.entry(category).or_insert(0) += n;
        }
    }
    let mut in_union: Vec<&String> = per_country_counts
        .values()
        .flat_map(|counts| top_k(counts, k))
        .collect();
    in_union.sort();
    in_union.dedup();
    in_union.sort_by(|a, b| totals[*b].cmp(&totals[*a]).then_with(|| a.cmp(b)));
    in_union.into_iter().cloned().collect()
}

/// Ranks the union per country: present categories 1..r by count descending
/// (name ascending on ties), absent ones at the sentinel rank |union|.
/// Row order follows the map's country-code order.
pub fn build_rank_matrix(
    per_country_counts: &CategoryCounts,
    union: &[String],
) -> Result<RankMatrix> {
    if union.is_empty() {
        return Err(Error::invalid("empty category union"));
    }
    let sentinel_rank = union.len() as u32;
    let column: BTreeMap<&String, usize> =
        union.iter().enumerate().map(|(i, c)| (c, i)).collect();

    let mut countries = Vec::with_capacity(per_country_counts.len());
    let mut ranks = Vec::with_capacity(per_country_counts.len());
    for (&country, counts) in per_country_counts {
        let mut present: Vec<(&String, u64)> = counts
            .iter()
            .filter(|(c, _)| column.contains_key(c))
            .map(|(c, &n)| (c, n))
            .collect();
        present.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let mut row = vec![sentinel_rank; union.len()];
        for (rank, (category, _)) in present.iter().enumerate() {
            row[column[category]] = rank as u32 + 1;
        }
        countries.push(country);
        ranks.push(row);
    }
    Ok(RankMatrix { countries, categories: union.to_vec(), ranks, sentinel_rank })
}

/// Standardizes the rank matrix along `axis` with population std; constant
/// lines map to zeros.
pub fn zscore_ranks(matrix: &RankMatrix, axis: ZscoreAxis) -> Vec<Vec<f64>> {
    let n_rows = matrix.ranks.len();
    let n_cols = matrix.categories.len();
    match axis {
        ZscoreAxis::Country => matrix
            .ranks
            .iter()
            .map(|row| zscores(&row.iter().map(|&r| r as f64).collect::<Vec<_>>()))
            .collect(),
        ZscoreAxis::Category => {
            let mut out = vec![vec![0.0; n_cols]; n_rows];
            for j in 0..n_cols {
                let column: Vec<f64> = matrix.ranks.iter().map(|row| row[j] as f64).collect();
                for (i, z) in zscores(&column).into_iter().enumerate() {
                    out[i][j] = z;
                }
            }
            out
        }
    }
}
