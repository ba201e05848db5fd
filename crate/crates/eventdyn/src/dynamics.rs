//! Per-country event-dynamics metrics: overall load statistics, temporal
//! window aggregations, persistence, burstiness, and category diversity.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{CountryCode, TransactionTable};
use crate::stats::{mean, population_std};

/// Whole-span load statistics over a transaction table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverallStats {
    pub tec: u64,
    pub n_trans: u64,
    /// Mean events per transaction (≥ 1).
    pub mu_trans: f64,
    /// Population standard deviation of events per transaction.
    pub sigma_trans: f64,
    /// Coefficient of variation σ/μ.
    pub cov: f64,
}

/// Errors on an empty table; otherwise TEC, N_Trans, μ, σ (population), CoV.
pub fn overall_stats(table: &TransactionTable) -> Result<OverallStats> {
    if table.transactions().is_empty() {
        return Err(Error::degenerate(format!("no transactions for {}", table.country())));
    }
    let sizes: Vec<f64> = table
        .transactions()
        .iter()
        .map(|t| t.event_count() as f64)
        .collect();
    let mu_trans = mean(&sizes);
    let sigma_trans = population_std(&sizes);
    Ok(OverallStats {
        tec: table.tec(),
        n_trans: table.n_trans(),
        mu_trans,
        sigma_trans,
        cov: sigma_trans / mu_trans,
    })
}

/// One calendar month's event totals in the four within-month buckets
/// (days 1–7, 8–14, 15–21, 22–end).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonthBuckets {
    pub year: i32,
    pub month: u32,
    pub buckets: [u64; 4],
}

/// One calendar quarter's event totals per month of the quarter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuarterBuckets {
    pub year: i32,
    /// 1 = Jan–Mar, …, 4 = Oct–Dec.
    pub quarter: u32,
    pub buckets: [u64; 3],
}

/// Temporal behavior over a table's active span. Month and quarter lists
/// cover every calendar window between the first and last transaction,
/// including empty ones.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalProfile {
    /// Event totals Monday..Sunday; sums to TEC.
    pub day_of_week_totals: [u64; 7],
    pub month_week_buckets: Vec<MonthBuckets>,
    pub quarter_month_buckets: Vec<QuarterBuckets>,
    /// Mean events per ISO week / calendar month / quarter over the span.
    pub mu_w: f64,
    pub mu_m: f64,
    pub mu_q: f64,
    /// Coefficient of variation of per-window totals over the same spans.
    pub cov_w: f64,
    pub cov_m: f64,
    pub cov_q: f64,
    /// Monthly / quarterly persistence; `None` without a comparable pair.
    pub p_m: Option<f64>,
    pub p_q: Option<f64>,
    /// Burstiness of inter-transaction gaps; `None` below 2 gaps.
    pub beta: Option<f64>,
}

/// Index of the ISO week (Monday-aligned) containing `date`.
pub(crate) fn week_index(date: NaiveDate) -> i64 {
    let monday = date - chrono::Duration::days(date.weekday().num_days_from_monday() as i64);
    // 0001-01-01 is a Monday, so Mondays sit at 1 mod 7 days from CE.
    (monday.num_days_from_ce() as i64).div_euclid(7)
}

/// Months since year zero; consecutive across year boundaries.
pub(crate) fn month_index(date: NaiveDate) -> i64 {
    date.year() as i64 * 12 + date.month0() as i64
}

pub(crate) fn month_of_index(index: i64) -> (i32, u32) {
    (index.div_euclid(12) as i32, index.rem_euclid(12) as u32 + 1)
}

/// Quarters since year zero; consecutive across year boundaries.
pub(crate) fn quarter_index(date: NaiveDate) -> i64 {
    date.year() as i64 * 4 + date.month0() as i64 / 3
}

/// Aggregates a table into day-of-week totals, per-month week buckets and
/// per-quarter month buckets, with window means, per-window CoV, persistence
/// and burstiness. Errors on an empty table.
pub fn temporal_windows(table: &TransactionTable) -> Result<TemporalProfile> {
    let (Some(first), Some(last)) = (table.first_date(), table.last_date()) else {
        return Err(Error::degenerate(format!("no transactions for {}", table.country())));
    };
    let transactions = table.transactions();
    let tec = table.tec() as f64;

    let mut day_of_week_totals = [0u64; 7];
    for t in transactions {
        day_of_week_totals[t.date.weekday().num_days_from_monday() as usize] += t.event_count();
    }

    let w0 = week_index(first);
    let mut week_totals = vec![0.0; (week_index(last) - w0 + 1) as usize];

    let m0 = month_index(first);
    let mut months: Vec<MonthBuckets> = (m0..=month_index(last))
        .map(|i| {
            let (year, month) = month_of_index(i);
            MonthBuckets { year, month, buckets: [0; 4] }
        })
        .collect();

    let q0 = quarter_index(first);
    let mut quarters: Vec<QuarterBuckets> = (q0..=quarter_index(last))
        .map(|i| QuarterBuckets {
            year: i.div_euclid(4) as i32,
            quarter: i.rem_euclid(4) as u32 + 1,
            buckets: [0; 3],
        })
        .collect();

    for t in transactions {
        let count = t.event_count();
        week_totals[(week_index(t.date) - w0) as usize] += count as f64;
        let week_of_month = ((t.date.day() - 1) / 7).min(3) as usize;
        months[(month_index(t.date) - m0) as usize].buckets[week_of_month] += count;
        let month_of_quarter = (t.date.month0() % 3) as usize;
        quarters[(quarter_index(t.date) - q0) as usize].buckets[month_of_quarter] += count;
    }

    let month_totals: Vec<f64> = months
        .iter()
        .map(|m| m.buckets.iter().sum::<u64>() as f64)
        .collect();
    let quarter_totals: Vec<f64> = quarters
        .iter()
        .map(|q| q.buckets.iter().sum::<u64>() as f64)
        .collect();
    // Window means are positive: tec ≥ 1 and every grid is non-empty.
    let cov_of = |totals: &[f64]| population_std(totals) / mean(totals);

    let p_m = persistence(&months.iter().map(|m| to_f64(&m.buckets)).collect::<Vec<_>>());
    let p_q = persistence(&quarters.iter().map(|q| to_f64(&q.buckets)).collect::<Vec<_>>());

    Ok(TemporalProfile {
        day_of_week_totals,
        mu_w: tec / week_totals.len() as f64,
        mu_m: tec / month_totals.len() as f64,
        mu_q: tec / quarter_totals.len() as f64,
        cov_w: cov_of(&week_totals),
        cov_m: cov_of(&month_totals),
        cov_q: cov_of(&quarter_totals),
        p_m,
        p_q,
        beta: burstiness(table),
        month_week_buckets: months,
        quarter_month_buckets: quarters,
    })
}

fn to_f64(buckets: &[u64]) -> Vec<f64> {
    buckets.iter().map(|&v| v as f64).collect()
}

/// Mean cosine similarity between adjacent windows' bucket vectors.
///
/// Cosine already normalizes each window to its proportions, so per-window
/// scale drops out. Pairs touching an all-zero window are skipped; `None`
/// with fewer than two windows or no comparable pair.
pub fn persistence(buckets: &[Vec<f64>]) -> Option<f64> {
    if buckets.len() < 2 {
        return None;
    }
    let dim = buckets[0].len();
    assert!(
        buckets.iter().all(|b| b.len() == dim),
        "bucket vectors must share a dimension"
    );
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for pair in buckets.windows(2) {
        let (na, nb) = (norm(&pair[0]), norm(&pair[1]));
        if na == 0.0 || nb == 0.0 {
            continue;
        }
        let dot: f64 = pair[0].iter().zip(&pair[1]).map(|(a, b)| a * b).sum();
        total += dot / (na * nb);
        pairs += 1;
    }
    (pairs > 0).then(|| (total / pairs as f64).clamp(0.0, 1.0))
}

/// Burstiness β = (σ − τ)/(σ + τ) of the inter-transaction day gaps:
/// −1 perfectly periodic, 0 Poisson-like, → 1 extremely bursty.
/// `None` with fewer than two gaps.
pub fn burstiness(table: &TransactionTable) -> Option<f64> {
    burstiness_of_gaps(&table.inter_event_days())
}

/// [`burstiness`] on an explicit gap sequence (entries ≥ 1).
pub fn burstiness_of_gaps(gaps: &[u64]) -> Option<f64> {
    if gaps.len() < 2 {
        return None;
    }
    let g: Vec<f64> = gaps.iter().map(|&v| v as f64).collect();
    let tau = mean(&g);
    let sigma = population_std(&g);
    Some((sigma - tau) / (sigma + tau))
}

/// A country's aggregate category usage.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryProfile {
    pub n_cat: u64,
    /// Category → positive total count; sums to TEC.
    pub category_counts: BTreeMap<String, u64>,
    pub d_cat: f64,
}

/// Normalized Shannon diversity of category counts: −Σ p·ln p / ln N_Cat,
/// with the single-category case pinned to 0. Errors on empty counts.
pub fn category_diversity(category_counts: &BTreeMap<String, u64>) -> Result<f64> {
    if category_counts.is_empty() {
        return Err(Error::degenerate("no category counts"));
    }
    let n_cat = category_counts.len();
    if n_cat == 1 {
        return Ok(0.0);
    }
    let total: u64 = category_counts.values().sum();
    let total = total as f64;
    let entropy: f64 = category_counts
        .values()
        .filter(|&&v| v > 0)
        .map(|&v| {
            let p = v as f64 / total;
            -p * p.ln()
        })
        .sum();
    Ok((entropy / (n_cat as f64).ln()).clamp(0.0, 1.0))
}

/// Aggregates a table's category counts and their diversity.
pub fn category_profile(table: &TransactionTable) -> Result<CategoryProfile> {
    let category_counts = table.category_counts();
    let d_cat = category_diversity(&category_counts)?;
    Ok(CategoryProfile { n_cat: category_counts.len() as u64, category_counts, d_cat })
}

/// The full per-country feature vector. Field order matches the exported
/// CSV column order; undefined metrics stay `None` (empty CSV cell,
/// JSON null).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryMetrics {
    pub country: CountryCode,
    pub tec: u64,
    pub log_tec: f64,
    pub n_trans: u64,
    pub log_n_trans: f64,
    pub mu_trans: f64,
    pub sigma_trans: f64,
    pub cov: f64,
    pub mu_w: f64,
    pub mu_m: f64,
    pub mu_q: f64,
    pub cov_w: f64,
    pub cov_m: f64,
    pub cov_q: f64,
    pub p_m: Option<f64>,
    pub p_q: Option<f64>,
    pub beta: Option<f64>,
    pub n_cat: u64,
    pub d_cat: f64,
}

impl CountryMetrics {
    /// Feature column names, in CSV order after the `country` column.
    pub const FEATURES: [&'static str; 18] = [
        "tec", "log_tec", "n_trans", "log_n_trans", "mu_trans", "sigma_trans", "cov",
        "mu_w", "mu_m", "mu_q", "cov_w", "cov_m", "cov_q", "p_m", "p_q", "beta",
        "n_cat", "d_cat",
    ];

    /// Feature value by column name; `None` when the metric is undefined for
    /// this country or the name is not a feature.
    pub fn feature(&self, name: &str) -> Option<f64> {
        match name {
            "tec" => Some(self.tec as f64),
            "log_tec" => Some(self.log_tec),
            "n_trans" => Some(self.n_trans as f64),
            "log_n_trans" => Some(self.log_n_trans),
            "mu_trans" => Some(self.mu_trans),
            "sigma_trans" => Some(self.sigma_trans),
            "cov" => Some(self.cov),
            "mu_w" => Some(self.mu_w),
            "mu_m" => Some(self.mu_m),
            "mu_q" => Some(self.mu_q),
            "cov_w" => Some(self.cov_w),
            "cov_m" => Some(self.cov_m),
            "cov_q" => Some(self.cov_q),
            "p_m" => self.p_m,
            "p_q" => self.p_q,
            "beta" => self.beta,
            "n_cat" => Some(self.n_cat as f64),
            "d_cat" => Some(self.d_cat),
            _ => None,
        }
    }
}

/// Assembles every metric for one table; log features are log₁₀.
pub fn compute_country_metrics(table: &TransactionTable) -> Result<CountryMetrics> {
    let overall = overall_stats(table)?;
    let temporal = temporal_windows(table)?;
    let profile = category_profile(table)?;
    Ok(CountryMetrics {
        country: table.country(),
        tec: overall.tec,
        log_tec: (overall.tec as f64).log10(),
        n_trans: overall.n_trans,
        log_n_trans: (overall.n_trans as f64).log10(),
        mu_trans: overall.mu_trans,
        sigma_trans: overall.sigma_trans,
        cov: overall.cov,
        mu_w: temporal.mu_w,
        mu_m: temporal.mu_m,
        mu_q: temporal.mu_q,
        cov_w: temporal.cov_w,
        cov_m: temporal.cov_m,
        cov_q: temporal.cov_q,
        p_m: temporal.p_m,
        p_q: temporal.p_q,
        beta: temporal.beta,
        n_cat: profile.n_cat,
        d_cat: profile.d_cat,
    })
}

/// Metrics for every table, in country-code order.
pub fn compute_all_metrics(
    tables: &BTreeMap<CountryCode, TransactionTable>,
) -> Result<Vec<CountryMetrics>> {
    tables.values().map(compute_country_metrics).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Transaction;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn table(sizes: &[(&str, u64)]) -> TransactionTable {
        let transactions = sizes
            .iter()
            .map(|&(d, n)| Transaction {
                date: date(d),
                category_counts: BTreeMap::from([("Tech".to_string(), n)]),
            })
            .collect();
        TransactionTable::new(CountryCode::new("US").unwrap(), transactions).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn overall_stats_examples() {
        let t = table(&[("2015-01-01", 2), ("2015-01-02", 2), ("2015-01-03", 2)]);
        let s = overall_stats(&t).unwrap();
        close(s.mu_trans, 2.0, 0.0);
        close(s.sigma_trans, 0.0, 0.0);
        close(s.cov, 0.0, 0.0);

        let t = table(&[("2015-01-01", 1), ("2015-01-02", 3)]);
        let s = overall_stats(&t).unwrap();
        close(s.mu_trans, 2.0, 1e-15);
        close(s.sigma_trans, 1.0, 1e-15);
        close(s.cov, 0.5, 1e-15);

        let t = table(&[
            ("2015-01-01", 1),
            ("2015-01-02", 1),
            ("2015-01-03", 1),
            ("2015-01-04", 1),
            ("2015-01-05", 4),
        ]);
        let s = overall_stats(&t).unwrap();
        close(s.mu_trans, 1.6, 1e-15);
        close(s.sigma_trans, 1.2, 1e-15);
        close(s.cov, 0.75, 1e-15);
    }

    #[test]
    fn week_buckets_by_day_of_month() {
        // Jan 3 (×2) and Jan 20 (×1): buckets (2, 0, 1, 0).
        let t = table(&[("2015-01-03", 2), ("2015-01-20", 1)]);
        let profile = temporal_windows(&t).unwrap();
        assert_eq!(profile.month_week_buckets.len(), 1);
        assert_eq!(profile.month_week_buckets[0].buckets, [2, 0, 1, 0]);
        // Jan 29–31 fall into the fourth bucket.
        let t = table(&[("2015-01-31", 5)]);
        let profile = temporal_windows(&t).unwrap();
        assert_eq!(profile.month_week_buckets[0].buckets, [0, 0, 0, 5]);
    }

    #[test]
    fn day_of_week_totals_sum_to_tec() {
        let t = table(&[("2015-01-05", 3), ("2015-01-12", 2), ("2015-01-14", 1)]);
        let profile = temporal_windows(&t).unwrap();
        // Jan 5 and Jan 12, 2015 are Mondays; Jan 14 is a Wednesday.
        assert_eq!(profile.day_of_week_totals[0], 5);
        assert_eq!(profile.day_of_week_totals[2], 1);
        assert_eq!(profile.day_of_week_totals.iter().sum::<u64>(), t.tec());
    }

    #[test]
    fn window_means_count_intersecting_windows() {
        // 120 events over exactly four calendar months.
        let t = table(&[
            ("2015-01-01", 30),
            ("2015-02-10", 30),
            ("2015-03-20", 30),
            ("2015-04-30", 30),
        ]);
        let profile = temporal_windows(&t).unwrap();
        close(profile.mu_m, 30.0, 1e-12);
        assert_eq!(profile.month_week_buckets.len(), 4);
        // Jan–Apr span two quarters.
        close(profile.mu_q, 60.0, 1e-12);
        // Empty months still occupy the grid.
        let t = table(&[("2015-01-01", 10), ("2015-04-01", 10)]);
        let profile = temporal_windows(&t).unwrap();
        assert_eq!(profile.month_week_buckets.len(), 4);
        close(profile.mu_m, 5.0, 1e-12);
    }

    #[test]
    fn week_index_is_monday_aligned() {
        // 2015-01-05 is a Monday; the preceding Sunday is one week earlier.
        assert_eq!(week_index(date("2015-01-05")), week_index(date("2015-01-11")));
        assert_eq!(week_index(date("2015-01-05")) - 1, week_index(date("2015-01-04")));
    }

    #[test]
    fn persistence_examples() {
        let p = persistence(&[
            vec![1.0, 1.0, 1.0, 1.0],
            vec![2.0, 2.0, 2.0, 2.0],
            vec![5.0, 5.0, 5.0, 5.0],
        ])
        .unwrap();
        close(p, 1.0, 1e-12);

        let p = persistence(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]]).unwrap();
        close(p, 0.0, 1e-12);

        let p = persistence(&[
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        close(p, 0.5, 1e-12);
    }

    #[test]
    fn persistence_skips_zero_windows() {
        // Middle month is empty: only no valid pair remains.
        assert_eq!(
            persistence(&[vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]),
            None
        );
        // Zero window at the edge: one valid pair.
        let p = persistence(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        close(p, 1.0, 1e-12);
        assert_eq!(persistence(&[vec![1.0, 2.0]]), None);
    }

    #[test]
    fn burstiness_examples() {
        // Days 0, 7, 14, 21: constant gaps → β = −1.
        let t = table(&[
            ("2015-01-01", 1),
            ("2015-01-08", 1),
            ("2015-01-15", 1),
            ("2015-01-22", 1),
        ]);
        close(burstiness(&t).unwrap(), -1.0, 0.0);

        // γ = [1, 2, 4]: τ = 7/3, σ = √14/3.
        let t = table(&[
            ("2015-01-01", 1),
            ("2015-01-02", 1),
            ("2015-01-04", 1),
            ("2015-01-08", 1),
        ]);
        let expected = (14f64.sqrt() - 7.0) / (14f64.sqrt() + 7.0);
        close(burstiness(&t).unwrap(), expected, 1e-12);
        close(expected, -0.303_337, 1e-6);

        // Fewer than two gaps → undefined.
        assert_eq!(burstiness(&table(&[("2015-01-01", 1), ("2015-01-05", 1)])), None);
    }

    #[test]
    fn diversity_examples() {
        let counts = |pairs: &[(&str, u64)]| -> BTreeMap<String, u64> {
            pairs.iter().map(|&(c, n)| (c.to_string(), n)).collect()
        };
        close(
            category_diversity(&counts(&[("A", 5), ("B", 5), ("C", 5), ("D", 5)])).unwrap(),
            1.0,
            1e-12,
        );
        close(
            category_diversity(&counts(&[("A", 9), ("B", 1)])).unwrap(),
            0.468_995_593_589_281,
            1e-12,
        );
        close(category_diversity(&counts(&[("A", 74)])).unwrap(), 0.0, 0.0);
        assert!(category_diversity(&BTreeMap::new()).is_err());
    }

    #[test]
    fn single_transaction_metrics_degenerate_gracefully() {
        let t = table(&[("2015-01-01", 4)]);
        let m = compute_country_metrics(&t).unwrap();
        assert_eq!(m.tec, 4);
        assert_eq!(m.n_trans, 1);
        close(m.cov, 0.0, 0.0);
        assert_eq!(m.beta, None);
        assert_eq!(m.p_m, None);
        assert_eq!(m.p_q, None);
        close(m.mu_w, 4.0, 0.0);
    }

    #[test]
    fn metrics_log_transforms() {
        let t = table(&[("2015-01-01", 50), ("2015-01-02", 50)]);
        let m = compute_country_metrics(&t).unwrap();
        close(m.log_tec, 2.0, 1e-12);
        close(m.log_n_trans, 2f64.log10(), 1e-12);
        assert_eq!(m.feature("log_tec"), Some(m.log_tec));
        assert_eq!(m.feature("beta"), m.beta);
        assert_eq!(m.feature("nonsense"), None);
    }
}
