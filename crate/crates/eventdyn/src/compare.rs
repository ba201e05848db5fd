//! Group comparison tests over cluster assignments: one-way ANOVA, Wilcoxon
//! rank-sum (exact for small samples, normal approximation otherwise), and
//! boxplot summaries.

use crate::cluster::ClusterAssignment;
use crate::error::{Error, Result};
use crate::indicators::IndicatorTable;
use crate::special::{f_sf, normal_cdf};
use crate::stats::mean;

/// One-way ANOVA omnibus result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaResult {
    pub f: f64,
    pub p: f64,
    pub df_between: u64,
    pub df_within: u64,
}

/// One-way ANOVA across `groups`. Identical group means give F = 0, p = 1;
/// zero within-group variance with distinct means is degenerate.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<AnovaResult> {
    if groups.len() < 2 {
        return Err(Error::degenerate("ANOVA needs at least 2 groups"));
    }
    if groups.iter().any(Vec::is_empty) {
        return Err(Error::degenerate("ANOVA groups must be non-empty"));
    }
    let n_total: usize = groups.iter().map(Vec::len).sum();
    let k = groups.len();
    if n_total <= k {
        return Err(Error::degenerate("ANOVA needs more observations than groups"));
    }
    let grand: f64 = groups.iter().flatten().sum::<f64>() / n_total as f64;
    let ssb: f64 = groups
        .iter()
        .map(|g| g.len() as f64 * (mean(g) - grand).powi(2))
        .sum();
    let ssw: f64 = groups
        .iter()
        .map(|g| {
            let m = mean(g);
            g.iter().map(|v| (v - m).powi(2)).sum::<f64>()
        })
        .sum();
    let df_between = (k - 1) as u64;
    let df_within = (n_total - k) as u64;
    if ssb == 0.0 {
        return Ok(AnovaResult { f: 0.0, p: 1.0, df_between, df_within });
    }
    if ssw == 0.0 {
        return Err(Error::degenerate("zero within-group variance with distinct means"));
    }
    let f = (ssb / df_between as f64) / (ssw / df_within as f64);
    Ok(AnovaResult { f, p: f_sf(f, df_between as f64, df_within as f64), df_between, df_within })
}

/// How a rank-sum p-value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankSumMethod {
    /// Exact permutation distribution (both samples ≤ 10).
    Exact,
    /// Normal approximation with tie and continuity corrections.
    NormalApprox,
}

/// Two-sided Wilcoxon rank-sum result; `w` is the rank sum of the first
/// sample under mid-ranks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumTest {
    pub w: f64,
    pub p: f64,
    pub method: RankSumMethod,
}

/// [`wilcoxon_rank_sum_with`] choosing the exact method when both samples
/// have at most 10 observations.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumTest> {
    let method = if a.len() <= 10 && b.len() <= 10 {
        RankSumMethod::Exact
    } else {
        RankSumMethod::NormalApprox
    };
    wilcoxon_rank_sum_with(a, b, method)
}

/// Mid-ranks doubled to stay integral: a tied run over 0-based positions
/// [i, j) gets doubled rank i + 1 + j.
fn doubled_mid_ranks(sorted: &[f64]) -> Vec<u64> {
    let n = sorted.len();
    let mut doubled = vec![0u64; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j] == sorted[i] {
            j += 1;
        }
        for r in doubled.iter_mut().take(j).skip(i) {
            *r = (i + 1 + j) as u64;
        }
        i = j;
    }
    doubled
}

pub fn wilcoxon_rank_sum_with(a: &[f64], b: &[f64], method: RankSumMethod) -> Result<RankSumTest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::degenerate("rank-sum test needs two non-empty samples"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::invalid("rank-sum samples must be finite"));
    }
    let n_a = a.len();
    let n = n_a + b.len();
    // Pool with provenance, sort by value; ranks are mid-ranks over ties.
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let values: Vec<f64> = pooled.iter().map(|&(v, _)| v).collect();
    let doubled = doubled_mid_ranks(&values);
    let w2: u64 = pooled
        .iter()
        .zip(&doubled)
        .filter(|((_, from_a), _)| *from_a)
        .map(|(_, &r)| r)
        .sum();
    let w = w2 as f64 / 2.0;

    let p = match method {
        RankSumMethod::Exact => exact_two_sided_p(&doubled, n_a, w2),
        RankSumMethod::NormalApprox => {
            let n_b = (n - n_a) as f64;
            let n_a_f = n_a as f64;
            let n_f = n as f64;
            let mean_w = n_a_f * (n_f + 1.0) / 2.0;
            // Tie correction Σ(t³−t) over tie-run lengths.
            let mut tie_term = 0.0;
            let mut i = 0;
            while i < n {
                let mut j = i + 1;
                while j < n && values[j] == values[i] {
                    j += 1;
                }
                let t = (j - i) as f64;
                tie_term += t * t * t - t;
                i = j;
            }
            let variance =
                n_a_f * n_b / 12.0 * ((n_f + 1.0) - tie_term / (n_f * (n_f - 1.0)));
            if variance <= 0.0 {
                1.0
            } else {
                // Continuity correction: shrink |W − mean| by 0.5.
                let diff = (w - mean_w).abs() - 0.5;
                let z = diff.max(0.0) / variance.sqrt();
                (2.0 * (1.0 - normal_cdf(z))).clamp(0.0, 1.0)
            }
        }
    };
    Ok(RankSumTest { w, p, method })
}

/// Exact two-sided p over the permutation distribution of the doubled rank
/// sum: ways[j][s] counts j-subsets of the doubled ranks summing to s.
fn exact_two_sided_p(doubled: &[u64], n_a: usize, w2: u64) -> f64 {
    let total: u64 = doubled.iter().sum();
    let max_sum = total as usize;
    let mut ways = vec![vec![0f64; max_sum + 1]; n_a + 1];
    ways[0][0] = 1.0;
    for &r in doubled {
        let r = r as usize;
        for j in (1..=n_a).rev() {
            for s in (r..=max_sum).rev() {
                let add = ways[j - 1][s - r];
                if add != 0.0 {
                    ways[j][s] += add;
                }
            }
        }
    }
    let counts = &ways[n_a];
    let total_ways: f64 = counts.iter().sum();
    let w2 = w2 as usize;
    let lower: f64 = counts.iter().take(w2 + 1).sum();
    let upper: f64 = counts.iter().skip(w2).sum();
    (2.0 * (lower.min(upper)) / total_ways).min(1.0)
}

/// Five-number boxplot summary with Tukey whiskers (most extreme points
/// within 1.5×IQR of the quartiles) and the points beyond them.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
}

/// Linear-interpolation quantile over sorted values.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn boxplot_summary(values: &[f64]) -> Result<BoxplotSummary> {
    if values.is_empty() {
        return Err(Error::degenerate("boxplot needs at least one value"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("boxplot values must be finite"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (low_fence, high_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = sorted
        .iter()
        .copied()
        .filter(|&v| v >= low_fence && v <= high_fence)
        .collect();
    // Quartiles always sit inside the fences, so `inside` is non-empty.
    Ok(BoxplotSummary {
        n: sorted.len(),
        mean: mean(&sorted),
        median,
        q1,
        q3,
        whisker_low: inside[0],
        whisker_high: *inside.last().unwrap(),
        outliers: sorted
            .iter()
            .copied()
            .filter(|&v| v < low_fence || v > high_fence)
            .collect(),
    })
}

/// One cluster pair's rank-sum comparison; `None` marks a pair skipped for
/// insufficient data.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseComparison {
    pub a: u32,
    pub b: u32,
    pub w: Option<f64>,
    pub p: Option<f64>,
}

/// Per-cluster slice of one indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub cluster: u32,
    /// Non-missing observations.
    pub n: usize,
    /// `None` when the cluster has no non-missing values.
    pub summary: Option<BoxplotSummary>,
}

/// Omnibus + pairwise comparison of one indicator across clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorComparison {
    pub indicator: String,
    /// `None` when fewer than two clusters have ≥ 2 observations.
    pub anova: Option<AnovaResult>,
    pub pairwise: Vec<PairwiseComparison>,
    pub groups: Vec<GroupStats>,
}

/// Compares `indicator` across the assignment's clusters: ANOVA over
/// clusters with ≥ 2 non-missing values, Wilcoxon rank-sum per cluster pair
/// (skipped pairs marked missing), and a boxplot summary per cluster.
pub fn compare_cluster_indicators(
    assignment: &ClusterAssignment,
    indicators: &IndicatorTable,
    indicator: &str,
) -> Result<IndicatorComparison> {
    if !indicators.contains_indicator(indicator) {
        return Err(Error::invalid(format!(
            "unknown indicator {indicator:?}; valid indicators: {}",
            indicators.names().join(", ")
        )));
    }
    let k = assignment.k();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); k as usize];
    for (label, &cluster) in assignment.labels.iter().zip(&assignment.cluster_ids) {
        if let Some(v) = indicators.get(*label, indicator) {
            values[cluster as usize - 1].push(v);
        }
    }

    let groups: Vec<GroupStats> = values
        .iter()
        .enumerate()
        .map(|(i, v)| GroupStats {
            cluster: i as u32 + 1,
            n: v.len(),
            summary: boxplot_summary(v).ok(),
        })
        .collect();

    let testable: Vec<Vec<f64>> =
        values.iter().filter(|v| v.len() >= 2).cloned().collect();
    let anova = if testable.len() >= 2 { one_way_anova(&testable).ok() } else { None };

    let mut pairwise = Vec::new();
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            let (a, b) = (i as u32 + 1, j as u32 + 1);
            if values[i].len() >= 2 && values[j].len() >= 2 {
                let test = wilcoxon_rank_sum(&values[i], &values[j])?;
                pairwise.push(PairwiseComparison { a, b, w: Some(test.w), p: Some(test.p) });
            } else {
                pairwise.push(PairwiseComparison { a, b, w: None, p: None });
            }
        }
    }

    Ok(IndicatorComparison { indicator: indicator.to_string(), anova, pairwise, groups })
}
