//! The statistical layer: Pearson correlation with significance, Jarque–Bera
//! normality test, Q-Q plot data, and the correlation sweep over metric ×
//! indicator pairs.

use std::io;

use crate::dynamics::CountryMetrics;
use crate::error::{Error, Result};
use crate::indicators::IndicatorTable;
use crate::special;

/// Arithmetic mean; NaN on empty input.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divisor n).
pub fn population_variance(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divisor n).
pub fn population_std(xs: &[f64]) -> f64 {
    population_variance(xs).sqrt()
}

/// Population z-scores; a constant input maps to all zeros.
pub fn zscores(xs: &[f64]) -> Vec<f64> {
    let mu = mean(xs);
    let sigma = population_std(xs);
    if sigma == 0.0 {
        vec![0.0; xs.len()]
    } else {
        xs.iter().map(|x| (x - mu) / sigma).collect()
    }
}

/// Pearson product-moment correlation with a two-sided t-test p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PearsonTest {
    pub n: usize,
    pub r: f64,
    /// Two-sided p; `None` below n = 3 (no residual degrees of freedom).
    pub p: Option<f64>,
}

/// Correlates two aligned vectors. Errors on length mismatch, n < 2, or a
/// constant input («zero variance»).
pub fn pearson(x: &[f64], y: &[f64]) -> Result<PearsonTest> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "paired vectors differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::degenerate("need at least 2 paired observations"));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::degenerate("zero variance"));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let p = (n >= 3).then(|| {
        let df = (n - 2) as f64;
        if 1.0 - r * r <= f64::EPSILON {
            0.0
        } else {
            let t = r * (df / (1.0 - r * r)).sqrt();
            special::student_t_two_sided_p(t, df)
        }
    });
    Ok(PearsonTest { n, r, p })
}

/// Jarque–Bera normality test from population moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityTest {
    pub n: usize,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub statistic: f64,
    pub p: f64,
}

/// JB = n/6·(S² + K²/4) with p from the chi-squared(2) survival function.
/// Errors below n = 8 or on constant input; callers should treat n < 30 as
/// only indicative.
pub fn jarque_bera(x: &[f64]) -> Result<NormalityTest> {
    let n = x.len();
    if n < 8 {
        return Err(Error::degenerate(format!(
            "need at least 8 observations for Jarque–Bera, got {n}"
        )));
    }
    let mu = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mu;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    let nf = n as f64;
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    if m2 == 0.0 {
        return Err(Error::degenerate("zero variance"));
    }
    let skewness = m3 / m2.powf(1.5);
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;
    let statistic = nf / 6.0 * (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
    let p = special::chi_squared_sf(statistic, 2.0);
    Ok(NormalityTest { n, skewness, excess_kurtosis, statistic, p })
}

/// Q-Q plot data: standard-normal quantiles at (i − ½)/n against the sample
/// standardized to zero mean and unit population deviation; both coordinates
/// ascending. Errors below n = 2 or on constant input.
pub fn qq_points(x: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = x.len();
    if n < 2 {
        return Err(Error::degenerate("need at least 2 observations for Q-Q data"));
    }
    let sigma = population_std(x);
    if sigma == 0.0 {
        return Err(Error::degenerate("zero variance"));
    }
    let mu = mean(x);
    let mut sample: Vec<f64> = x.iter().map(|v| (v - mu) / sigma).collect();
    sample.sort_by(|a, b| a.partial_cmp(b).expect("standardized values are finite"));
    Ok(sample
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let p = (i as f64 + 0.5) / n as f64;
            (special::normal_inv_cdf(p), s)
        })
        .collect())
}

/// Value transform applied before correlating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Transform {
    #[default]
    Identity,
    Log10,
}

impl Transform {
    /// `None` when the transform is undefined (log of a non-positive value).
    pub fn apply(self, v: f64) -> Option<f64> {
        match self {
            Transform::Identity => Some(v),
            Transform::Log10 => (v > 0.0).then(|| v.log10()),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "" | "identity" => Ok(Transform::Identity),
            "log10" => Ok(Transform::Log10),
            other => Err(Error::invalid(format!(
                "unknown transform {other:?}; expected `identity` or `log10`"
            ))),
        }
    }
}

/// One requested correlation: a metrics feature against an indicator column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationSpec {
    pub feature: String,
    pub indicator: String,
    pub transform_feature: Transform,
    pub transform_indicator: Transform,
}

/// Reads a pair-spec CSV: header `feature,indicator` with optional
/// `transform_feature,transform_indicator` columns (`identity` | `log10`).
pub fn parse_correlation_spec<R: io::Read>(source: R) -> Result<Vec<CorrelationSpec>> {
    let mut reader = csv::Reader::from_reader(source);
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(feature), Some(indicator)) = (col("feature"), col("indicator")) else {
        return Err(Error::invalid(
            "correlation spec needs `feature` and `indicator` columns",
        ));
    };
    let tf = col("transform_feature");
    let ti = col("transform_indicator");

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let get = |idx: Option<usize>| idx.and_then(|i| record.get(i)).unwrap_or("");
        let cell = |idx: usize| -> Result<String> {
            match record.get(idx).map(str::trim) {
                Some(v) if !v.is_empty() => Ok(v.to_string()),
                _ => Err(Error::invalid(format!("line {line}: empty spec field"))),
            }
        };
        rows.push(CorrelationSpec {
            feature: cell(feature)?,
            indicator: cell(indicator)?,
            transform_feature: Transform::parse(get(tf))
                .map_err(|e| Error::invalid(format!("line {line}: {e}")))?,
            transform_indicator: Transform::parse(get(ti))
                .map_err(|e| Error::invalid(format!("line {line}: {e}")))?,
        });
    }
    if rows.is_empty() {
        return Err(Error::invalid("correlation spec has no rows"));
    }
    Ok(rows)
}

/// One computed correlation, ready for export.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub feature: String,
    pub indicator: String,
    pub transform_feature: Transform,
    pub transform_indicator: Transform,
    pub n: usize,
    pub r: f64,
    pub p: Option<f64>,
}

impl CorrelationResult {
    /// Significance stars: *p<0.05, **p<0.01, ***p<0.001; empty otherwise.
    pub fn stars(&self) -> &'static str {
        match self.p {
            Some(p) if p < 0.001 => "***",
            Some(p) if p < 0.01 => "**",
            Some(p) if p < 0.05 => "*",
            _ => "",
        }
    }
}

/// Correlation sweep outcome: results in spec order plus per-pair notes
/// (skipped pairs, excluded non-positive values).
#[derive(Debug, Clone, Default)]
pub struct CorrelationReport {
    pub results: Vec<CorrelationResult>,
    pub warnings: Vec<String>,
}

/// Runs every spec pair with pairwise deletion of missing values. Unknown
/// names fail the whole sweep; degenerate pairs are recorded and skipped.
pub fn correlate_all(
    metrics: &[CountryMetrics],
    indicators: &IndicatorTable,
    spec: &[CorrelationSpec],
) -> Result<CorrelationReport> {
    for row in spec {
        if !CountryMetrics::FEATURES.contains(&row.feature.as_str()) {
            return Err(Error::invalid(format!(
                "unknown feature {:?}; valid features: {}",
                row.feature,
                CountryMetrics::FEATURES.join(", ")
            )));
        }
        if !indicators.contains_indicator(&row.indicator) {
            return Err(Error::invalid(format!(
                "unknown indicator {:?}; valid indicators: {}",
                row.indicator,
                indicators.names().join(", ")
            )));
        }
    }

    let mut report = CorrelationReport::default();
    for row in spec {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut excluded_nonpositive = 0usize;
        for m in metrics {
            let Some(x) = m.feature(&row.feature) else { continue };
            let Some(y) = indicators.get(m.country, &row.indicator) else { continue };
            match (row.transform_feature.apply(x), row.transform_indicator.apply(y)) {
                (Some(x), Some(y)) => {
                    xs.push(x);
                    ys.push(y);
                }
                _ => excluded_nonpositive += 1,
            }
        }
        if excluded_nonpositive > 0 {
            report.warnings.push(format!(
                "{} vs {}: excluded {excluded_nonpositive} non-positive value(s) under log10",
                row.feature, row.indicator
            ));
        }
        match pearson(&xs, &ys) {
            Ok(test) => report.results.push(CorrelationResult {
                feature: row.feature.clone(),
                indicator: row.indicator.clone(),
                transform_feature: row.transform_feature,
                transform_indicator: row.transform_indicator,
                n: test.n,
                r: test.r,
                p: test.p,
            }),
            Err(e) => report.warnings.push(format!(
                "{} vs {}: skipped ({e})",
                row.feature, row.indicator
            )),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn pearson_perfect_lines() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let up: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let test = pearson(&x, &up).unwrap();
        close(test.r, 1.0, 1e-15);
        close(test.p.unwrap(), 0.0, 1e-12);
        let down: Vec<f64> = x.iter().map(|v| -v).collect();
        close(pearson(&x, &down).unwrap().r, -1.0, 1e-15);
    }

    #[test]
    fn pearson_classic_critical_value() {
        // r chosen so that t = r√((n−2)/(1−r²)) hits the 5% point at 8 df.
        let r = 0.6319;
        let n = 10usize;
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        // Build y with exactly the requested correlation against x.
        let zx = zscores(&x);
        let basis = residual_basis(&x);
        let y: Vec<f64> = zx
            .iter()
            .zip(&basis)
            .map(|(&z, &e)| r * z + (1.0 - r * r).sqrt() * e)
            .collect();
        let test = pearson(&x, &y).unwrap();
        close(test.r, r, 1e-12);
        close(test.p.unwrap(), 0.05, 5e-3);
    }

    // A unit vector orthogonal to both 1 and zscores(x), for constructing
    // samples with an exact target correlation.
    fn residual_basis(x: &[f64]) -> Vec<f64> {
        let zx = zscores(x);
        let n = x.len();
        let mut e: Vec<f64> = (0..n).map(|i| ((i * i) % 7) as f64).collect();
        let me = mean(&e);
        let proj: f64 = e.iter().zip(&zx).map(|(a, b)| a * b).sum::<f64>() / n as f64;
        for i in 0..n {
            e[i] -= me + proj * zx[i];
        }
        let norm = population_std(&e);
        e.iter().map(|v| v / norm).collect()
    }

    #[test]
    fn pearson_rejects_constants() {
        let err = pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(err.to_string().contains("zero variance"));
    }

    #[test]
    fn pearson_n2_has_no_p() {
        let test = pearson(&[0.0, 1.0], &[3.0, 5.0]).unwrap();
        close(test.r, 1.0, 1e-15);
        assert_eq!(test.p, None);
    }

    #[test]
    fn jarque_bera_near_normal_sample() {
        // Exact normal quantiles: skewness 0, slightly light tails.
        let n = 100;
        let x: Vec<f64> = (1..=n)
            .map(|i| crate::special::normal_inv_cdf((i as f64 - 0.5) / n as f64))
            .collect();
        let test = jarque_bera(&x).unwrap();
        close(test.skewness, 0.0, 1e-10);
        assert!(test.excess_kurtosis < 0.0 && test.excess_kurtosis > -0.5);
        assert!(test.p > 0.9, "p = {}", test.p);
    }

    #[test]
    fn jarque_bera_affine_invariance() {
        let x: Vec<f64> = (0..40).map(|i| ((i * 37) % 19) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -3.5 * v + 11.0).collect();
        let a = jarque_bera(&x).unwrap();
        let b = jarque_bera(&y).unwrap();
        close(a.statistic, b.statistic, 1e-9);
        close(a.p, b.p, 1e-12);
    }

    #[test]
    fn jarque_bera_minimum_n() {
        assert!(jarque_bera(&[1.0; 7]).is_err());
        assert!(jarque_bera(&[2.0; 12]).is_err()); // constant
    }

    #[test]
    fn qq_quantiles_for_two_points() {
        let points = qq_points(&[0.0, 1.0]).unwrap();
        close(points[0].0, -0.674_489_750_196_081_7, 1e-12);
        close(points[1].0, 0.674_489_750_196_081_7, 1e-12);
        close(points[0].1, -1.0, 1e-15);
        close(points[1].1, 1.0, 1e-15);
    }

    #[test]
    fn qq_fixed_point_of_normal_quantiles() {
        // Feeding the theoretical quantiles back in is a fixed point up to
        // the finite-sample scale: the quantile set's own std is slightly
        // below 1, so samples are theoretical / std exactly, and the gap to
        // y = x vanishes as n grows.
        for (n, tol) in [(60usize, 0.03), (10_000, 0.005)] {
            let x: Vec<f64> = (1..=n)
                .map(|i| crate::special::normal_inv_cdf((i as f64 - 0.5) / n as f64))
                .collect();
            let std = crate::stats::population_std(&x);
            for (theoretical, sample) in qq_points(&x).unwrap() {
                close(sample, theoretical / std, 1e-9);
                close(sample, theoretical, tol);
            }
        }
    }

    #[test]
    fn stars_thresholds() {
        let mk = |p: Option<f64>| CorrelationResult {
            feature: "x".into(),
            indicator: "y".into(),
            transform_feature: Transform::Identity,
            transform_indicator: Transform::Identity,
            n: 10,
            r: 0.5,
            p,
        };
        assert_eq!(mk(Some(0.0005)).stars(), "***");
        assert_eq!(mk(Some(0.005)).stars(), "**");
        assert_eq!(mk(Some(0.04)).stars(), "*");
        assert_eq!(mk(Some(0.05)).stars(), "");
        assert_eq!(mk(None).stars(), "");
    }

    #[test]
    fn transform_parsing() {
        assert_eq!(Transform::parse("log10").unwrap(), Transform::Log10);
        assert_eq!(Transform::parse("").unwrap(), Transform::Identity);
        assert!(Transform::parse("sqrt").is_err());
        assert_eq!(Transform::Log10.apply(-1.0), None);
        assert_eq!(Transform::Log10.apply(100.0), Some(2.0));
    }
}
