//! Serialization of analysis results to stable on-disk formats: CSV with
//! fixed 6-decimal floats, JSON at full precision, and atomic file writes.

use std::path::Path;

use serde_json::json;

use crate::cluster::{ClusterAssignment, Dendrogram};
use crate::compare::IndicatorComparison;
use crate::dynamics::CountryMetrics;
use crate::error::{Error, Result};
use crate::ingest::CountryCode;
use crate::prevalence::RankMatrix;
use crate::stats::{CorrelationResult, NormalityTest};
use crate::timeline::TimelineReport;

/// Fixed CSV float formatting: 6 decimal places.
pub fn fmt_csv(x: f64) -> String {
    format!("{x:.6}")
}

/// Writes via a temporary file in the target directory plus rename, so
/// readers never observe a partial file. Creates parent directories.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(parent)?;
    let tmp = tempfile::NamedTempFile::new_in(parent)?;
    std::io::Write::write_all(&mut tmp.as_file(), content.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn csv_to_string(writer: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(writer.into_inner().expect("in-memory csv writer"))
        .expect("csv output is utf-8")
}

fn opt_csv(v: Option<f64>) -> String {
    v.map(fmt_csv).unwrap_or_default()
}

/// The per-country metrics table: one row per country, 19 columns, floats at
/// 6 decimals, undefined metrics as empty cells.
pub fn metrics_csv(metrics: &[CountryMetrics]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["country"];
    header.extend(CountryMetrics::FEATURES);
    w.write_record(&header).expect("write header");
    for m in metrics {
        w.write_record([
            m.country.as_str().to_string(),
            m.tec.to_string(),
            fmt_csv(m.log_tec),
            m.n_trans.to_string(),
            fmt_csv(m.log_n_trans),
            fmt_csv(m.mu_trans),
            fmt_csv(m.sigma_trans),
            fmt_csv(m.cov),
            fmt_csv(m.mu_w),
            fmt_csv(m.mu_m),
            fmt_csv(m.mu_q),
            fmt_csv(m.cov_w),
            fmt_csv(m.cov_m),
            fmt_csv(m.cov_q),
            opt_csv(m.p_m),
            opt_csv(m.p_q),
            opt_csv(m.beta),
            m.n_cat.to_string(),
            fmt_csv(m.d_cat),
        ])
        .expect("write row");
    }
    csv_to_string(w)
}

/// Full-precision JSON twin of [`metrics_csv`]; undefined metrics are null.
pub fn metrics_json(metrics: &[CountryMetrics]) -> Result<String> {
    Ok(serde_json::to_string_pretty(metrics)? + "\n")
}

/// Integer rank matrix: first column `country`, one column per category.
pub fn rank_matrix_csv(matrix: &RankMatrix) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["country".to_string()];
    header.extend(matrix.categories.iter().cloned());
    w.write_record(&header).expect("write header");
    for (country, row) in matrix.countries.iter().zip(&matrix.ranks) {
        let mut record = vec![country.as_str().to_string()];
        record.extend(row.iter().map(u32::to_string));
        w.write_record(&record).expect("write row");
    }
    csv_to_string(w)
}

/// Z-scored twin of [`rank_matrix_csv`], 6-decimal floats.
pub fn rank_matrix_z_csv(matrix: &RankMatrix, z: &[Vec<f64>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["country".to_string()];
    header.extend(matrix.categories.iter().cloned());
    w.write_record(&header).expect("write header");
    for (country, row) in matrix.countries.iter().zip(z) {
        let mut record = vec![country.as_str().to_string()];
        record.extend(row.iter().map(|&v| fmt_csv(v)));
        w.write_record(&record).expect("write row");
    }
    csv_to_string(w)
}

/// Nested dendrogram tree: leaves as `{"id": code}`, internal nodes as
/// `{"left", "right", "height", "size"}`.
pub fn dendrogram_json(dendrogram: &Dendrogram, labels: &[CountryCode]) -> Result<String> {
    let n = dendrogram.n_leaves;
    if labels.len() != n {
        return Err(Error::invalid("labels do not match dendrogram leaves"));
    }
    let mut nodes: Vec<Option<serde_json::Value>> = labels
        .iter()
        .map(|l| Some(json!({ "id": l.as_str() })))
        .collect();
    for merge in &dendrogram.merges {
        let left = nodes[merge.left].take().ok_or_else(|| {
            Error::invalid("dendrogram references a node twice")
        })?;
        let right = nodes[merge.right].take().ok_or_else(|| {
            Error::invalid("dendrogram references a node twice")
        })?;
        nodes.push(Some(json!({
            "left": left,
            "right": right,
            "height": merge.height,
            "size": merge.size,
        })));
    }
    let root = nodes
        .pop()
        .flatten()
        .ok_or_else(|| Error::invalid("empty dendrogram"))?;
    Ok(serde_json::to_string_pretty(&root)? + "\n")
}

/// Flat clustering as `country,cluster` rows.
pub fn assignment_csv(assignment: &ClusterAssignment) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["country", "cluster"]).expect("write header");
    for (label, id) in assignment.labels.iter().zip(&assignment.cluster_ids) {
        w.write_record([label.as_str().to_string(), id.to_string()]).expect("write row");
    }
    csv_to_string(w)
}

/// Per-cluster mean profiles: `cluster,<category...>` rows.
pub fn profiles_csv(categories: &[String], profiles: &[Vec<f64>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["cluster".to_string()];
    header.extend(categories.iter().cloned());
    w.write_record(&header).expect("write header");
    for (i, profile) in profiles.iter().enumerate() {
        let mut record = vec![(i + 1).to_string()];
        record.extend(profile.iter().map(|&v| fmt_csv(v)));
        w.write_record(&record).expect("write row");
    }
    csv_to_string(w)
}

fn json_opt(v: Option<f64>) -> serde_json::Value {
    match v {
        Some(v) => json!(v),
        None => serde_json::Value::Null,
    }
}

/// Cluster-versus-indicator test report: per indicator the ANOVA
/// `{"F", "p"}`, pairwise `[{"a", "b", "W", "p"}]`, and per-group boxplot
/// summaries.
pub fn indicator_tests_json(comparisons: &[IndicatorComparison]) -> Result<String> {
    let report: Vec<serde_json::Value> = comparisons
        .iter()
        .map(|c| {
            let anova = match &c.anova {
                Some(a) => json!({ "F": a.f, "p": a.p }),
                None => serde_json::Value::Null,
            };
            let pairwise: Vec<serde_json::Value> = c
                .pairwise
                .iter()
                .map(|p| json!({ "a": p.a, "b": p.b, "W": json_opt(p.w), "p": json_opt(p.p) }))
                .collect();
            let groups: Vec<serde_json::Value> = c
                .groups
                .iter()
                .map(|g| match &g.summary {
                    Some(s) => json!({
                        "cluster": g.cluster,
                        "n": g.n,
                        "mean": s.mean,
                        "median": s.median,
                        "q1": s.q1,
                        "q3": s.q3,
                        "whisker_low": s.whisker_low,
                        "whisker_high": s.whisker_high,
                        "outliers": s.outliers,
                    }),
                    None => json!({ "cluster": g.cluster, "n": g.n }),
                })
                .collect();
            json!({
                "indicator": c.indicator,
                "anova": anova,
                "pairwise": pairwise,
                "groups": groups,
            })
        })
        .collect();
    Ok(serde_json::to_string_pretty(&report)? + "\n")
}

/// Correlation sweep as `feature,indicator,n,r,p,stars`; p empty when
/// undefined.
pub fn correlations_csv(results: &[CorrelationResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["feature", "indicator", "n", "r", "p", "stars"])
        .expect("write header");
    for res in results {
        w.write_record([
            res.feature.clone(),
            res.indicator.clone(),
            res.n.to_string(),
            fmt_csv(res.r),
            opt_csv(res.p),
            res.stars().to_string(),
        ])
        .expect("write row");
    }
    csv_to_string(w)
}

/// Normality table as `variable,n,skewness,excess_kurtosis,jb,p`.
pub fn normality_csv(rows: &[(String, NormalityTest)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["variable", "n", "skewness", "excess_kurtosis", "jb", "p"])
        .expect("write header");
    for (variable, test) in rows {
        w.write_record([
            variable.clone(),
            test.n.to_string(),
            fmt_csv(test.skewness),
            fmt_csv(test.excess_kurtosis),
            fmt_csv(test.statistic),
            fmt_csv(test.p),
        ])
        .expect("write row");
    }
    csv_to_string(w)
}

/// Q-Q plot data as `theoretical,sample` pairs.
pub fn qq_csv(points: &[(f64, f64)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theoretical", "sample"]).expect("write header");
    for &(theoretical, sample) in points {
        w.write_record([fmt_csv(theoretical), fmt_csv(sample)]).expect("write row");
    }
    csv_to_string(w)
}

/// Cumulative timelines as `group,category,year,month,cumulative,zscore`.
pub fn timelines_csv(report: &TimelineReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["group", "category", "year", "month", "cumulative", "zscore"])
        .expect("write header");
    for series in &report.series {
        for (i, &(year, month)) in series.months.iter().enumerate() {
            w.write_record([
                series.group.clone(),
                series.category.clone(),
                year.to_string(),
                month.to_string(),
                series.cumulative[i].to_string(),
                fmt_csv(series.zscores[i]),
            ])
            .expect("write row");
        }
    }
    csv_to_string(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Merge;

    fn code(s: &str) -> CountryCode {
        CountryCode::new(s).unwrap()
    }

    #[test]
    fn float_formatting_is_fixed_width() {
        assert_eq!(fmt_csv(0.5), "0.500000");
        assert_eq!(fmt_csv(-1.0), "-1.000000");
        assert_eq!(fmt_csv(1.0 / 3.0), "0.333333");
    }

    #[test]
    fn rank_matrix_quotes_awkward_category_names() {
        let matrix = RankMatrix {
            countries: vec![code("US")],
            categories: vec!["Food, Drink".to_string()],
            ranks: vec![vec![1]],
            sentinel_rank: 1,
        };
        let csv = rank_matrix_csv(&matrix);
        assert!(csv.starts_with("country,\"Food, Drink\"\n"));
        assert!(csv.contains("US,1\n"));
    }

    #[test]
    fn dendrogram_nests_merges() {
        let dg = Dendrogram {
            n_leaves: 3,
            merges: vec![
                Merge { left: 0, right: 1, height: 1.0, size: 2 },
                Merge { left: 2, right: 3, height: 2.0, size: 3 },
            ],
        };
        let labels = vec![code("AA"), code("AB"), code("AC")];
        let rendered = dendrogram_json(&dg, &labels).unwrap();
        let value: serde_json::Value = serde_json::from_str(&rendered).unwrap();
        assert_eq!(value["size"], 3);
        assert_eq!(value["left"]["id"], "AC");
        assert_eq!(value["right"]["left"]["id"], "AA");
        assert_eq!(value["right"]["size"], 2);
    }

    #[test]
    fn atomic_write_creates_directories() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        write_atomic(&path, "a,b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n");
        // Overwrite in place.
        write_atomic(&path, "c,d\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "c,d\n");
    }

    #[test]
    fn missing_values_render_empty() {
        use crate::ingest::{build_transactions, EventLog, EventRecord};
        use chrono::NaiveDate;
        let log = EventLog::new(vec![EventRecord {
            date: NaiveDate::from_ymd_opt(2015, 1, 1).unwrap(),
            country: code("US"),
            city: String::new(),
            category: "Tech".to_string(),
        }]);
        let tables = build_transactions(&log);
        let metrics =
            vec![crate::dynamics::compute_country_metrics(&tables[&code("US")]).unwrap()];
        let csv = metrics_csv(&metrics);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0].split(',').count(), 19);
        // p_m, p_q, beta are all undefined for a single transaction.
        assert!(lines[1].contains(",,,"));
        let json = metrics_json(&metrics).unwrap();
        assert!(json.contains("\"beta\": null"));
    }
}
