//! Event-log ingestion: record validation, country filtering, and grouping
//! into per-country daily transaction tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, BufRead};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taxonomy::CategoryTaxonomy;

/// Rejected lines kept verbatim in a parse report; the total is always counted.
pub const MAX_REJECTIONS_KEPT: usize = 1_000;

/// ISO 3166-1 alpha-2 country code: exactly two ASCII uppercase letters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CountryCode([u8; 2]);

impl CountryCode {
    pub fn new(code: &str) -> Result<Self> {
        let b = code.as_bytes();
        if b.len() == 2 && b[0].is_ascii_uppercase() && b[1].is_ascii_uppercase() {
            Ok(CountryCode([b[0], b[1]]))
        } else {
            Err(Error::invalid(format!(
                "country code must be two uppercase ASCII letters, got {code:?}"
            )))
        }
    }

    pub fn as_str(&self) -> &str {
        // Always valid UTF-8: constructed from ASCII uppercase only.
        std::str::from_utf8(&self.0).unwrap()
    }
}

impl fmt::Display for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for CountryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CountryCode({})", self.as_str())
    }
}

impl FromStr for CountryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s)
    }
}

impl TryFrom<String> for CountryCode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::new(&s)
    }
}

impl From<CountryCode> for String {
    fn from(code: CountryCode) -> String {
        code.as_str().to_string()
    }
}

/// One event: a dated, categorized occurrence in a country.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub date: NaiveDate,
    pub country: CountryCode,
    /// Free text, may be empty; carried for provenance, unused by metrics.
    pub city: String,
    pub category: String,
}

/// Ordered collection of event records.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    pub events: Vec<EventRecord>,
}

impl EventLog {
    pub fn new(events: Vec<EventRecord>) -> Self {
        EventLog { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EventRecord> {
        self.events.iter()
    }

    /// Event count per country.
    pub fn country_counts(&self) -> BTreeMap<CountryCode, u64> {
        let mut counts = BTreeMap::new();
        for e in &self.events {
            *counts.entry(e.country).or_insert(0) += 1;
        }
        counts
    }

    /// Writes `date,country,city,category` CSV; inverse of CSV parsing.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["date", "country", "city", "category"])?;
        for e in &self.events {
            let date = e.date.format("%Y-%m-%d").to_string();
            w.write_record([date.as_str(), e.country.as_str(), &e.city, &e.category])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl<'a> IntoIterator for &'a EventLog {
    type Item = &'a EventRecord;
    type IntoIter = std::slice::Iter<'a, EventRecord>;

    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

/// Event-log serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventFormat {
    Csv,
    Jsonl,
}

/// Parser switches.
#[derive(Debug, Clone, Copy)]
pub struct ParseOptions<'a> {
    pub format: EventFormat,
    /// Abort on the first rejected line instead of collecting rejections.
    pub strict: bool,
    /// When set, strict mode also rejects categories outside this taxonomy.
    pub taxonomy: Option<&'a CategoryTaxonomy>,
}

impl ParseOptions<'_> {
    /// Lenient parsing with no taxonomy check.
    pub fn new(format: EventFormat) -> Self {
        ParseOptions { format, strict: false, taxonomy: None }
    }
}

/// A skipped input line with the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectedLine {
    /// 1-based source line (the CSV header counts as line 1).
    pub line: u64,
    pub reason: String,
}

/// Parse outcome: accepted records plus a truncated rejection report.
#[derive(Debug, Clone, Default)]
pub struct ParsedLog {
    pub log: EventLog,
    /// At most [`MAX_REJECTIONS_KEPT`] entries, in input order.
    pub rejected: Vec<RejectedLine>,
    /// Full rejection count, never truncated.
    pub rejected_total: u64,
}

/// Reads an event log, keeping valid records in input order. Lenient mode
/// collects per-line rejections; strict mode fails on the first one.
pub fn parse_events<R: io::Read>(source: R, options: &ParseOptions) -> Result<ParsedLog> {
    match options.format {
        EventFormat::Csv => parse_events_csv(source, options),
        EventFormat::Jsonl => parse_events_jsonl(source, options),
    }
}

fn parse_events_csv<R: io::Read>(source: R, options: &ParseOptions) -> Result<ParsedLog> {
    let mut reader = csv::Reader::from_reader(source);
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::invalid(format!("event CSV is missing a {name:?} column")))
    };
    let (date, country, city, category) =
        (col("date")?, col("country")?, col("city")?, col("category")?);

    let mut out = ParsedLog::default();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let built = build_record(
                    record.get(date),
                    record.get(country),
                    record.get(city),
                    record.get(category),
                    options,
                );
                match built {
                    Ok(event) => out.log.events.push(event),
                    Err(reason) => reject(&mut out, line, reason, options)?,
                }
            }
            // Record-level CSV errors (field count, encoding) are recoverable;
            // only I/O failures abort a lenient parse.
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(e) => reject(&mut out, line, e.to_string(), options)?,
        }
    }
    Ok(out)
}

#[derive(Deserialize)]
struct RawEvent {
    date: String,
    country: String,
    #[serde(default)]
    city: String,
    category: String,
}

fn parse_events_jsonl<R: io::Read>(source: R, options: &ParseOptions) -> Result<ParsedLog> {
    let mut out = ParsedLog::default();
    for (idx, line) in io::BufReader::new(source).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawEvent>(&text) {
            Ok(raw) => {
                let built = build_record(
                    Some(&raw.date),
                    Some(&raw.country),
                    Some(&raw.city),
                    Some(&raw.category),
                    options,
                );
                match built {
                    Ok(event) => out.log.events.push(event),
                    Err(reason) => reject(&mut out, line_no, reason, options)?,
                }
            }
            Err(e) => reject(&mut out, line_no, format!("invalid JSON: {e}"), options)?,
        }
    }
    Ok(out)
}

fn build_record(
    date: Option<&str>,
    country: Option<&str>,
    city: Option<&str>,
    category: Option<&str>,
    options: &ParseOptions,
) -> std::result::Result<EventRecord, String> {
    let (Some(date), Some(country), Some(category)) = (date, country, category) else {
        return Err("missing field".to_string());
    };
    let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
        .map_err(|_| format!("invalid date {date:?}"))?;
    let country =
        CountryCode::new(country).map_err(|_| format!("invalid country code {country:?}"))?;
    if category.is_empty() {
        return Err("empty category".to_string());
    }
    if options.strict {
        if let Some(taxonomy) = options.taxonomy {
            if !taxonomy.contains(category) {
                return Err(format!("unknown category {category:?}"));
            }
        }
    }
    Ok(EventRecord {
        date,
        country,
        city: city.unwrap_or("").to_string(),
        category: category.to_string(),
    })
}

fn reject(out: &mut ParsedLog, line: u64, reason: String, options: &ParseOptions) -> Result<()> {
    if options.strict {
        return Err(Error::invalid(format!("line {line}: {reason}")));
    }
    out.rejected_total += 1;
    if out.rejected.len() < MAX_REJECTIONS_KEPT {
        out.rejected.push(RejectedLine { line, reason });
    }
    Ok(())
}

/// Keeps countries with at least `min_events` events, then the `top_n` of
/// those by total count; ties broken by country code ascending. Event order
/// is preserved.
pub fn filter_countries(log: &EventLog, min_events: u64, top_n: usize) -> EventLog {
    let mut eligible: Vec<(CountryCode, u64)> = log
        .country_counts()
        .into_iter()
        .filter(|&(_, n)| n >= min_events)
        .collect();
    eligible.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    eligible.truncate(top_n);
    let kept: BTreeSet<CountryCode> = eligible.into_iter().map(|(c, _)| c).collect();
    EventLog::new(
        log.events
            .iter()
            .filter(|e| kept.contains(&e.country))
            .cloned()
            .collect(),
    )
}

/// All events of one country on one day, as a category multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub date: NaiveDate,
    /// Category → positive event count; never empty.
    pub category_counts: BTreeMap<String, u64>,
}

impl Transaction {
    /// Number of events in this transaction (≥ 1).
    pub fn event_count(&self) -> u64 {
        self.category_counts.values().sum()
    }

    /// Distinct categories present that day, ascending.
    pub fn category_set(&self) -> impl Iterator<Item = &str> {
        self.category_counts.keys().map(String::as_str)
    }
}

/// One country's transactions, strictly ascending by date.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionTable {
    country: CountryCode,
    transactions: Vec<Transaction>,
}

impl TransactionTable {
    /// Validates strict date ordering and positive per-category counts.
    pub fn new(country: CountryCode, transactions: Vec<Transaction>) -> Result<Self> {
        for pair in transactions.windows(2) {
            if pair[0].date >= pair[1].date {
                return Err(Error::invalid(format!(
                    "transactions for {country} not strictly ascending at {}",
                    pair[1].date
                )));
            }
        }
        for t in &transactions {
            if t.category_counts.is_empty() || t.category_counts.values().any(|&n| n == 0) {
                return Err(Error::invalid(format!(
                    "transaction for {country} on {} has an empty category count",
                    t.date
                )));
            }
        }
        Ok(TransactionTable { country, transactions })
    }

    pub fn country(&self) -> CountryCode {
        self.country
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    /// Number of transactions (distinct active days).
    pub fn n_trans(&self) -> u64 {
        self.transactions.len() as u64
    }

    /// Total event count over the table.
    pub fn tec(&self) -> u64 {
        self.transactions.iter().map(Transaction::event_count).sum()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.transactions.first().map(|t| t.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.transactions.last().map(|t| t.date)
    }

    /// Day gaps between consecutive transactions; length `n_trans − 1`,
    /// every entry ≥ 1.
    pub fn inter_event_days(&self) -> Vec<u64> {
        self.transactions
            .windows(2)
            .map(|p| (p[1].date - p[0].date).num_days() as u64)
            .collect()
    }

    /// Event counts aggregated per category over the whole table.
    pub fn category_counts(&self) -> BTreeMap<String, u64> {
        let mut counts = BTreeMap::new();
        for t in &self.transactions {
            for (category, &n) in &t.category_counts {
                *counts.entry(category.clone()).or_insert(0) += n;
            }
        }
        counts
    }
}

/// Groups an event log by (country, day) into per-country transaction tables.
pub fn build_transactions(log: &EventLog) -> BTreeMap<CountryCode, TransactionTable> {
    let mut grouped: BTreeMap<CountryCode, BTreeMap<NaiveDate, BTreeMap<String, u64>>> =
        BTreeMap::new();
    for e in &log.events {
        *grouped
            .entry(e.country)
            .or_default()
            .entry(e.date)
            .or_default()
            .entry(e.category.clone())
            .or_insert(0) += 1;
    }
    grouped
        .into_iter()
        .map(|(country, days)| {
            let transactions = days
                .into_iter()
                .map(|(date, category_counts)| Transaction { date, category_counts })
                .collect();
            // Grouping by BTreeMap yields sorted dates and positive counts.
            (country, TransactionTable { country, transactions })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn parse_csv(text: &str) -> ParsedLog {
        parse_events(text.as_bytes(), &ParseOptions::new(EventFormat::Csv)).unwrap()
    }

    #[test]
    fn country_code_validation() {
        assert_eq!(CountryCode::new("US").unwrap().as_str(), "US");
        assert!(CountryCode::new("us").is_err());
        assert!(CountryCode::new("USA").is_err());
        assert!(CountryCode::new("U").is_err());
        assert!(CountryCode::new("1A").is_err());
    }

    #[test]
    fn parses_valid_csv_line() {
        let parsed = parse_csv("date,country,city,category\n2015-03-01,US,New York,Tech\n");
        assert_eq!(parsed.log.len(), 1);
        assert_eq!(parsed.rejected_total, 0);
        let e = &parsed.log.events[0];
        assert_eq!(e.date, date("2015-03-01"));
        assert_eq!(e.country.as_str(), "US");
        assert_eq!(e.city, "New York");
        assert_eq!(e.category, "Tech");
    }

    #[test]
    fn lenient_mode_collects_rejections() {
        let parsed = parse_csv(
            "date,country,city,category\n\
             2015-03-01,US,New York,Tech\n\
             2015-13-40,US,,Tech\n\
             2015-03-02,FR,Paris,Music\n",
        );
        assert_eq!(parsed.log.len(), 2);
        assert_eq!(parsed.rejected_total, 1);
        assert_eq!(parsed.rejected[0].line, 3);
        assert!(parsed.rejected[0].reason.contains("invalid date"));
    }

    #[test]
    fn strict_mode_aborts_on_first_rejection() {
        let options = ParseOptions {
            strict: true,
            ..ParseOptions::new(EventFormat::Csv)
        };
        let err = parse_events(
            "date,country,city,category\n2015-13-40,US,,Tech\n".as_bytes(),
            &options,
        )
        .unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn strict_mode_checks_taxonomy_membership() {
        let options = ParseOptions {
            strict: true,
            taxonomy: Some(CategoryTaxonomy::builtin()),
            format: EventFormat::Csv,
        };
        let good = "date,country,city,category\n2015-03-01,US,,Tech\n";
        assert_eq!(parse_events(good.as_bytes(), &options).unwrap().log.len(), 1);
        let bad = "date,country,city,category\n2015-03-01,US,,Quantum Basket Weaving\n";
        let err = parse_events(bad.as_bytes(), &options).unwrap_err();
        assert!(err.to_string().contains("unknown category"));
        // Lenient mode accepts categories outside the taxonomy.
        let lenient = ParseOptions { strict: false, ..options };
        assert_eq!(parse_events(bad.as_bytes(), &lenient).unwrap().log.len(), 1);
    }

    #[test]
    fn jsonl_roundtrip_of_fields() {
        let text = r#"{"date":"2015-03-01","country":"US","city":"New York","category":"Tech"}
{"date":"2015-03-02","country":"FR","category":"Music"}
not json
"#;
        let parsed =
            parse_events(text.as_bytes(), &ParseOptions::new(EventFormat::Jsonl)).unwrap();
        assert_eq!(parsed.log.len(), 2);
        assert_eq!(parsed.log.events[1].city, "");
        assert_eq!(parsed.rejected_total, 1);
        assert_eq!(parsed.rejected[0].line, 3);
    }

    #[test]
    fn csv_roundtrip_preserves_records() {
        let parsed = parse_csv(
            "date,country,city,category\n\
             2015-03-01,US,\"York, New\",Tech\n\
             2015-03-02,FR,,Music\n",
        );
        let mut buf = Vec::new();
        parsed.log.write_csv(&mut buf).unwrap();
        let reparsed = parse_events(buf.as_slice(), &ParseOptions::new(EventFormat::Csv)).unwrap();
        assert_eq!(reparsed.log, parsed.log);
    }

    #[test]
    fn filter_keeps_threshold_and_top_n() {
        let mut events = Vec::new();
        for _ in 0..100 {
            events.push(EventRecord {
                date: date("2015-01-01"),
                country: CountryCode::new("US").unwrap(),
                city: String::new(),
                category: "Tech".into(),
            });
        }
        for _ in 0..17 {
            events.push(EventRecord {
                date: date("2015-01-01"),
                country: CountryCode::new("FR").unwrap(),
                city: String::new(),
                category: "Tech".into(),
            });
        }
        let filtered = filter_countries(&EventLog::new(events), 18, 90);
        assert_eq!(filtered.len(), 100);
        assert!(filtered.iter().all(|e| e.country.as_str() == "US"));
    }

    #[test]
    fn filter_breaks_ties_by_code() {
        let mk = |code: &str| EventRecord {
            date: date("2015-01-01"),
            country: CountryCode::new(code).unwrap(),
            city: String::new(),
            category: "Tech".into(),
        };
        let log = EventLog::new(vec![mk("ZA"), mk("AU"), mk("ZA"), mk("AU")]);
        let filtered = filter_countries(&log, 1, 1);
        assert!(filtered.iter().all(|e| e.country.as_str() == "AU"));
    }

    #[test]
    fn transactions_group_by_country_and_day() {
        let mk = |d: &str, code: &str, cat: &str| EventRecord {
            date: date(d),
            country: CountryCode::new(code).unwrap(),
            city: String::new(),
            category: cat.into(),
        };
        let log = EventLog::new(vec![
            mk("2015-01-01", "US", "Tech"),
            mk("2015-01-01", "US", "Tech"),
            mk("2015-01-02", "US", "Music"),
        ]);
        let tables = build_transactions(&log);
        let us = &tables[&CountryCode::new("US").unwrap()];
        assert_eq!(us.n_trans(), 2);
        assert_eq!(us.tec(), 3);
        assert_eq!(us.transactions()[0].event_count(), 2);
        assert_eq!(
            us.transactions()[0].category_set().collect::<Vec<_>>(),
            vec!["Tech"]
        );
        assert_eq!(us.inter_event_days(), vec![1]);
    }

    #[test]
    fn table_constructor_validates_order() {
        let us = CountryCode::new("US").unwrap();
        let t = |d: &str| Transaction {
            date: date(d),
            category_counts: BTreeMap::from([("Tech".to_string(), 1)]),
        };
        assert!(TransactionTable::new(us, vec![t("2015-01-02"), t("2015-01-01")]).is_err());
        assert!(TransactionTable::new(us, vec![t("2015-01-01"), t("2015-01-02")]).is_ok());
    }
}
