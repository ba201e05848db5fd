//! External per-country indicator tables (`country,<name>,…` CSV) with
//! explicit missing values.

use std::collections::BTreeMap;
use std::io;

use crate::error::{Error, Result};
use crate::ingest::CountryCode;

/// Country × indicator matrix; `None` cells are missing, never zero.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorTable {
    names: Vec<String>,
    rows: BTreeMap<CountryCode, Vec<Option<f64>>>,
}

impl IndicatorTable {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::invalid("indicator table needs at least one column"));
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::invalid(format!("indicator column {} has no name", i + 2)));
            }
            if names[..i].contains(name) {
                return Err(Error::invalid(format!("duplicate indicator column {name:?}")));
            }
        }
        Ok(IndicatorTable { names, rows: BTreeMap::new() })
    }

    /// Adds one country row; `values` must align with `names`.
    pub fn insert_row(&mut self, country: CountryCode, values: Vec<Option<f64>>) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::invalid(format!(
                "row for {country} has {} values, expected {}",
                values.len(),
                self.names.len()
            )));
        }
        if self.rows.insert(country, values).is_some() {
            return Err(Error::invalid(format!("duplicate country row {country}")));
        }
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn contains_indicator(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn countries(&self) -> impl Iterator<Item = CountryCode> + '_ {
        self.rows.keys().copied()
    }

    /// Number of country rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// One cell; `None` when the country, the indicator, or the value is missing.
    pub fn get(&self, country: CountryCode, indicator: &str) -> Option<f64> {
        let idx = self.names.iter().position(|n| n == indicator)?;
        self.rows.get(&country)?[idx]
    }

    /// Non-missing values of one indicator in country-code order.
    pub fn column(&self, indicator: &str) -> Option<Vec<(CountryCode, f64)>> {
        let idx = self.names.iter().position(|n| n == indicator)?;
        Some(
            self.rows
                .iter()
                .filter_map(|(&c, values)| values[idx].map(|v| (c, v)))
                .collect(),
        )
    }
}

/// Reads an indicator CSV: header `country,<name1>,…`; `NA` or empty cells
/// are missing. Duplicate countries and non-numeric cells are hard errors.
pub fn parse_indicators<R: io::Read>(source: R) -> Result<IndicatorTable> {
    let mut reader = csv::Reader::from_reader(source);
    let headers = reader.headers()?.clone();
    let mut columns = headers.iter();
    if columns.next() != Some("country") {
        return Err(Error::invalid("indicator CSV must start with a `country` column"));
    }
    let mut table = IndicatorTable::new(columns.map(str::to_string).collect())?;

    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != table.names.len() + 1 {
            return Err(Error::invalid(format!(
                "line {line}: expected {} fields, got {}",
                table.names.len() + 1,
                record.len()
            )));
        }
        let country = CountryCode::new(&record[0])
            .map_err(|_| Error::invalid(format!("line {line}: invalid country code {:?}", &record[0])))?;
        let mut values = Vec::with_capacity(table.names.len());
        for (idx, cell) in record.iter().skip(1).enumerate() {
            let cell = cell.trim();
            if cell.is_empty() || cell == "NA" {
                values.push(None);
            } else {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => values.push(Some(v)),
                    _ => {
                        return Err(Error::invalid(format!(
                            "line {line}, column {:?}: non-numeric value {cell:?}",
                            table.names[idx]
                        )))
                    }
                }
            }
        }
        table
            .insert_row(country, values)
            .map_err(|e| Error::invalid(format!("line {line}: {e}")))?;
    }
    Ok(table)
}
