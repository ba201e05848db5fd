//! Bundled reference data: per-country activity/indicator summaries and a
//! country → continent map, both embedded at compile time.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use crate::error::{Error, Result};
use crate::indicators::IndicatorTable;
use crate::ingest::CountryCode;

/// One row of the bundled country summary: observed activity totals plus
/// socio-economic indicators. `None` marks indicators unavailable for that
/// country.
#[derive(Debug, Clone, PartialEq)]
pub struct CountrySummary {
    pub country: String,
    pub code: CountryCode,
    pub lat: f64,
    pub lon: f64,
    pub n_city: u64,
    pub tec: u64,
    pub n_cat: u64,
    pub n_trans: u64,
    /// Population, thousands.
    pub population: f64,
    /// GDP per capita, USD.
    pub gdp: f64,
    /// Human development index.
    pub hdi: Option<f64>,
    /// Mobile subscriptions per 100 inhabitants.
    pub msubs: Option<f64>,
    /// Internet users per 100 inhabitants.
    pub intus: Option<f64>,
}

static SUMMARIES: LazyLock<Vec<CountrySummary>> = LazyLock::new(|| {
    parse_summaries(include_str!("../data/country_summary.csv"))
        .expect("bundled country summary is valid")
});

fn parse_summaries(raw: &str) -> Result<Vec<CountrySummary>> {
    let mut reader = csv::Reader::from_reader(raw.as_bytes());
    let required = |field: Option<&str>, name: &str| -> Result<f64> {
        let field = field.ok_or_else(|| Error::invalid(format!("missing field {name}")))?;
        field
            .parse::<f64>()
            .map_err(|_| Error::invalid(format!("non-numeric {name}: {field:?}")))
    };
    let optional = |field: Option<&str>| -> Result<Option<f64>> {
        match field {
            None | Some("NA") | Some("") => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::invalid(format!("non-numeric indicator: {v:?}"))),
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let f = |i: usize| record.get(i);
        rows.push(CountrySummary {
            country: f(0).unwrap_or_default().to_string(),
            code: f(1).unwrap_or_default().parse()?,
            lat: required(f(2), "lat")?,
            lon: required(f(3), "lon")?,
            n_city: required(f(4), "n_city")? as u64,
            tec: required(f(5), "tec")? as u64,
            n_cat: required(f(6), "n_cat")? as u64,
            n_trans: required(f(7), "n_trans")? as u64,
            population: required(f(8), "population")?,
            gdp: required(f(9), "gdp")?,
            hdi: optional(f(10))?,
            msubs: optional(f(11))?,
            intus: optional(f(12))?,
        });
    }
    Ok(rows)
}

/// The bundled 90-country summary, ordered by descending total event count.
pub fn country_summaries() -> &'static [CountrySummary] {
    &SUMMARIES
}

/// The bundled summary reshaped as an indicator table with columns
/// `tec`, `population`, `gdp`, `hdi`, `msubs`, `intus`.
pub fn summary_indicators() -> IndicatorTable {
    let names = ["tec", "population", "gdp", "hdi", "msubs", "intus"];
    let mut table =
        IndicatorTable::new(names.iter().map(|s| s.to_string()).collect()).expect("valid names");
    for row in country_summaries() {
        table
            .insert_row(
                row.code,
                vec![
                    Some(row.tec as f64),
                    Some(row.population),
                    Some(row.gdp),
                    row.hdi,
                    row.msubs,
                    row.intus,
                ],
            )
            .expect("bundled rows are unique");
    }
    table
}

/// Country code → continent name lookup.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContinentMap {
    map: BTreeMap<CountryCode, String>,
}

static CONTINENTS: LazyLock<ContinentMap> = LazyLock::new(|| {
    let raw = include_str!("../data/continents.csv");
    let mut reader = csv::Reader::from_reader(raw.as_bytes());
    reader
        .records()
        .map(|record| {
            let record = record.expect("bundled continent map is valid");
            let code: CountryCode = record.get(0).unwrap_or_default().parse().unwrap();
            (code, record.get(1).unwrap_or_default().to_string())
        })
        .collect()
});

impl ContinentMap {
    /// The bundled map covering every country in [`country_summaries`].
    pub fn builtin() -> &'static ContinentMap {
        &CONTINENTS
    }

    pub fn get(&self, country: CountryCode) -> Option<&str> {
        self.map.get(&country).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl FromIterator<(CountryCode, String)> for ContinentMap {
    fn from_iter<I: IntoIterator<Item = (CountryCode, String)>>(iter: I) -> Self {
        ContinentMap { map: iter.into_iter().collect() }
    }
}
