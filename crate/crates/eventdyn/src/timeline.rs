//! Cumulative per-category event timelines, grouped by country or continent,
//! on a shared monthly grid per group.

use std::collections::{BTreeMap, BTreeSet};

use crate::dynamics::{month_index, month_of_index};
use crate::error::{Error, Result};
use crate::ingest::{CountryCode, EventLog};
use crate::reference::ContinentMap;
use crate::stats::zscores;

/// How events are grouped into timeline series.
#[derive(Debug, Clone, Copy)]
pub enum Grouping<'a> {
    /// One group per country code.
    Country,
    /// One group per continent; countries missing from the map are excluded.
    Continent(&'a ContinentMap),
}

/// Monthly cumulative counts for one (group, category) pair. All series of a
/// group share the group's month grid, so empty months carry the running
/// total forward.
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineSeries {
    pub group: String,
    pub category: String,
    /// (year, month 1–12) per grid point.
    pub months: Vec<(i32, u32)>,
    pub cumulative: Vec<u64>,
    /// Z-scores of the cumulative values over this series' own grid.
    pub zscores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimelineReport {
    /// Sorted by group, then category.
    pub series: Vec<TimelineSeries>,
    /// Countries dropped under continent grouping, ascending.
    pub excluded_countries: Vec<CountryCode>,
}

/// Builds cumulative monthly event counts per (group, category), z-scored
/// per series. Errors on an empty log.
pub fn cumulative_category_timeline(
    log: &EventLog,
    grouping: Grouping<'_>,
) -> Result<TimelineReport> {
    if log.is_empty() {
        return Err(Error::degenerate("no events to build timelines from"));
    }

    // group → (category, month index) → count, plus the group's month span.
    let mut counts: BTreeMap<String, BTreeMap<(String, i64), u64>> = BTreeMap::new();
    let mut spans: BTreeMap<String, (i64, i64)> = BTreeMap::new();
    let mut excluded: BTreeSet<CountryCode> = BTreeSet::new();

    for event in log {
        let group = match grouping {
            Grouping::Country => event.country.as_str().to_string(),
            Grouping::Continent(map) => match map.get(event.country) {
                Some(continent) => continent.to_string(),
                None => {
                    excluded.insert(event.country);
                    continue;
                }
            },
        };
        let month = month_index(event.date);
        spans
            .entry(group.clone())
            .and_modify(|(lo, hi)| {
                *lo = (*lo).min(month);
                *hi = (*hi).max(month);
            })
            .or_insert((month, month));
        *counts
            .entry(group)
            .or_default()
            .entry((event.category.clone(), month))
            .or_insert(0) += 1;
    }

    if counts.is_empty() {
        return Err(Error::degenerate(
            "no events matched the continent map; nothing to build timelines from",
        ));
    }

    let mut series = Vec::new();
    for (group, cells) in &counts {
        let (lo, hi) = spans[group];
        let months: Vec<(i32, u32)> = (lo..=hi).map(month_of_index).collect();
        let categories: BTreeSet<&String> = cells.keys().map(|(c, _)| c).collect();
        for category in categories {
            let mut running = 0u64;
            let cumulative: Vec<u64> = (lo..=hi)
                .map(|m| {
                    running += cells.get(&(category.clone(), m)).copied().unwrap_or(0);
                    running
                })
                .collect();
            let values: Vec<f64> = cumulative.iter().map(|&v| v as f64).collect();
            series.push(TimelineSeries {
                group: group.clone(),
                category: category.clone(),
                months: months.clone(),
                cumulative,
                zscores: zscores(&values),
            });
        }
    }

    Ok(TimelineReport { series, excluded_countries: excluded.into_iter().collect() })
}
