//! The event-category taxonomy: category names with their mid- and top-level
//! groupings. A built-in 33-category table is bundled with the crate.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use crate::error::{Error, Result};

/// One taxonomy row. The mid/top grouping is per category; a mid-level name
/// may map to several top-level groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyEntry {
    pub category: String,
    pub mid_level: String,
    pub top_level: String,
}

/// Immutable category table with unique category names.
#[derive(Debug, Clone)]
pub struct CategoryTaxonomy {
    entries: Vec<TaxonomyEntry>,
    index: BTreeMap<String, usize>,
}

static BUILTIN: LazyLock<CategoryTaxonomy> = LazyLock::new(|| {
    CategoryTaxonomy::from_csv(include_str!("../data/taxonomy.csv"))
        .expect("bundled taxonomy parses")
});

impl CategoryTaxonomy {
    /// The bundled 33-category taxonomy (11 mid-level, 7 top-level groups).
    pub fn builtin() -> &'static CategoryTaxonomy {
        &BUILTIN
    }

    /// Parses `category,mid_level,top_level` CSV with a header row.
    pub fn from_csv(data: &str) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(data.as_bytes());
        let mut entries = Vec::new();
        let mut index = BTreeMap::new();
        for record in reader.records() {
            let record = record?;
            let field = |i: usize, name: &str| -> Result<String> {
                match record.get(i).map(str::trim) {
                    Some(v) if !v.is_empty() => Ok(v.to_string()),
                    _ => Err(Error::invalid(format!("taxonomy row missing {name}"))),
                }
            };
            let entry = TaxonomyEntry {
                category: field(0, "category")?,
                mid_level: field(1, "mid_level")?,
                top_level: field(2, "top_level")?,
            };
            if index
                .insert(entry.category.clone(), entries.len())
                .is_some()
            {
                return Err(Error::invalid(format!(
                    "duplicate taxonomy category {:?}",
                    entry.category
                )));
            }
            entries.push(entry);
        }
        if entries.is_empty() {
            return Err(Error::invalid("taxonomy has no rows"));
        }
        Ok(CategoryTaxonomy { entries, index })
    }

    pub fn contains(&self, category: &str) -> bool {
        self.index.contains_key(category)
    }

    pub fn entry(&self, category: &str) -> Option<&TaxonomyEntry> {
        self.index.get(category).map(|&i| &self.entries[i])
    }

    /// All rows in input order.
    pub fn entries(&self) -> &[TaxonomyEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Distinct mid-level groups, in first-appearance order.
    pub fn mid_levels(&self) -> Vec<&str> {
        distinct(self.entries.iter().map(|e| e.mid_level.as_str()))
    }

    /// Distinct top-level groups, in first-appearance order.
    pub fn top_levels(&self) -> Vec<&str> {
        distinct(self.entries.iter().map(|e| e.top_level.as_str()))
    }
}

fn distinct<'a>(names: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = Vec::new();
    for name in names {
        if !seen.contains(&name) {
            seen.push(name);
        }
    }
    seen
}
