//! Deterministic synthetic event corpora with planted dynamics: seeded
//! per-country streams, configurable inter-transaction gap laws, and
//! category draws from explicit weight vectors.

use chrono::NaiveDate;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::ingest::{CountryCode, EventLog, EventRecord};

/// Law for the day gap between consecutive events of one country. A gap of
/// zero keeps the next event on the same date, merging into one transaction.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapDistribution {
    /// Every gap is exactly `days`.
    Constant { days: u64 },
    /// Gaps on {1, 2, …} with success probability `p` (memoryless).
    Geometric { p: f64 },
    /// Gap `a` with probability `w`, else `b`; both ≥ 1.
    TwoPoint { a: u64, b: u64, w: f64 },
}

impl GapDistribution {
    fn validate(&self) -> std::result::Result<(), String> {
        match *self {
            GapDistribution::Constant { .. } => Ok(()),
            GapDistribution::Geometric { p } => {
                if p.is_finite() && p > 0.0 && p <= 1.0 {
                    Ok(())
                } else {
                    Err(format!("geometric p must be in (0, 1], got {p}"))
                }
            }
            GapDistribution::TwoPoint { a, b, w } => {
                if a == 0 || b == 0 {
                    return Err("two-point gaps must be at least 1 day".to_string());
                }
                if w.is_finite() && (0.0..=1.0).contains(&w) {
                    Ok(())
                } else {
                    Err(format!("two-point weight must be in [0, 1], got {w}"))
                }
            }
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        match *self {
            GapDistribution::Constant { days } => days,
            GapDistribution::Geometric { p } => {
                if p >= 1.0 {
                    return 1;
                }
                let u: f64 = rng.random();
                // Inverse CDF of the geometric law on {1, 2, …}.
                let k = ((1.0 - u).ln() / (1.0 - p).ln()).ceil();
                k.max(1.0) as u64
            }
            GapDistribution::TwoPoint { a, b, w } => {
                if rng.random::<f64>() < w {
                    a
                } else {
                    b
                }
            }
        }
    }

    /// The distribution's exact burstiness (σ−τ)/(σ+τ), the value a measured
    /// β converges to. `None` when gaps of zero make β undefined.
    pub fn planted_burstiness(&self) -> Option<f64> {
        match *self {
            GapDistribution::Constant { days: 0 } => None,
            GapDistribution::Constant { .. } => Some(-1.0),
            GapDistribution::Geometric { p } => {
                let s = (1.0 - p).sqrt();
                Some((s - 1.0) / (s + 1.0))
            }
            GapDistribution::TwoPoint { a, b, w } => {
                let (a, b) = (a as f64, b as f64);
                let tau = w * a + (1.0 - w) * b;
                let sigma = (w * (1.0 - w)).sqrt() * (b - a).abs();
                Some((sigma - tau) / (sigma + tau))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CategoryWeight {
    pub category: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CountrySpec {
    pub code: CountryCode,
    pub n_events: u64,
    pub gap_distribution: GapDistribution,
    pub category_weights: Vec<CategoryWeight>,
}

fn default_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid default date")
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    #[serde(default = "default_start_date")]
    pub start_date: NaiveDate,
    pub countries: Vec<CountrySpec>,
}

impl SynthSpec {
    pub fn from_json(raw: &str) -> Result<SynthSpec> {
        let spec: SynthSpec = serde_json::from_str(raw)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.countries.is_empty() {
            return Err(Error::invalid("spec needs at least one country"));
        }
        let mut codes: Vec<CountryCode> = self.countries.iter().map(|c| c.code).collect();
        codes.sort();
        if codes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("duplicate country codes in spec"));
        }
        for country in &self.countries {
            let code = country.code;
            if country.n_events == 0 {
                return Err(Error::invalid(format!("{code}: n_events must be at least 1")));
            }
            if let Err(e) = country.gap_distribution.validate() {
                return Err(Error::invalid(format!("{code}: {e}")));
            }
            if country.category_weights.is_empty() {
                return Err(Error::invalid(format!("{code}: needs at least one category")));
            }
            let mut names: Vec<&str> =
                country.category_weights.iter().map(|w| w.category.as_str()).collect();
            names.sort_unstable();
            if names.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("{code}: duplicate category names")));
            }
            if country.category_weights.iter().any(|w| w.category.is_empty()) {
                return Err(Error::invalid(format!("{code}: empty category name")));
            }
            let mut total = 0.0;
            for w in &country.category_weights {
                if !w.weight.is_finite() || w.weight < 0.0 {
                    return Err(Error::invalid(format!(
                        "{code}: weight for {:?} must be finite and non-negative",
                        w.category
                    )));
                }
                total += w.weight;
            }
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "{code}: category weights sum to {total}, expected 1"
                )));
            }
        }
        Ok(())
    }
}

/// FNV-1a over the country code, folded into the global seed so each
/// country gets an independent, order-free stream.
fn country_seed(seed: u64, code: CountryCode) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &byte in code.as_str().as_bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ hash
}

/// Generates the spec's corpus. Deterministic for a fixed spec: per-country
/// streams are seeded independently, so adding a country never shifts the
/// others. Events come out in spec order, dates ascending per country.
pub fn generate(spec: &SynthSpec) -> Result<EventLog> {
    spec.validate()?;
    let mut events = Vec::new();
    for country in &spec.countries {
        let mut rng = ChaCha8Rng::seed_from_u64(country_seed(spec.seed, country.code));
        let cumulative: Vec<f64> = country
            .category_weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w.weight;
                Some(*acc)
            })
            .collect();
        let mut date = spec.start_date;
        for i in 0..country.n_events {
            if i > 0 {
                let gap = country.gap_distribution.sample(&mut rng);
                date = date
                    .checked_add_days(chrono::Days::new(gap))
                    .ok_or_else(|| {
                        Error::invalid(format!("{}: date overflow during generation", country.code))
                    })?;
            }
            let u: f64 = rng.random();
            let idx = cumulative
                .partition_point(|&edge| edge <= u)
                .min(country.category_weights.len() - 1);
            events.push(EventRecord {
                date,
                country: country.code,
                city: String::new(),
                category: country.category_weights[idx].category.clone(),
            });
        }
    }
    Ok(EventLog::new(events))
}
