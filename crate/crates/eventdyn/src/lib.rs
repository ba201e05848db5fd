//! Event-dynamics analysis over longitudinal event logs.
//!
//! The pipeline: ingest dated, country-tagged, categorized events
//! ([`ingest`]); aggregate them into per-country daily transactions; compute
//! activity metrics — load variability, temporal-window means, persistence,
//! burstiness, category diversity ([`dynamics`]); build a category-prevalence
//! rank matrix across countries ([`prevalence`]); cluster countries with
//! Ward linkage on Euclidean distances ([`cluster`]) and compare clusters
//! against external indicators ([`compare`]); and run correlation/normality
//! analyses ([`stats`]) on top of hand-rolled special-function kernels
//! ([`special`]). [`synth`] generates seeded corpora with planted dynamics
//! for oracle-style testing, and [`cli`] exposes everything as subcommands
//! with stable file outputs ([`export`]).

pub mod cli;
pub mod cluster;
pub mod compare;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod indicators;
pub mod ingest;
pub mod prevalence;
pub mod reference;
pub mod special;
pub mod stats;
pub mod synth;
pub mod taxonomy;
pub mod timeline;

pub use dynamics::CountryMetrics;
pub use error::{Error, Result};
pub use ingest::{CountryCode, EventLog, EventRecord, TransactionTable};
