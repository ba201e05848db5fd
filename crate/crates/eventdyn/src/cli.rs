//! Command-line pipeline over event logs: metrics, rank matrix, clustering,
//! correlations, normality checks, and synthetic corpus generation, all with
//! deterministic, atomically written file outputs.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cluster::{cluster_profiles, cut_dendrogram, euclidean_distances, ward_cluster};
use crate::compare::compare_cluster_indicators;
use crate::dynamics::{compute_all_metrics, CountryMetrics};
use crate::error::{Error, Result};
use crate::export;
use crate::indicators::{parse_indicators, IndicatorTable};
use crate::ingest::{
    build_transactions, filter_countries, parse_events, EventFormat, EventLog, ParseOptions,
};
use crate::prevalence::{
    build_rank_matrix, select_countries, top_k_union, zscore_ranks, CategoryCounts, RankMatrix,
    ZscoreAxis,
};
use crate::reference;
use crate::stats::{correlate_all, jarque_bera, parse_correlation_spec, qq_points};
use crate::synth::{generate, SynthSpec};
use crate::taxonomy::CategoryTaxonomy;

#[derive(Parser)]
#[command(
    name = "eventdyn",
    version,
    about = "Event-dynamics analysis over longitudinal event logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-country dynamics metrics (CSV + JSON)
    Metrics {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        filter: FilterArgs,
    },
    /// Build the category-prevalence rank matrix (raw + z-scored CSV)
    RankMatrix {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        rank: RankArgs,
    },
    /// Ward-cluster countries on the z-scored rank matrix
    Cluster {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        rank: RankArgs,
        /// Number of clusters to cut the dendrogram into
        #[arg(long, default_value_t = 3)]
        clusters: usize,
        /// Indicator CSV to compare across clusters (bundled summary if omitted)
        #[arg(long)]
        indicators: Option<PathBuf>,
    },
    /// Correlate metrics features against indicators per a spec CSV
    Correlate {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        filter: FilterArgs,
        /// Indicator CSV (bundled summary if omitted)
        #[arg(long)]
        indicators: Option<PathBuf>,
        /// Correlation spec CSV: feature,indicator[,transform_feature,transform_indicator]
        #[arg(long)]
        spec: PathBuf,
    },
    /// Jarque-Bera normality tests and Q-Q data over indicator variables
    Normality {
        /// Indicator CSV (bundled summary if omitted)
        #[arg(long)]
        indicators: Option<PathBuf>,
        /// Variables to test; log_<name> applies log10 to column <name>
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "log_tec,log_population,log_gdp,hdi,msubs,intus"
        )]
        variables: Vec<String>,
        /// Directory for output files
        #[arg(long, env = "EVENTDYN_OUTPUT_DIR")]
        output_dir: PathBuf,
    },
    /// Generate a synthetic event corpus from a JSON spec
    Synth {
        /// Synthesis spec JSON
        #[arg(long)]
        spec: PathBuf,
        /// Override the spec's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for output files
        #[arg(long, env = "EVENTDYN_OUTPUT_DIR")]
        output_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Category,
    Country,
}

#[derive(Args)]
struct IoArgs {
    /// Event log to analyze
    #[arg(long)]
    input: PathBuf,
    /// Input format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Abort on the first malformed line instead of skipping it
    #[arg(long)]
    strict: bool,
    /// Skip category-taxonomy validation in strict mode
    #[arg(long)]
    no_taxonomy: bool,
    /// Directory for output files
    #[arg(long, env = "EVENTDYN_OUTPUT_DIR")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct FilterArgs {
    /// Drop countries with fewer total events
    #[arg(long, default_value_t = 18)]
    min_events: u64,
    /// Keep only the N most active countries
    #[arg(long, default_value_t = 90)]
    top_n_countries: usize,
}

#[derive(Args)]
struct RankArgs {
    /// Minimum distinct categories for a country to enter the rank matrix
    #[arg(long, default_value_t = 10)]
    min_categories: u64,
    /// Number of top categories each country contributes to the union
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    /// Axis along which ranks are z-scored
    #[arg(long, value_enum, default_value_t = AxisArg::Category)]
    zscore_axis: AxisArg,
}

/// Parses arguments and runs a command, returning the process exit code:
/// 0 success, 1 I/O failure, 2 invalid input, 3 statistical degeneracy.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Metrics { io, filter } => cmd_metrics(&io, &filter),
        Command::RankMatrix { io, filter, rank } => cmd_rank_matrix(&io, &filter, &rank),
        Command::Cluster { io, filter, rank, clusters, indicators } => {
            cmd_cluster(&io, &filter, &rank, clusters, indicators.as_deref())
        }
        Command::Correlate { io, filter, indicators, spec } => {
            cmd_correlate(&io, &filter, indicators.as_deref(), &spec)
        }
        Command::Normality { indicators, variables, output_dir } => {
            cmd_normality(indicators.as_deref(), &variables, &output_dir)
        }
        Command::Synth { spec, seed, output_dir } => cmd_synth(&spec, seed, &output_dir),
    }
}

fn load_events(io: &IoArgs, filter: &FilterArgs) -> Result<EventLog> {
    if fs::metadata(&io.input)?.len() == 0 {
        return Err(Error::invalid("no valid events"));
    }
    let file = fs::File::open(&io.input)?;
    let mut options = ParseOptions::new(match io.format {
        FormatArg::Csv => EventFormat::Csv,
        FormatArg::Jsonl => EventFormat::Jsonl,
    });
    options.strict = io.strict;
    if !io.no_taxonomy {
        options.taxonomy = Some(CategoryTaxonomy::builtin());
    }
    let parsed = parse_events(file, &options)?;
    if parsed.rejected_total > 0 {
        eprintln!(
            "warning: skipped {} malformed line(s); first: line {}: {}",
            parsed.rejected_total, parsed.rejected[0].line, parsed.rejected[0].reason
        );
    }
    if parsed.log.is_empty() {
        return Err(Error::invalid("no valid events"));
    }
    let log = filter_countries(&parsed.log, filter.min_events, filter.top_n_countries);
    if log.is_empty() {
        return Err(Error::invalid(format!(
            "no valid events after filtering (min {} events per country)",
            filter.min_events
        )));
    }
    Ok(log)
}

fn compute_metrics(io: &IoArgs, filter: &FilterArgs) -> Result<Vec<CountryMetrics>> {
    let log = load_events(io, filter)?;
    let tables = build_transactions(&log);
    compute_all_metrics(&tables)
}

fn load_indicators(path: Option<&Path>) -> Result<IndicatorTable> {
    match path {
        Some(path) => parse_indicators(fs::File::open(path)?),
        None => Ok(reference::summary_indicators()),
    }
}

fn written(path: &Path) {
    eprintln!("wrote {}", path.display());
}

fn cmd_metrics(io: &IoArgs, filter: &FilterArgs) -> Result<()> {
    let metrics = compute_metrics(io, filter)?;
    let csv_path = io.output_dir.join("metrics.csv");
    export::write_atomic(&csv_path, &export::metrics_csv(&metrics))?;
    written(&csv_path);
    let json_path = io.output_dir.join("metrics.json");
    export::write_atomic(&json_path, &export::metrics_json(&metrics)?)?;
    written(&json_path);
    eprintln!("{} countries", metrics.len());
    Ok(())
}

/// Shared rank-matrix construction for `rank-matrix` and `cluster`.
fn build_matrix(
    io: &IoArgs,
    filter: &FilterArgs,
    rank: &RankArgs,
) -> Result<(RankMatrix, Vec<Vec<f64>>)> {
    let log = load_events(io, filter)?;
    let tables = build_transactions(&log);
    let metrics = compute_all_metrics(&tables)?;
    let selected = select_countries(&metrics, rank.min_categories);
    if selected.is_empty() {
        return Err(Error::degenerate(format!(
            "no country has at least {} categories",
            rank.min_categories
        )));
    }
    let counts: CategoryCounts = selected
        .iter()
        .map(|&code| (code, tables[&code].category_counts()))
        .collect();
    let union = top_k_union(&counts, rank.top_k);
    let matrix = build_rank_matrix(&counts, &union)?;
    let axis = match rank.zscore_axis {
        AxisArg::Category => ZscoreAxis::Category,
        AxisArg::Country => ZscoreAxis::Country,
    };
    let z = zscore_ranks(&matrix, axis);
    Ok((matrix, z))
}

fn cmd_rank_matrix(io: &IoArgs, filter: &FilterArgs, rank: &RankArgs) -> Result<()> {
    let (matrix, z) = build_matrix(io, filter, rank)?;
    let raw_path = io.output_dir.join("rank_matrix.csv");
    export::write_atomic(&raw_path, &export::rank_matrix_csv(&matrix))?;
    written(&raw_path);
    let z_path = io.output_dir.join("rank_matrix.z.csv");
    export::write_atomic(&z_path, &export::rank_matrix_z_csv(&matrix, &z))?;
    written(&z_path);
    eprintln!("{} countries x {} categories", matrix.countries.len(), matrix.categories.len());
    Ok(())
}

fn cmd_cluster(
    io: &IoArgs,
    filter: &FilterArgs,
    rank: &RankArgs,
    clusters: usize,
    indicators: Option<&Path>,
) -> Result<()> {
    let (matrix, z) = build_matrix(io, filter, rank)?;
    let distances = euclidean_distances(&matrix.countries, &z)?;
    let dendrogram = ward_cluster(&distances)?;
    let assignment = cut_dendrogram(&dendrogram, &matrix.countries, clusters)?;
    let profiles = cluster_profiles(&assignment, &z)?;

    let table = load_indicators(indicators)?;
    let comparisons: Vec<_> = table
        .names()
        .iter()
        .map(|name| compare_cluster_indicators(&assignment, &table, name))
        .collect::<Result<_>>()?;

    let dendro_path = io.output_dir.join("dendrogram.json");
    export::write_atomic(&dendro_path, &export::dendrogram_json(&dendrogram, &matrix.countries)?)?;
    written(&dendro_path);
    let assign_path = io.output_dir.join("clusters.csv");
    export::write_atomic(&assign_path, &export::assignment_csv(&assignment))?;
    written(&assign_path);
    let profiles_path = io.output_dir.join("profiles.csv");
    export::write_atomic(&profiles_path, &export::profiles_csv(&matrix.categories, &profiles))?;
    written(&profiles_path);
    let tests_path = io.output_dir.join("indicator_tests.json");
    export::write_atomic(&tests_path, &export::indicator_tests_json(&comparisons)?)?;
    written(&tests_path);
    Ok(())
}

fn cmd_correlate(
    io: &IoArgs,
    filter: &FilterArgs,
    indicators: Option<&Path>,
    spec: &Path,
) -> Result<()> {
    let metrics = compute_metrics(io, filter)?;
    let table = load_indicators(indicators)?;
    let pairs = parse_correlation_spec(fs::File::open(spec)?)?;
    let report = correlate_all(&metrics, &table, &pairs)?;
    for warning in &report.warnings {
        eprintln!("warning: {warning}");
    }
    let path = io.output_dir.join("correlations.csv");
    export::write_atomic(&path, &export::correlations_csv(&report.results))?;
    written(&path);
    Ok(())
}

/// Resolves a normality variable: an indicator column by exact name, or
/// `log_<column>` for the log10 of a column (non-positive values dropped).
fn resolve_variable(table: &IndicatorTable, variable: &str) -> Result<Vec<f64>> {
    if let Some(column) = table.column(variable) {
        return Ok(column.into_iter().map(|(_, v)| v).collect());
    }
    if let Some(base) = variable.strip_prefix("log_") {
        if let Some(column) = table.column(base) {
            let mut dropped = 0usize;
            let values: Vec<f64> = column
                .into_iter()
                .filter_map(|(_, v)| {
                    if v > 0.0 {
                        Some(v.log10())
                    } else {
                        dropped += 1;
                        None
                    }
                })
                .collect();
            if dropped > 0 {
                eprintln!(
                    "warning: {variable}: dropped {dropped} non-positive value(s) before log10"
                );
            }
            return Ok(values);
        }
    }
    Err(Error::invalid(format!(
        "unknown variable {variable:?}; valid: any of [{}], optionally log_-prefixed",
        table.names().join(", ")
    )))
}

fn cmd_normality(indicators: Option<&Path>, variables: &[String], output_dir: &Path) -> Result<()> {
    if variables.is_empty() {
        return Err(Error::invalid("no variables requested"));
    }
    let table = load_indicators(indicators)?;
    let mut rows = Vec::new();
    for variable in variables {
        let values = resolve_variable(&table, variable)?;
        if values.len() < 30 {
            eprintln!(
                "warning: {variable}: only {} observations; the test is asymptotic",
                values.len()
            );
        }
        let test = jarque_bera(&values).map_err(|e| e.prefixed(variable))?;
        let qq = qq_points(&values).map_err(|e| e.prefixed(variable))?;
        let qq_path = output_dir.join(format!("qq_{variable}.csv"));
        export::write_atomic(&qq_path, &export::qq_csv(&qq))?;
        written(&qq_path);
        rows.push((variable.clone(), test));
    }
    let path = output_dir.join("normality.csv");
    export::write_atomic(&path, &export::normality_csv(&rows))?;
    written(&path);
    Ok(())
}

fn cmd_synth(spec: &Path, seed: Option<u64>, output_dir: &Path) -> Result<()> {
    let mut spec = SynthSpec::from_json(&fs::read_to_string(spec)?)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let log = generate(&spec)?;
    let mut buffer = Vec::new();
    log.write_csv(&mut buffer)?;
    let content = String::from_utf8(buffer).expect("event csv is utf-8");
    let path = output_dir.join("events.csv");
    export::write_atomic(&path, &content)?;
    written(&path);
    eprintln!("{} events across {} countries", log.len(), spec.countries.len());
    Ok(())
}
