//! Command-line interface: every analysis as a subcommand.
//!
//! ```text
//! reviewlab <subcommand> [--seed N] [--out-dir DIR] [--no-timestamp] [--threads N] ...
//! ```
//!
//! | Subcommand    | Inputs                      | Outputs (fixed names, under `--out-dir`) |
//! |---------------|-----------------------------|------------------------------------------|
//! | `calibrate`   | reviews.csv                 | `calibration.json`                       |
//! | `simulate`    | flags only                  | `simulation.csv`                         |
//! | `consistency` | counts or duplicates+decisions | `consistency.json`                    |
//! | `timeline`    | reviews.csv (+duplicates)   | `cumulative.csv`, `per_paper.csv`, `below_quorum.csv`, `window_mean.csv`, `split_test.json`, `correlation.csv`, `correlation_band.csv` |
//! | `impact`      | reviews.csv + outcomes.csv  | `impact.json`, `scatter.svg`             |
//! | `fate`        | outcomes.csv                | `fate.csv`                               |
//! | `fetch`       | ids file (+cache)           | `citations.json` (and cache appends)     |
//!
//! Every artifact carries a metadata block (tool version, seed, SHA-256 of
//! each input, timestamp unless `--no-timestamp`). With `--no-timestamp`,
//! identical invocations produce byte-identical artifacts.
//!
//! Exit codes: 0 success; 1 validation/usage error; 2 I/O failure.
//!
//! A hidden `gen-synthetic` subcommand writes a model-faithful synthetic
//! four-table corpus (plus a matching citation id list and offline cache) for
//! demos and tests.

use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::PathBuf;

use crate::calibration::{grid_fit, CalibError, GridSpec};
use crate::citations::{
    fetch_citations, load_ids, CitationError, ClientConfig, DEFAULT_API_BASE,
};
use crate::consistency::{
    binomial_check, confusion_stats, dirichlet_posterior, posterior_ratio_mc,
    random_committee_expectation, ConfusionMatrix, ConsistencyError,
};
use crate::data::{
    format_timestamp, load_decisions, load_duplicates, load_outcomes, load_reviews,
    save_decisions, save_duplicates, save_outcomes, save_reviews, Dataset, LoadError,
};
use crate::impact::{
    citation_impact, committee_score_correlation, correlation_report, dp_scatter, fate_table_with_threshold,
    scatter_svg, ImpactError, QualitySource, ScoreKind, Subset, DEFAULT_SCATTER_SCALE_X,
    DEFAULT_SCATTER_SCALE_Y, DEFAULT_VENUE_THRESHOLD,
};
use crate::report::{csv_with_meta, json_with_meta, svg_with_meta, write_artifact, RunMeta};
use crate::sim::{consistency_curve, SimConfig, SimError};
use crate::synth::{generate, SynthConfig, SynthError};
use crate::timeline::{
    bootstrap_correlation_band, cumulative_reviews, deadline_split_test, default_cutoff,
    default_deadline, duplicate_correlation_series, duplicate_correlation_series_with,
    moving_window_mean, papers_below_quorum, reviews_per_paper_series, sample_grid, ReviewField,
    TimelineError, DEFAULT_QUORUM,
};
use chrono::{DateTime, Duration, Utc};

/// Compact parameter grid used when a subcommand needs a calibration fit as
/// an ingredient (timeline `--calibrated`, impact quality scores) rather than
/// as its product. `calibrate` itself defaults to the full 40×40 grid.
const INGREDIENT_GRID: GridSpec = GridSpec {
    ratio_b_bounds: (1e-3, 10.0),
    ratio_s_bounds: (1e-2, 10.0),
    ratio_b_steps: 16,
    ratio_s_steps: 16,
    refine_factor: 6,
};

#[derive(Parser, Debug)]
#[command(
    name = "reviewlab",
    version,
    about = "Statistical toolkit for two-committee peer-review experiments",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    /// Master seed echoed into every artifact.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory artifacts are written into.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Suppress the timestamp metadata field (byte-stable reruns).
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Cap worker-pool sizes globally.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the reviewer-calibration model to a review table.
    Calibrate(CalibrateArgs),
    /// Monte Carlo committee-consistency simulation.
    Simulate(SimulateArgs),
    /// Consistency statistics for a two-committee confusion matrix.
    Consistency(ConsistencyArgs),
    /// Time-resolved review statistics.
    Timeline(TimelineArgs),
    /// Score–citation correlation analysis.
    Impact(ImpactArgs),
    /// Post-conference fate table (Sankey links).
    Fate(FateArgs),
    /// Resolve external paper ids to citation counts.
    Fetch(FetchArgs),
    /// Generate a synthetic four-table corpus.
    #[command(hide = true)]
    GenSynthetic(GenSyntheticArgs),
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    /// Review table (CSV).
    #[arg(long)]
    reviews: PathBuf,
    /// Grid nodes on the bias-ratio axis.
    #[arg(long, default_value_t = 40)]
    grid_b: usize,
    /// Grid nodes on the noise-ratio axis.
    #[arg(long, default_value_t = 40)]
    grid_s: usize,
    /// Refinement resolution multiplier (0 disables).
    #[arg(long, default_value_t = 10)]
    refine: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Subjectivity share of score variance, in (0, 1].
    #[arg(long)]
    subjectivity: f64,
    /// Reviewers per paper (comma-separated list sweeps the axis).
    #[arg(long, value_delimiter = ',', default_value = "3")]
    reviewers: Vec<u32>,
    /// Accept rate (comma-separated list sweeps the axis).
    #[arg(long, value_delimiter = ',', default_value = "0.23")]
    accept_rate: Vec<f64>,
    /// Papers per simulated conference.
    #[arg(long, default_value_t = 500)]
    papers: usize,
    /// Total paper samples per curve cell (trials ≈ samples / papers).
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
}

#[derive(Args, Debug)]
struct ConsistencyArgs {
    /// Accept/accept count (give all four counts, or none and use files).
    #[arg(long)]
    aa: Option<u64>,
    /// Accept/reject count.
    #[arg(long)]
    ar: Option<u64>,
    /// Reject/accept count.
    #[arg(long)]
    ra: Option<u64>,
    /// Reject/reject count.
    #[arg(long)]
    rr: Option<u64>,
    /// Duplicate-pair table (CSV); used when counts are not given.
    #[arg(long)]
    duplicates: Option<PathBuf>,
    /// Decision table (CSV); used when counts are not given.
    #[arg(long)]
    decisions: Option<PathBuf>,
    /// Accept rate for the random-committee comparison.
    #[arg(long, default_value_t = 0.25)]
    random_rate: f64,
    /// Dirichlet prior over (agree-accept, disagree, agree-reject).
    #[arg(long, value_delimiter = ',', default_value = "1,1,1")]
    prior: Vec<f64>,
    /// Monte Carlo draws for posterior ratio statistics.
    #[arg(long, default_value_t = 100_000)]
    mc_samples: u64,
    /// Optional explicit binomial check `k,n,p` (defaults to the
    /// disagreement count against the random-committee rate).
    #[arg(long)]
    binomial: Option<String>,
}

#[derive(Args, Debug)]
struct TimelineArgs {
    /// Review table (CSV).
    #[arg(long)]
    reviews: PathBuf,
    /// Review field for windowed means and the split test.
    #[arg(long, default_value = "confidence")]
    field: String,
    /// Moving-window width in days.
    #[arg(long, default_value_t = 4)]
    window_days: i64,
    /// Sampling step in days.
    #[arg(long, default_value_t = 1)]
    step_days: i64,
    /// Reviewing deadline (RFC 3339; default 2014-07-21T00:00:00Z).
    #[arg(long)]
    deadline: Option<String>,
    /// Start of the rebuttal period (RFC 3339; default 2014-08-04T00:00:00Z).
    #[arg(long)]
    cutoff: Option<String>,
    /// Review quorum for the below-quorum series.
    #[arg(long, default_value_t = DEFAULT_QUORUM)]
    quorum: u64,
    /// Duplicate-pair table (CSV); enables the correlation trajectory.
    #[arg(long)]
    duplicates: Option<PathBuf>,
    /// Bootstrap resamples for the correlation band (needs --duplicates).
    #[arg(long)]
    bootstrap: Option<u64>,
    /// Anchor bootstrap trajectories at the final point estimate.
    #[arg(long)]
    anchor: bool,
    /// Correlate calibrated review means instead of raw quality scores.
    #[arg(long)]
    calibrated: bool,
}

#[derive(Args, Debug)]
struct ImpactArgs {
    /// Review table (CSV).
    #[arg(long)]
    reviews: PathBuf,
    /// Outcome table (CSV).
    #[arg(long)]
    outcomes: PathBuf,
    /// Duplicate-pair table (CSV); enables the committee-score correlation.
    #[arg(long)]
    duplicates: Option<PathBuf>,
    /// Paper quality definition: `posterior_f` or `calibrated_mean`.
    #[arg(long, default_value = "posterior_f")]
    quality_source: String,
    /// Laplace noise scale on scatter x (calibrated score).
    #[arg(long, default_value_t = DEFAULT_SCATTER_SCALE_X)]
    scatter_scale_x: f64,
    /// Laplace noise scale on scatter y (log-citation impact).
    #[arg(long, default_value_t = DEFAULT_SCATTER_SCALE_Y)]
    scatter_scale_y: f64,
}

#[derive(Args, Debug)]
struct FateArgs {
    /// Outcome table (CSV).
    #[arg(long)]
    outcomes: PathBuf,
    /// Minimum papers for a venue to be listed by name.
    #[arg(long, default_value_t = DEFAULT_VENUE_THRESHOLD)]
    venue_threshold: u64,
}

#[derive(Args, Debug)]
struct FetchArgs {
    /// Id list: one external id per line (`#` comments allowed).
    #[arg(long)]
    ids: PathBuf,
    /// JSON-lines cache file.
    #[arg(long, default_value = "citation_cache.jsonl")]
    cache: PathBuf,
    /// Serve cache hits only; error on any miss.
    #[arg(long)]
    offline: bool,
    /// Scholarly-index base URL.
    #[arg(long, default_value = DEFAULT_API_BASE)]
    api_base: String,
    /// Maximum concurrent requests.
    #[arg(long, default_value_t = 4)]
    max_in_flight: usize,
}

#[derive(Args, Debug)]
struct GenSyntheticArgs {
    /// Distinct physical papers.
    #[arg(long, default_value_t = 80)]
    papers: usize,
    /// Reviewer pool size.
    #[arg(long, default_value_t = 40)]
    reviewers: usize,
    /// Reviews per submission.
    #[arg(long, default_value_t = 3)]
    reviews_per_paper: u32,
    /// Papers duplicated across both committees.
    #[arg(long, default_value_t = 10)]
    duplicates: usize,
    /// Post-deadline confidence drop.
    #[arg(long, default_value_t = 0.1)]
    confidence_drop: f64,
    /// Fraction of reviews arriving after the deadline.
    #[arg(long, default_value_t = 0.3)]
    late_fraction: f64,
    /// Committee accept rate.
    #[arg(long, default_value_t = 0.23)]
    accept_rate: f64,
}

/// Internal error carrying the exit-code class.
#[derive(Debug)]
enum CliError {
    /// Bad arguments, bad data, failed statistical preconditions → exit 1.
    Validation(String),
    /// Filesystem or network failure → exit 2.
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<CitationError> for CliError {
    fn from(e: CitationError) -> Self {
        match e {
            CitationError::Io { .. } | CitationError::Http { .. } | CitationError::RateLimited { .. } => {
                CliError::Io(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

macro_rules! validation_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}
validation_from!(CalibError, SimError, ConsistencyError, TimelineError, ImpactError, SynthError);

/// Runs the tool on an argument vector and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            return 1;
        }
    };
    if let Some(threads) = cli.threads {
        crate::concurrency::set_cap(threads);
    }
    let mut meta = RunMeta::new(cli.seed);
    if !cli.no_timestamp {
        meta = meta.with_timestamp();
    }
    let outcome = match &cli.command {
        Command::Calibrate(args) => cmd_calibrate(&cli, args, meta),
        Command::Simulate(args) => cmd_simulate(&cli, args, meta),
        Command::Consistency(args) => cmd_consistency(&cli, args, meta),
        Command::Timeline(args) => cmd_timeline(&cli, args, meta),
        Command::Impact(args) => cmd_impact(&cli, args, meta),
        Command::Fate(args) => cmd_fate(&cli, args, meta),
        Command::Fetch(args) => cmd_fetch(&cli, args, meta),
        Command::GenSynthetic(args) => cmd_gen_synthetic(&cli, args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn out_path(cli: &Cli, name: &str) -> PathBuf {
    cli.out_dir.join(name)
}

fn parse_rfc3339(field: &'static str, value: &str) -> Result<DateTime<Utc>, CliError> {
    DateTime::parse_from_rfc3339(value)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| CliError::Validation(format!("invalid {field} `{value}`: {e}")))
}

/// Shortest-round-trip decimal form (empty for None), for CSV cells.
fn num(v: f64) -> String {
    format!("{v}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Builds a CSV body from rows of string fields (proper quoting, `\n` ends).
fn csv_body(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory csv");
    for row in rows {
        writer.write_record(row).expect("in-memory csv");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

fn series_rows(points: &[crate::timeline::TimeSeriesPoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![format_timestamp(&p.t), num(p.value), opt_num(p.se), p.n.to_string()]
        })
        .collect()
}

fn cmd_calibrate(cli: &Cli, args: &CalibrateArgs, mut meta: RunMeta) -> Result<(), CliError> {
    meta.add_input(&args.reviews)?;
    let reviews = load_reviews(&args.reviews)?;
    let (graph, scores) = crate::calibration::AssignmentGraph::from_reviews(&reviews)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let grid = GridSpec {
        ratio_b_steps: args.grid_b,
        ratio_s_steps: args.grid_s,
        refine_factor: args.refine,
        ..GridSpec::default()
    };
    let fit = grid_fit(&scores, &graph, &grid)?;
    let payload = serde_json::json!({
        "params": fit.params,
        "objectivity": fit.params.objectivity(),
        "nll": fit.nll,
        "grid": fit.grid,
        "papers": fit.per_paper,
        "reviewers": fit.per_reviewer,
        "reviews": fit.per_review,
    });
    write_artifact(out_path(cli, "calibration.json"), &json_with_meta(&meta, payload))?;
    Ok(())
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs, meta: RunMeta) -> Result<(), CliError> {
    let base = SimConfig {
        n_papers: args.papers,
        subjectivity: args.subjectivity,
        total_paper_samples: args.samples,
        seed: cli.seed,
        ..SimConfig::default()
    };
    let points = consistency_curve(&base, &args.accept_rate, &args.reviewers)?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                num(p.accept_rate),
                p.reviewers_per_paper.to_string(),
                num(p.accept_consistency),
                num(p.std_error),
                p.trials.to_string(),
            ]
        })
        .collect();
    let body = csv_body(&["accept_rate", "reviewers", "consistency", "std_error", "trials"], &rows);
    write_artifact(out_path(cli, "simulation.csv"), &csv_with_meta(&meta, &body))?;
    Ok(())
}

fn cmd_consistency(cli: &Cli, args: &ConsistencyArgs, mut meta: RunMeta) -> Result<(), CliError> {
    let counts = [args.aa, args.ar, args.ra, args.rr];
    let matrix = if counts.iter().all(Option::is_some) {
        ConfusionMatrix {
            aa: args.aa.unwrap(),
            ar: args.ar.unwrap(),
            ra: args.ra.unwrap(),
            rr: args.rr.unwrap(),
        }
    } else if counts.iter().any(Option::is_some) {
        return Err(CliError::Validation(
            "give all four of --aa --ar --ra --rr, or none of them".to_string(),
        ));
    } else {
        let (Some(dup_path), Some(dec_path)) = (&args.duplicates, &args.decisions) else {
            return Err(CliError::Validation(
                "give --aa/--ar/--ra/--rr counts, or both --duplicates and --decisions".to_string(),
            ));
        };
        meta.add_input(dup_path)?;
        meta.add_input(dec_path)?;
        let duplicates = load_duplicates(dup_path)?;
        let decisions = load_decisions(dec_path)?;
        ConfusionMatrix::from_decisions(&duplicates, &decisions)
    };

    let summary = confusion_stats(&matrix);
    let expected = random_committee_expectation(matrix.total(), args.random_rate)?;

    let binomial = match &args.binomial {
        Some(spec) => {
            let parts: Vec<&str> = spec.split(',').collect();
            let parse_err =
                || CliError::Validation(format!("--binomial expects `k,n,p`, got `{spec}`"));
            if parts.len() != 3 {
                return Err(parse_err());
            }
            let k: u64 = parts[0].trim().parse().map_err(|_| parse_err())?;
            let n: u64 = parts[1].trim().parse().map_err(|_| parse_err())?;
            let p: f64 = parts[2].trim().parse().map_err(|_| parse_err())?;
            binomial_check(k, n, p)?
        }
        None => {
            // Disagreements against two independent committees at the
            // comparison rate q: expected disagreement probability 2q(1−q).
            let q = args.random_rate;
            binomial_check(matrix.ar + matrix.ra, matrix.total(), 2.0 * q * (1.0 - q))?
        }
    };

    if args.prior.len() != 3 {
        return Err(CliError::Validation(format!(
            "--prior expects three comma-separated values, got {}",
            args.prior.len()
        )));
    }
    let prior = [args.prior[0], args.prior[1], args.prior[2]];
    let posterior = dirichlet_posterior(prior, [matrix.aa, matrix.ar + matrix.ra, matrix.rr])?;
    let mc = posterior_ratio_mc(&posterior, args.mc_samples, cli.seed)?;

    let payload = serde_json::json!({
        "confusion": {
            "aa": matrix.aa, "ar": matrix.ar, "ra": matrix.ra, "rr": matrix.rr,
            "total": matrix.total(),
        },
        "summary": summary,
        "expected_random": { "accept_rate": args.random_rate, "table": expected },
        "binomial": binomial,
        "dirichlet": posterior,
        "mc": mc,
    });
    write_artifact(out_path(cli, "consistency.json"), &json_with_meta(&meta, payload))?;
    Ok(())
}

fn cmd_timeline(cli: &Cli, args: &TimelineArgs, mut meta: RunMeta) -> Result<(), CliError> {
    meta.add_input(&args.reviews)?;
    let reviews = load_reviews(&args.reviews)?;
    if reviews.is_empty() {
        return Err(CliError::Validation("review table is empty".to_string()));
    }
    let field: ReviewField =
        args.field.parse().map_err(|e: String| CliError::Validation(e))?;
    let deadline = match &args.deadline {
        Some(s) => parse_rfc3339("--deadline", s)?,
        None => default_deadline(),
    };
    let cutoff = match &args.cutoff {
        Some(s) => parse_rfc3339("--cutoff", s)?,
        None => default_cutoff(),
    };
    let step = Duration::days(args.step_days);
    let window = Duration::days(args.window_days);

    let earliest = reviews.iter().map(|r| r.submitted_at).min().expect("non-empty");
    let latest = reviews.iter().map(|r| r.submitted_at).max().expect("non-empty");
    let grid = sample_grid(earliest, latest, step)?;

    let cumulative = cumulative_reviews(&reviews);
    write_artifact(
        out_path(cli, "cumulative.csv"),
        &csv_with_meta(&meta, &csv_body(&["t", "value", "se", "n"], &series_rows(&cumulative))),
    )?;

    let per_paper = reviews_per_paper_series(&reviews, &grid);
    let rows: Vec<Vec<String>> = per_paper
        .iter()
        .map(|p| {
            vec![
                format_timestamp(&p.t),
                num(p.min),
                num(p.median),
                num(p.mean),
                num(p.max),
                p.papers.to_string(),
            ]
        })
        .collect();
    write_artifact(
        out_path(cli, "per_paper.csv"),
        &csv_with_meta(&meta, &csv_body(&["t", "min", "median", "mean", "max", "papers"], &rows)),
    )?;

    let below = papers_below_quorum(&reviews, args.quorum, &grid);
    write_artifact(
        out_path(cli, "below_quorum.csv"),
        &csv_with_meta(&meta, &csv_body(&["t", "value", "se", "n"], &series_rows(&below))),
    )?;

    let windowed = moving_window_mean(&reviews, field, window, step)?;
    write_artifact(
        out_path(cli, "window_mean.csv"),
        &csv_with_meta(&meta, &csv_body(&["t", "value", "se", "n"], &series_rows(&windowed))),
    )?;

    let split = deadline_split_test(&reviews, field, deadline, cutoff)?;
    let payload = serde_json::json!({
        "field": field.as_str(),
        "deadline": format_timestamp(&deadline),
        "cutoff": format_timestamp(&cutoff),
        "test": split,
    });
    write_artifact(out_path(cli, "split_test.json"), &json_with_meta(&meta, payload))?;

    if let Some(dup_path) = &args.duplicates {
        meta.add_input(dup_path)?;
        let duplicates = load_duplicates(dup_path)?;
        let series = if args.calibrated {
            let (graph, scores) = crate::calibration::AssignmentGraph::from_reviews(&reviews)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let fit = grid_fit(&scores, &graph, &INGREDIENT_GRID)?;
            let means = fit.review_means();
            duplicate_correlation_series_with(&reviews, &duplicates, &grid, |r| {
                means.get(&(&r.paper_id, &r.reviewer_id)).copied()
            })
        } else {
            duplicate_correlation_series(&reviews, &duplicates, &grid)
        };
        write_artifact(
            out_path(cli, "correlation.csv"),
            &csv_with_meta(&meta, &csv_body(&["t", "value", "se", "n"], &series_rows(&series))),
        )?;

        if let Some(b) = args.bootstrap {
            let band =
                bootstrap_correlation_band(&reviews, &duplicates, &grid, b, cli.seed, args.anchor)?;
            let rows: Vec<Vec<String>> = band
                .band
                .iter()
                .map(|p| {
                    vec![
                        format_timestamp(&p.t),
                        num(p.lower),
                        num(p.median),
                        num(p.upper),
                        p.n.to_string(),
                    ]
                })
                .collect();
            write_artifact(
                out_path(cli, "correlation_band.csv"),
                &csv_with_meta(
                    &meta,
                    &csv_body(&["t", "lower", "median", "upper", "n"], &rows),
                ),
            )?;
        }
    } else if args.bootstrap.is_some() {
        return Err(CliError::Validation("--bootstrap needs --duplicates".to_string()));
    }
    Ok(())
}

fn cmd_impact(cli: &Cli, args: &ImpactArgs, mut meta: RunMeta) -> Result<(), CliError> {
    meta.add_input(&args.reviews)?;
    meta.add_input(&args.outcomes)?;
    let reviews = load_reviews(&args.reviews)?;
    let outcomes = load_outcomes(&args.outcomes)?;
    let duplicates = match &args.duplicates {
        Some(path) => {
            meta.add_input(path)?;
            load_duplicates(path)?
        }
        None => Vec::new(),
    };
    let source: QualitySource =
        args.quality_source.parse().map_err(|e: String| CliError::Validation(e))?;

    let (graph, scores) = crate::calibration::AssignmentGraph::from_reviews(&reviews)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    let fit = grid_fit(&scores, &graph, &INGREDIENT_GRID)?;
    let dataset = Dataset::new(reviews, duplicates, Vec::new(), outcomes);

    let report_or_reason = |kind: ScoreKind, subset: Subset| -> serde_json::Value {
        match correlation_report(&dataset, &fit, kind, subset, source) {
            Ok(r) => serde_json::to_value(r).expect("report serializes"),
            Err(e) => serde_json::json!({ "error": e.to_string() }),
        }
    };
    let mut correlations = serde_json::Map::new();
    for kind in [ScoreKind::QualityCalibrated, ScoreKind::Impact, ScoreKind::Confidence] {
        let mut by_subset = serde_json::Map::new();
        for subset in [Subset::Accepted, Subset::Rejected, Subset::All] {
            by_subset.insert(subset.as_str().to_string(), report_or_reason(kind, subset));
        }
        correlations.insert(kind.as_str().to_string(), serde_json::Value::Object(by_subset));
    }

    let committee: serde_json::Value = if dataset.duplicates.is_empty() {
        serde_json::Value::Null
    } else {
        let mut by_kind = serde_json::Map::new();
        for kind in [ScoreKind::QualityCalibrated, ScoreKind::Impact, ScoreKind::Confidence] {
            let value = match committee_score_correlation(&dataset, &fit, kind, source) {
                Ok(r) => serde_json::to_value(r).expect("report serializes"),
                Err(e) => serde_json::json!({ "error": e.to_string() }),
            };
            by_kind.insert(kind.as_str().to_string(), value);
        }
        serde_json::Value::Object(by_kind)
    };

    // Noised scatter of calibrated score vs log-citation impact over traced
    // papers.
    let quality = fit.paper_quality();
    let mut points = Vec::new();
    for outcome in &dataset.outcomes {
        if outcome.fate == crate::data::Fate::Untraced {
            continue;
        }
        if let Some(&q) = quality.get(&outcome.paper_id) {
            points.push((q, citation_impact(outcome.citations)));
        }
    }
    let noised = dp_scatter(&points, args.scatter_scale_x, args.scatter_scale_y, cli.seed)?;
    let svg = scatter_svg(&noised, "Calibrated score vs citation impact (noised)");
    write_artifact(out_path(cli, "scatter.svg"), &svg_with_meta(&meta, &svg))?;

    let payload = serde_json::json!({
        "quality_source": source.as_str(),
        "correlations": correlations,
        "committee": committee,
        "scatter": {
            "points": noised.len(),
            "scale_x": args.scatter_scale_x,
            "scale_y": args.scatter_scale_y,
            "file": "scatter.svg",
        },
    });
    write_artifact(out_path(cli, "impact.json"), &json_with_meta(&meta, payload))?;
    Ok(())
}

fn cmd_fate(cli: &Cli, args: &FateArgs, mut meta: RunMeta) -> Result<(), CliError> {
    meta.add_input(&args.outcomes)?;
    let outcomes = load_outcomes(&args.outcomes)?;
    let table = fate_table_with_threshold(&outcomes, args.venue_threshold);
    let rows: Vec<Vec<String>> = table
        .sankey
        .iter()
        .map(|l| vec![l.source.clone(), l.target.clone(), l.count.to_string()])
        .collect();
    let body = csv_body(&["source", "target", "count"], &rows);
    write_artifact(out_path(cli, "fate.csv"), &csv_with_meta(&meta, &body))?;
    Ok(())
}

fn cmd_fetch(cli: &Cli, args: &FetchArgs, mut meta: RunMeta) -> Result<(), CliError> {
    meta.add_input(&args.ids)?;
    let ids = load_ids(&args.ids)?;
    let config = ClientConfig {
        api_base: args.api_base.clone(),
        max_in_flight: args.max_in_flight,
        ..ClientConfig::default()
    };
    let counts = fetch_citations(&ids, &args.cache, args.offline, &config)?;
    let payload = serde_json::json!({
        "offline": args.offline,
        "counts": counts,
    });
    write_artifact(out_path(cli, "citations.json"), &json_with_meta(&meta, payload))?;
    Ok(())
}

fn cmd_gen_synthetic(cli: &Cli, args: &GenSyntheticArgs) -> Result<(), CliError> {
    let config = SynthConfig {
        n_papers: args.papers,
        n_reviewers: args.reviewers,
        reviews_per_paper: args.reviews_per_paper,
        n_duplicates: args.duplicates,
        accept_rate: args.accept_rate,
        confidence_drop: args.confidence_drop,
        late_fraction: args.late_fraction,
        seed: cli.seed,
        ..SynthConfig::default()
    };
    let dataset = generate(&config)?;
    std::fs::create_dir_all(&cli.out_dir)?;
    save_reviews(out_path(cli, "reviews.csv"), &dataset.reviews)?;
    save_duplicates(out_path(cli, "duplicates.csv"), &dataset.duplicates)?;
    save_decisions(out_path(cli, "decisions.csv"), &dataset.decisions)?;
    save_outcomes(out_path(cli, "outcomes.csv"), &dataset.outcomes)?;

    // Matching citation fixtures so `fetch` runs offline on this corpus: one
    // id per traced outcome, fully covered by the cache.
    let mut ids = String::from("# synthetic external ids\n");
    let mut entries = Vec::new();
    for outcome in
        dataset.outcomes.iter().filter(|o| o.fate != crate::data::Fate::Untraced)
    {
        let id = format!("SYN:{}", outcome.paper_id.0);
        ids.push_str(&id);
        ids.push('\n');
        entries.push(crate::citations::CitationCacheEntry {
            external_id: id,
            citations: outcome.citations,
            fetched_at: default_cutoff(),
            title: format!("Synthetic record {}", outcome.paper_id.0),
            authors: vec!["Synthetic Author".to_string()],
        });
    }
    write_artifact(out_path(cli, "ids.txt"), &ids)?;
    let cache_path = out_path(cli, "citation_cache.jsonl");
    // Regenerate rather than append: the corpus fully defines the cache.
    if cache_path.exists() {
        std::fs::remove_file(&cache_path)?;
    }
    crate::citations::append_cache(&cache_path, &entries)?;
    Ok(())
}
