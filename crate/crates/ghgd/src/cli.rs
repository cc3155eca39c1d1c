//! Command-line interface behind the `ghgd` binary.
//!
//! Four subcommands: `report` (significance report for observed element
//! lists), `stats` (closed-form moments), `dist` (exact distribution),
//! `sample` (Monte Carlo). Exit codes: 0 success, 1 usage error,
//! 2 invalid input, 3 budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::distribution::{exact_distribution_budgeted, DEFAULT_STATE_BUDGET};
use crate::error::{Error, Result};
use crate::inference::{build_report, InferenceConfig, ZMinRule};
use crate::input::{ingest, UniverseSpec};
use crate::kernel::{decimal_string, ratio_to_f64};
use crate::moments::{expectation_partial, indicator_moments};
use crate::problem::{OverlapFeature, ProblemSpec};
use crate::sample::sample_distribution;

#[derive(Parser)]
#[command(
    name = "ghgd",
    version,
    about = "Exact overlap statistics for families of subsets drawn from a common universe"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Significance report for observed element lists
    Report(ReportArgs),
    /// Closed-form mean and variance per overlap level
    Stats(StatsArgs),
    /// Exact distribution of the overlap statistic
    Dist(DistArgs),
    /// Monte Carlo sampling of the overlap statistic
    Sample(SampleArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ZMinRuleArg {
    /// Floor of the credibility interval's upper end
    #[value(alias = "floor")]
    FloorOfInterval,
    /// Smallest count strictly outside the interval
    #[value(alias = "strict")]
    StrictCeil,
}

impl From<ZMinRuleArg> for ZMinRule {
    fn from(arg: ZMinRuleArg) -> Self {
        match arg {
            ZMinRuleArg::FloorOfInterval => ZMinRule::FloorOfInterval,
            ZMinRuleArg::StrictCeil => ZMinRule::StrictCeil,
        }
    }
}

fn parse_feature(s: &str) -> std::result::Result<OverlapFeature, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args)]
struct ReportArgs {
    /// Element list files, one identifier per line
    #[arg(required = true)]
    lists: Vec<PathBuf>,

    /// Universe size N
    #[arg(
        long,
        conflicts_with = "universe_file",
        required_unless_present = "universe_file"
    )]
    universe_size: Option<u64>,

    /// File enumerating every universe element
    #[arg(long)]
    universe_file: Option<PathBuf>,

    /// Significance level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Assumed |mean - mode| gap for the unimodal bound
    #[arg(long, default_value_t = 1.0)]
    mode_gap: f64,

    /// How to derive the significance threshold
    #[arg(long, value_enum, default_value_t = ZMinRuleArg::FloorOfInterval)]
    zmin_rule: ZMinRuleArg,

    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Lowercase identifiers before comparing
    #[arg(long)]
    fold_case: bool,

    /// Attach exact tail probabilities per row
    #[arg(long)]
    exact: bool,

    /// State budget for the exact distribution
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    exact_budget: u64,

    /// Fall back to Monte Carlo tails when the exact budget is exceeded
    #[arg(long)]
    mc: bool,

    /// Draws for the Monte Carlo fallback
    #[arg(long, default_value_t = 100_000)]
    draws: u64,

    /// Seed for the Monte Carlo fallback
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Universe size N
    #[arg(long)]
    n: u64,

    /// Subset sizes, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u64>,

    /// exactly:<t> or at_least:<t>; every level of both kinds when omitted
    #[arg(long, value_parser = parse_feature)]
    feature: Option<OverlapFeature>,

    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Write the table here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DistArgs {
    /// Universe size N
    #[arg(long)]
    n: u64,

    /// Subset sizes, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u64>,

    /// exactly:<t> or at_least:<t>
    #[arg(long, value_parser = parse_feature)]
    feature: OverlapFeature,

    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// State budget for the layered dynamic program
    #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
    exact_budget: u64,

    /// Write the distribution here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Universe size N
    #[arg(long)]
    n: u64,

    /// Subset sizes, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<u64>,

    /// exactly:<t> or at_least:<t>
    #[arg(long, value_parser = parse_feature)]
    feature: OverlapFeature,

    /// Number of sampled subset tuples
    #[arg(long, default_value_t = 100_000)]
    draws: u64,

    /// RNG seed; equal seeds reproduce the tally exactly
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Write the tally here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` and runs a subcommand, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::StateBudgetExceeded { .. }
                | Error::EnumerationBudgetExceeded { .. }
                | Error::PatternBudgetExceeded { .. } => 3,
                _ => 2,
            }
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Report(args) => cmd_report(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Dist(args) => cmd_dist(args),
        Command::Sample(args) => cmd_sample(args),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let universe = match (args.universe_size, &args.universe_file) {
        (Some(n), None) => UniverseSpec::Size(n),
        (None, Some(path)) => UniverseSpec::File(path.clone()),
        _ => unreachable!("clap enforces exactly one universe flag"),
    };
    let ingested = ingest(&args.lists, &universe, args.fold_case)?;
    for warning in &ingested.warnings {
        eprintln!("warning: {warning}");
    }
    let spec = ingested.lists.problem_spec()?;
    let observed = ingested.lists.observed_lo_counts();
    let config = InferenceConfig {
        alpha: args.alpha,
        mode_gap_s: args.mode_gap,
        z_min_rule: args.zmin_rule.into(),
    };
    let mut report = build_report(&spec, &observed, config)?;

    if args.exact {
        for (i, row) in report.rows.iter_mut().enumerate() {
            match exact_distribution_budgeted(&spec, row.feature, args.exact_budget) {
                Ok(dist) => row.exact_tail = Some(dist.tail_probability(row.noess)),
                Err(err @ Error::StateBudgetExceeded { .. }) => {
                    if !args.mc {
                        return Err(err);
                    }
                    let sample = sample_distribution(
                        &spec,
                        row.feature,
                        args.draws,
                        args.seed.wrapping_add(i as u64),
                    )?;
                    row.mc_tail = Some(sample.tail_fraction(row.noess));
                }
                Err(err) => return Err(err),
            }
        }
    }

    let content = match args.format {
        FormatArg::Text => report.render_text(),
        FormatArg::Tsv => report.render_tsv(),
        FormatArg::Json => with_newline(report.to_json_string()),
    };
    emit(&args.out, &content)
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let spec = ProblemSpec::new(args.n, args.m)?;
    let features: Vec<OverlapFeature> = match args.feature {
        Some(feature) => vec![feature],
        None => {
            let t_count = spec.t_count() as u32;
            (1..=t_count)
                .rev()
                .map(OverlapFeature::Exactly)
                .chain((1..=t_count).rev().map(OverlapFeature::AtLeast))
                .collect()
        }
    };
    let mut rows = Vec::new();
    for feature in features {
        let mean = expectation_partial(&spec, feature)?;
        let variance = indicator_moments(&spec, feature)?.variance;
        rows.push((feature, mean, variance));
    }

    let content = match args.format {
        FormatArg::Text => {
            let mut out = format!("problem: N={}, M={:?}\n\n", spec.n(), spec.m());
            out.push_str(&format!(
                "{:<12} {:>16} {:>16} {:>12}\n",
                "feature", "mean", "variance", "sd"
            ));
            for (feature, mean, variance) in &rows {
                let sd = ratio_to_f64(variance).sqrt();
                out.push_str(&format!(
                    "{:<12} {:>16} {:>16} {:>12.6}\n",
                    feature.to_string(),
                    decimal_string(mean, 6),
                    decimal_string(variance, 6),
                    sd
                ));
            }
            out
        }
        FormatArg::Tsv => {
            let mut out =
                String::from("feature\tt\tmean\tvariance\tmean_exact\tvariance_exact\n");
            for (feature, mean, variance) in &rows {
                let kind = match feature {
                    OverlapFeature::Exactly(_) => "exactly",
                    OverlapFeature::AtLeast(_) => "at_least",
                };
                out.push_str(&format!(
                    "{kind}\t{}\t{}\t{}\t{}/{}\t{}/{}\n",
                    feature.t(),
                    decimal_string(mean, 6),
                    decimal_string(variance, 6),
                    mean.numer(),
                    mean.denom(),
                    variance.numer(),
                    variance.denom(),
                ));
            }
            out
        }
        FormatArg::Json => {
            use serde::Serialize;
            #[derive(Serialize)]
            struct RowDoc {
                feature: OverlapFeature,
                mean: String,
                mean_exact: String,
                variance: String,
                variance_exact: String,
            }
            #[derive(Serialize)]
            struct StatsDoc<'a> {
                n: u64,
                m: &'a [u64],
                rows: Vec<RowDoc>,
            }
            let doc = StatsDoc {
                n: spec.n(),
                m: spec.m(),
                rows: rows
                    .iter()
                    .map(|(feature, mean, variance)| RowDoc {
                        feature: *feature,
                        mean: decimal_string(mean, 6),
                        mean_exact: format!("{}/{}", mean.numer(), mean.denom()),
                        variance: decimal_string(variance, 6),
                        variance_exact: format!("{}/{}", variance.numer(), variance.denom()),
                    })
                    .collect(),
            };
            with_newline(serde_json::to_string(&doc).expect("stats serialize"))
        }
    };
    emit(&args.out, &content)
}

fn cmd_dist(args: DistArgs) -> Result<()> {
    let spec = ProblemSpec::new(args.n, args.m)?;
    let dist = exact_distribution_budgeted(&spec, args.feature, args.exact_budget)?;
    let content = match args.format {
        FormatArg::Text => {
            let mut out = format!(
                "problem: N={}, M={:?}   feature: {}\nnormalizer: {}\n\n",
                spec.n(),
                spec.m(),
                args.feature,
                dist.normalizer()
            );
            out.push_str(&format!("{:<8} {:<28} {}\n", "k", "count", "pmf"));
            for (k, count) in dist.counts() {
                out.push_str(&format!(
                    "{:<8} {:<28} {}\n",
                    k,
                    count,
                    decimal_string(&dist.pmf(*k), 6)
                ));
            }
            out
        }
        FormatArg::Tsv => {
            let mut out = String::from("k\tcount\tpmf\n");
            for (k, count) in dist.counts() {
                out.push_str(&format!(
                    "{k}\t{count}\t{}\n",
                    decimal_string(&dist.pmf(*k), 6)
                ));
            }
            out
        }
        FormatArg::Json => with_newline(dist.to_json_string()),
    };
    emit(&args.out, &content)
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    let spec = ProblemSpec::new(args.n, args.m)?;
    let report = sample_distribution(&spec, args.feature, args.draws, args.seed)?;
    let content = match args.format {
        FormatArg::Text => {
            let mut out = format!(
                "problem: N={}, M={:?}   feature: {}\ndraws: {}   seed: {}\n\
                 empirical mean: {:.6}   empirical variance: {:.6}\n\n",
                spec.n(),
                spec.m(),
                args.feature,
                report.draws(),
                report.seed(),
                report.empirical_mean(),
                report.empirical_variance()
            );
            out.push_str(&format!("{:<8} {:<12} {}\n", "k", "count", "fraction"));
            for (k, count) in report.histogram() {
                out.push_str(&format!(
                    "{:<8} {:<12} {:.6}\n",
                    k,
                    count,
                    *count as f64 / report.draws() as f64
                ));
            }
            out
        }
        FormatArg::Tsv => {
            let mut out = String::from("k\tcount\tfraction\n");
            for (k, count) in report.histogram() {
                out.push_str(&format!(
                    "{k}\t{count}\t{:.6}\n",
                    *count as f64 / report.draws() as f64
                ));
            }
            out
        }
        FormatArg::Json => with_newline(report.to_json_string()),
    };
    emit(&args.out, &content)
}

fn with_newline(mut s: String) -> String {
    s.push('\n');
    s
}
