//! `ndcg-phi`: compare ad-hoc nDCG@k with nDCG_φ@k on ranking datasets,
//! run synthetic ordering-error experiments, and dump fitted φ curves.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ndcg_phi::dataset::{self, EvaluationConfig};
use ndcg_phi::numfmt::fmt_sig15;
use ndcg_phi::synth::{self, Distribution, ExperimentConfig, Scenario};
use ndcg_phi::{Buckets, DiscountKind, GainKind, RelevanceFunction, ScoreSummary};

#[derive(Parser, Debug)]
#[command(
    name = "ndcg-phi",
    version,
    about = "nDCG@k with score-interpolated relevance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every ranking in a CSV file under both relevance sources
    Eval(EvalArgs),
    /// Run a synthetic ordering-error experiment
    Synth(SynthArgs),
    /// Fit φ to a score list and sample it on a dense grid
    Phi(PhiArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliGain {
    Linear,
    Exponential,
}

impl From<CliGain> for GainKind {
    fn from(g: CliGain) -> Self {
        match g {
            CliGain::Linear => GainKind::Linear,
            CliGain::Exponential => GainKind::Exponential,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliDiscount {
    Logarithmic,
    Zipfian,
}

impl From<CliDiscount> for DiscountKind {
    fn from(d: CliDiscount) -> Self {
        match d {
            CliDiscount::Logarithmic => DiscountKind::Logarithmic,
            CliDiscount::Zipfian => DiscountKind::Zipfian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliDistribution {
    Balanced,
    Imbalanced,
}

impl From<CliDistribution> for Distribution {
    fn from(d: CliDistribution) -> Self {
        match d {
            CliDistribution::Balanced => Distribution::Balanced,
            CliDistribution::Imbalanced => Distribution::Imbalanced,
        }
    }
}

#[derive(Args, Debug)]
struct MetricArgs {
    #[arg(long, value_enum, default_value = "exponential")]
    gain: CliGain,

    #[arg(long, value_enum, default_value = "logarithmic")]
    discount: CliDiscount,

    /// Ad-hoc relevance buckets as `ranks:levels`
    #[arg(long, default_value = "10,25,50:3,2,1,0", value_parser = parse_buckets)]
    buckets: Buckets,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// CSV with header `ranking_id,item_id,position,score` (`-` for stdin)
    #[arg(long)]
    input: PathBuf,

    /// Report destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,

    /// Also write per-ranking rows as CSV here
    #[arg(long)]
    csv_output: Option<PathBuf>,

    /// Cut-off; repeat for several (`--k 5 --k 10`)
    #[arg(long = "k", default_value = "10")]
    ks: Vec<usize>,

    #[command(flatten)]
    metric: MetricArgs,

    /// What `--output` receives: the JSON report or per-ranking CSV rows
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// `swap:i:j` or `invert`
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,

    #[arg(long, value_enum)]
    distribution: CliDistribution,

    #[arg(long, default_value_t = 100)]
    n: usize,

    #[arg(long, default_value_t = 10)]
    k: usize,

    #[arg(long, default_value_t = 1000)]
    samples: usize,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[command(flatten)]
    metric: MetricArgs,

    /// Result destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,

    /// Long-format `sample_index,metric,value` CSV; defaults to
    /// `<output stem>.samples.csv` when `--output` is a file
    #[arg(long)]
    csv_output: Option<PathBuf>,

    /// What `--output` receives: the JSON result or the long CSV
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
struct PhiArgs {
    /// One score per line (`-` for stdin)
    #[arg(long)]
    input: PathBuf,

    /// `y,phi` grid destination (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,

    /// Knot table destination; defaults to `<output stem>.knots.csv`, or
    /// stderr when the grid goes to stdout
    #[arg(long)]
    knots: Option<PathBuf>,

    /// Grid size over [min, max] of the scores
    #[arg(long, default_value_t = 1001, value_parser = clap::value_parser!(u32).range(2..))]
    points: u32,
}

fn parse_buckets(s: &str) -> std::result::Result<Buckets, String> {
    let (ranks, levels) = s
        .split_once(':')
        .ok_or_else(|| "expected `r1,r2,...:l0,l1,...`".to_string())?;
    let list = |part: &str| -> std::result::Result<Vec<u32>, String> {
        part.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}")))
            .collect()
    };
    let ranks = list(ranks)?.into_iter().map(|r| r as usize).collect();
    Buckets::new(ranks, list(levels)?).map_err(|e| e.to_string())
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    s.parse().map_err(|e: ndcg_phi::Error| e.to_string())
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdin()));
    }
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(f))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_json<T: serde::Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run_eval(args: EvalArgs) -> Result<()> {
    let rankings = dataset::parse_rankings(open_input(&args.input)?)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let config = EvaluationConfig {
        gain: args.metric.gain.into(),
        discount: args.metric.discount.into(),
        ks: args.ks,
        buckets: args.metric.buckets,
    };
    let report = dataset::evaluate_dataset(&rankings, &config)?;

    let mut out = open_output(args.output.as_deref())?;
    match args.format {
        Format::Json => write_json(&report, &mut out)?,
        Format::Csv => dataset::write_report_csv(&report, &mut out)?,
    }
    out.flush()?;
    if let Some(path) = &args.csv_output {
        dataset::write_report_csv(&report, open_output(Some(path))?)?;
    }
    for e in &report.errors {
        eprintln!(
            "warning: ranking `{}` skipped ({}): {}",
            e.ranking_id, e.code, e.message
        );
    }
    Ok(())
}

fn write_long_csv(result: &synth::ExperimentResult, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sample_index", "metric", "value"])?;
    for (i, metric, value) in result.long_rows() {
        w.write_record([i.to_string(), metric.to_string(), fmt_sig15(value)])?;
    }
    w.flush()?;
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let config = ExperimentConfig {
        n: args.n,
        k: args.k,
        samples: args.samples,
        distribution: args.distribution.into(),
        scenario: args.scenario,
        seed: args.seed,
        gain: args.metric.gain.into(),
        discount: args.metric.discount.into(),
        buckets: args.metric.buckets,
    };
    let result = synth::run_experiment(&config)?;

    let mut out = open_output(args.output.as_deref())?;
    match args.format {
        Format::Json => write_json(&result, &mut out)?,
        Format::Csv => write_long_csv(&result, &mut out)?,
    }
    out.flush()?;

    let csv_path = match (&args.csv_output, &args.output, args.format) {
        (Some(p), _, _) => Some(p.clone()),
        (None, Some(o), Format::Json) => Some(sibling(o, "samples.csv")),
        _ => None,
    };
    if let Some(p) = csv_path {
        write_long_csv(&result, open_output(Some(&p))?)?;
    }
    Ok(())
}

fn read_scores(input: impl Read) -> Result<Vec<f64>> {
    let mut scores = Vec::new();
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let y: f64 = t
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .with_context(|| format!("line {}: `{t}` is not a finite number", idx + 1))?;
        scores.push(y);
    }
    if scores.is_empty() {
        bail!("no scores in input");
    }
    Ok(scores)
}

fn write_knots(phi: &RelevanceFunction, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "relevance", "derivative"])?;
    for (k, d) in phi.knots().iter().zip(phi.derivatives()) {
        w.write_record([fmt_sig15(k.x), fmt_sig15(k.v), fmt_sig15(*d)])?;
    }
    w.flush()?;
    Ok(())
}

fn run_phi(args: PhiArgs) -> Result<()> {
    let scores = read_scores(open_input(&args.input)?)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let phi = RelevanceFunction::from_scores(&scores)?;
    let summary = ScoreSummary::from_scores(&scores)?;

    let mut w = csv::Writer::from_writer(open_output(args.output.as_deref())?);
    w.write_record(["y", "phi"])?;
    let last = f64::from(args.points - 1);
    for i in 0..args.points {
        let y = if i == args.points - 1 {
            summary.max
        } else {
            summary.min + (summary.max - summary.min) * f64::from(i) / last
        };
        w.write_record([fmt_sig15(y), fmt_sig15(phi.eval(y)?)])?;
    }
    w.flush()?;

    match (&args.knots, &args.output) {
        (Some(p), _) => write_knots(&phi, open_output(Some(p))?)?,
        (None, Some(o)) => write_knots(&phi, open_output(Some(&sibling(o, "knots.csv")))?)?,
        (None, None) => write_knots(&phi, io::stderr().lock())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Synth(a) => run_synth(a),
        Command::Phi(a) => run_phi(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
