//! Command-line front end for the experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use aircomp::detector::{DetectorKind, PriorMode};
use aircomp::harness::{
    emit, snr_grid, sweep, ExperimentConfig, ExperimentKind, OutputFormat, ResultRow, SchemeChoice,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "aircomp",
    version,
    about = "Digital and analog AirComp experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo MSE versus SNR for digital, analog and orthogonal access.
    SweepSnr(Common),
    /// Latency of AirComp versus orthogonal access across device counts.
    Latency(Common),
    /// SNR interval where digital beats analog, theory and numeric.
    Region(Common),
    /// Adaptive precision and slicing versus uniform slicing.
    Adaptive(Common),
    /// Closed-form error reports without simulation.
    Analyze(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Map,
    Ml,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriorArg {
    Exact,
    Normal,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

#[derive(Args)]
struct Common {
    /// TOML file with an experiment configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of devices.
    #[arg(long)]
    k: Option<usize>,
    /// Quantization bits.
    #[arg(long)]
    b: Option<u32>,
    /// Number of slices.
    #[arg(long)]
    l: Option<usize>,
    /// `ube`, `adaptive`, or slice widths LSB first such as `2-2-1`.
    #[arg(long)]
    scheme: Option<SchemeChoice>,
    #[arg(long, value_enum)]
    detector: Option<DetectorArg>,
    #[arg(long, value_enum)]
    priors: Option<PriorArg>,
    #[arg(long, allow_hyphen_values = true)]
    snr_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_max: Option<f64>,
    #[arg(long)]
    snr_step: Option<f64>,
    /// Monte Carlo samples per grid point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    /// Symbol rate in symbols per second.
    #[arg(long)]
    rate: Option<f64>,
    /// Data entries per device, for latency.
    #[arg(long)]
    m: Option<usize>,
    /// Average SNR (dB) used to choose the precision in adaptive mode.
    #[arg(long, allow_hyphen_values = true)]
    avg_snr: Option<f64>,
    /// Output path; results are printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

fn load(kind: ExperimentKind, args: Common) -> Result<ExperimentConfig, String> {
    let mut c = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    c.kind = kind;
    macro_rules! set {
        ($field:ident, $arg:expr) => {
            if let Some(v) = $arg {
                c.$field = v;
            }
        };
    }
    set!(devices, args.k);
    set!(bits, args.b);
    set!(slices, args.l);
    set!(scheme, args.scheme);
    set!(trials, args.trials);
    set!(seed, args.seed);
    set!(x_min, args.xmin);
    set!(x_max, args.xmax);
    set!(rate, args.rate);
    set!(data_len, args.m);
    set!(avg_snr_db, args.avg_snr);
    if args.out.is_some() {
        c.out = args.out;
    }
    set!(
        detector,
        args.detector.map(|d| match d {
            DetectorArg::Map => DetectorKind::Map,
            DetectorArg::Ml => DetectorKind::Ml,
        })
    );
    set!(
        priors,
        args.priors.map(|p| match p {
            PriorArg::Exact => PriorMode::Exact,
            PriorArg::Normal => PriorMode::Normal,
            PriorArg::Uniform => PriorMode::Uniform,
        })
    );
    set!(
        format,
        args.format.map(|f| match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Both => OutputFormat::Both,
        })
    );
    if args.snr_min.is_some() || args.snr_max.is_some() || args.snr_step.is_some() {
        let first = c.snr_db.first().copied().unwrap_or(0.0);
        let last = c.snr_db.last().copied().unwrap_or(30.0);
        let step = if c.snr_db.len() > 1 {
            c.snr_db[1] - c.snr_db[0]
        } else {
            2.0
        };
        c.snr_db = snr_grid(
            args.snr_min.unwrap_or(first),
            args.snr_max.unwrap_or(last),
            args.snr_step.unwrap_or(step),
        )
        .map_err(|e| e.to_string())?;
    }
    c.validate().map_err(|e| e.to_string())?;
    Ok(c)
}

fn print_rows(rows: &[ResultRow]) {
    println!(
        "{:<18} {:>7} {:>4} {:>3} {:>3} {:>14} {:>9} {:>11} {:>11} {:>10} {:>10}",
        "scheme", "snr_db", "k", "b", "l", "slicing", "trials", "mse", "nmse", "ci95", "latency_s"
    );
    for r in rows {
        println!(
            "{:<18} {:>7.2} {:>4} {:>3} {:>3} {:>14} {:>9} {:>11.4e} {:>11.4e} {:>10.2e} {:>10.4}",
            r.scheme,
            r.snr_db,
            r.k,
            r.b,
            r.l,
            if r.slicing.is_empty() {
                "-"
            } else {
                &r.slicing
            },
            r.trials,
            r.mse,
            r.nmse,
            r.ci95,
            r.latency_s
        );
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let (kind, args) = match cli.command {
        Command::SweepSnr(a) => (ExperimentKind::SweepSnr, a),
        Command::Latency(a) => (ExperimentKind::Latency, a),
        Command::Region(a) => (ExperimentKind::Region, a),
        Command::Adaptive(a) => (ExperimentKind::Adaptive, a),
        Command::Analyze(a) => (ExperimentKind::Analyze, a),
    };
    let config = load(kind, args)?;
    let rows = sweep(&config).map_err(|e| e.to_string())?;
    match &config.out {
        Some(path) => {
            for p in emit(&rows, path, config.format).map_err(|e| e.to_string())? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print_rows(&rows),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
