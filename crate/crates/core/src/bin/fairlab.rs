use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fairlab::dataset::{self, DatasetSpec};
use fairlab::harness::{self, ExperimentConfig};
use fairlab::metrics::{self, MetricsReport};
use fairlab::repair::RepairConfig;
use fairlab::{Error, Result};

#[derive(Parser)]
#[command(
    name = "fairlab",
    version,
    about = "Fairness repair and trade-off experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset from a JSON spec.
    Gen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print dataset metrics as JSON.
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Apply a repair described by inline JSON or a JSON file.
    Repair {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
        /// Materialize weights by weighted resampling with this seed.
        #[arg(long)]
        resample_seed: Option<u64>,
    },
    /// Print per-group histograms as JSON.
    Hist {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = harness::DEFAULT_BINS)]
        bins: usize,
        /// `lo,hi`
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        range: (f64, f64),
    },
    /// Regenerate D1–D3 and write the dataset, skew and histogram reports.
    Reproduce {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a train-on-repaired / test-on-original sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: `{t}`"))
    };
    Ok((parse(lo)?, parse(hi)?))
}

fn repair_config(arg: &str) -> Result<RepairConfig> {
    let (text, origin) = if arg.trim_start().starts_with('{') {
        (arg.to_string(), PathBuf::from("--config"))
    } else {
        let path = Path::new(arg);
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        (text, path.to_path_buf())
    };
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: origin,
        source: e,
    })
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    print!("{}", harness::to_sorted_json(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { spec, out } => {
            let spec = DatasetSpec::from_json_file(&spec)?;
            dataset::write_csv(&dataset::generate(&spec)?, &out)
        }
        Command::Metrics { input } => {
            let data = dataset::read_csv(&input)?;
            print_json(&MetricsReport::for_dataset(&data))
        }
        Command::Repair {
            input,
            config,
            out,
            resample_seed,
        } => {
            let data = dataset::read_csv(&input)?;
            let cfg = repair_config(&config)?;
            let repaired = match resample_seed {
                Some(seed) => cfg.materialize(&data, seed)?,
                None => cfg.apply(&data)?,
            };
            dataset::write_csv(&repaired.data, &out)
        }
        Command::Hist { input, bins, range } => {
            let data = dataset::read_csv(&input)?;
            let hists = data
                .group_counts()
                .keys()
                .map(|&g| metrics::group_histogram(&data, g, bins, range))
                .collect::<Result<Vec<_>>>()?;
            print_json(&hists)
        }
        Command::Reproduce { seed, out } => {
            harness::reproduce_paper(seed, &out)?;
            eprintln!("wrote reports to {}", out.display());
            Ok(())
        }
        Command::Sweep { config, out } => {
            let cfg = ExperimentConfig::from_json_file(&config)?;
            let rows = harness::run_tradeoff_sweep(&cfg, &out)?;
            let failed = rows.iter().filter(|r| r.failed()).count();
            eprintln!(
                "wrote {} rows ({} failed) to {}",
                rows.len(),
                failed,
                out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
