//! `imbalance-bench`: run oversampling-vs-classifier experiment grids,
//! generate synthetic fixtures, and re-render reports.
//!
//! Exit codes: 0 success, 1 config error (bad flags, bad config file,
//! missing inputs), 2 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use imbalance_core::harness::{
    emit_report, generate_synthetic, parse_cells_csv, parse_spec, render_csv, render_markdown,
    run_experiment, write_corpus_tsv, write_matrix_csv, ExperimentConfig, ReportFormat,
};
use imbalance_core::Error;

#[derive(Parser)]
#[command(name = "imbalance-bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment grid described by a config file.
    Run {
        /// Path to the `key = value` experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write measured wall times into the CSV instead of zeros
        /// (sacrifices byte-level reproducibility).
        #[arg(long)]
        timings: bool,
    },
    /// Generate Gaussian class blobs from a spec file.
    Synth {
        /// Path to the blob spec.
        #[arg(long)]
        spec: PathBuf,
        /// Output file; `.csv` writes a label-first matrix, `.tsv` renders
        /// each sample as a pseudo-sentence corpus line.
        #[arg(long)]
        out: PathBuf,
        /// Force the output flavor (csv|tsv) regardless of extension.
        #[arg(long)]
        format: Option<String>,
    },
    /// Re-render a cells CSV produced by `run`.
    Report {
        /// Path to a cells CSV.
        #[arg(long)]
        cells: PathBuf,
        /// Output format: markdown (default) or csv.
        #[arg(long, default_value = "markdown")]
        format: String,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            // Usage problems are config errors; --help/--version land here
            // with use_stderr() == false.
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if is_config_error(&e) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn is_config_error(e: &Error) -> bool {
    match e {
        Error::Config(_) => true,
        Error::Cell { source, .. } => is_config_error(source),
        _ => false,
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            timings,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(out) = out {
                cfg.out_dir = out;
            }
            if timings {
                cfg.include_timings = true;
            }
            let cells = run_experiment(&cfg)?;
            let csv = emit_report(&cells, ReportFormat::Csv, &cfg.out_dir, cfg.include_timings)?;
            let md = emit_report(&cells, ReportFormat::Markdown, &cfg.out_dir, cfg.include_timings)?;
            println!("{} cells -> {} and {}", cells.len(), csv.display(), md.display());
            Ok(())
        }
        Command::Synth { spec, out, format } => {
            let spec = parse_spec(&spec)?;
            let fm = generate_synthetic(&spec)?;
            let flavor = match format.as_deref() {
                Some("csv") => "csv",
                Some("tsv") => "tsv",
                Some(other) => {
                    return Err(Error::Config(format!(
                        "unknown synth format {other:?} (expected csv|tsv)"
                    )))
                }
                None => match out.extension().and_then(|e| e.to_str()) {
                    Some("tsv") => "tsv",
                    _ => "csv",
                },
            };
            if flavor == "tsv" {
                write_corpus_tsv(&fm, &out)?;
            } else {
                write_matrix_csv(&fm, &out)?;
            }
            println!("{} samples -> {}", fm.len(), out.display());
            Ok(())
        }
        Command::Report { cells, format, out } => {
            let rows = parse_cells_csv(&cells)?;
            let format = ReportFormat::parse(&format)?;
            let body = match format {
                ReportFormat::Markdown => render_markdown(&rows),
                ReportFormat::Csv => render_csv(&rows, true),
            };
            match out {
                Some(path) => std::fs::write(&path, body)
                    .map_err(|e| Error::Io { path, source: e })?,
                None => print!("{body}"),
            }
            Ok(())
        }
    }
}
