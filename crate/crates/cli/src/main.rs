//! `sempres`: batch evaluation harness measuring whether emoji
//! recommendations preserve the semantics of social-media text.
//!
//! Pipeline: `build-benchmark` → `recommend` → `judge` (original and
//! recommended variants) → `score`, plus the `sensitivity` experiment.
//! Stages communicate only via files; every output starts with a manifest
//! line for reproducibility.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{StrategyArg, VariantArg};
use config::LoadedConfig;
use error::CliResult;
use sempres_core::dataset::IngestFormat;

#[derive(Parser)]
#[command(name = "sempres", version, about = "Semantics-preserving emoji recommendation harness")]
struct Cli {
    /// Path to the TOML run configuration.
    #[arg(long, global = true, default_value = "sempres.toml")]
    config: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest, filter, judge-label, balance, and persist the benchmark.
    BuildBenchmark {
        /// Raw corpus file.
        #[arg(long)]
        corpus: PathBuf,
        /// Corpus format.
        #[arg(long, default_value = "jsonl")]
        format: String,
        /// Scripted mock backend fixture (JSONL rules) instead of live calls.
        #[arg(long)]
        mock: Option<PathBuf>,
        /// Balancing seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Male down-sample size override.
        #[arg(long)]
        male_sample: Option<usize>,
    },
    /// Produce one recommendation (or failure record) per benchmark post.
    Recommend {
        /// Recommender model name (defaults to the first configured one).
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum, default_value = "zero-shot")]
        strategy: StrategyArg,
        /// Baseline seed override (random strategy).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mock: Option<PathBuf>,
        /// Output path override.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Judge one variant of every post across the five tasks.
    Judge {
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Recommendations file (recommended variant; defaults from
        /// --model/--strategy).
        #[arg(long)]
        recommendations: Option<PathBuf>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum, default_value = "zero-shot")]
        strategy: StrategyArg,
        #[arg(long)]
        mock: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Join judged variants into the full score report with CSV exports.
    Score {
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum, default_value = "zero-shot")]
        strategy: StrategyArg,
        #[arg(long)]
        recommendations: Option<PathBuf>,
        #[arg(long)]
        judged_original: Option<PathBuf>,
        #[arg(long)]
        judged_recommended: Option<PathBuf>,
        /// Optional human annotation file: JSONL of {post_id, score}.
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(long)]
        out_prefix: Option<String>,
    },
    /// Measure the judge's sensitivity to random emoji substitution.
    Sensitivity {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mock: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let loaded = LoadedConfig::load(&cli.config)?;
    match cli.command {
        Command::BuildBenchmark {
            corpus,
            format,
            mock,
            seed,
            male_sample,
        } => {
            let format: IngestFormat = format
                .parse()
                .map_err(|e: String| error::CliError::config(anyhow::anyhow!(e)))?;
            commands::build_benchmark::run(
                &loaded,
                &commands::build_benchmark::Args {
                    corpus,
                    format,
                    mock,
                    seed,
                    male_sample,
                },
            )
        }
        Command::Recommend {
            model,
            strategy,
            seed,
            mock,
            out,
        } => commands::recommend::run(
            &loaded,
            &commands::recommend::Args {
                model,
                strategy,
                seed,
                mock,
                out,
            },
        ),
        Command::Judge {
            variant,
            recommendations,
            model,
            strategy,
            mock,
            out,
        } => commands::judge::run(
            &loaded,
            &commands::judge::Args {
                variant,
                recommendations,
                model,
                strategy,
                mock,
                out,
            },
        ),
        Command::Score {
            model,
            strategy,
            recommendations,
            judged_original,
            judged_recommended,
            annotations,
            out_prefix,
        } => commands::score::run(
            &loaded,
            &commands::score::Args {
                model,
                strategy,
                recommendations,
                judged_original,
                judged_recommended,
                annotations,
                out_prefix,
            },
        ),
        Command::Sensitivity { seed, mock, out } => commands::sensitivity::run(
            &loaded,
            &commands::sensitivity::Args { seed, mock, out },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
