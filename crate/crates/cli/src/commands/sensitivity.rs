//! `sensitivity`: kappa and phi between gender verdicts on original posts
//! and on posts with their emojis replaced by random ones.

use std::path::PathBuf;

use anyhow::Context;
use serde::Serialize;

use sempres_core::dataset::load_benchmark;
use sempres_core::judge::{sensitivity_experiment, SensitivityOptions, SensitivityPost, SensitivityReport};

use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::StageManifest;

use super::{load_lexicon, make_backend, open_cache};

pub struct Args {
    pub seed: Option<u64>,
    pub mock: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SensitivityFile {
    manifest: StageManifest,
    report: SensitivityReport,
}

pub fn run(loaded: &LoadedConfig, args: &Args) -> CliResult<()> {
    let benchmark = load_benchmark(&loaded.benchmark_path())
        .map_err(|e| CliError::from(e).at_stage("load-benchmark"))?;
    let lexicon = load_lexicon(loaded)?;
    let judge_spec = loaded.judge_spec();
    let backend = make_backend(
        &judge_spec,
        args.mock.as_deref(),
        loaded.config.judge.rate_limit_per_sec,
    )?;
    let cache = open_cache(loaded)?;

    let posts: Vec<SensitivityPost> = benchmark
        .posts
        .iter()
        .map(|p| SensitivityPost {
            id: p.id.clone(),
            plain_text: p.text.clone(),
            original_emojis: p.emojis.clone(),
        })
        .collect();

    let seed = args.seed.unwrap_or(loaded.config.seeds.sensitivity);
    let report = sensitivity_experiment(
        &posts,
        &judge_spec,
        backend.as_ref(),
        &cache,
        &lexicon,
        SensitivityOptions { seed },
    )
    .map_err(|e| CliError::from(e).at_stage("sensitivity"))?;

    let (hits, misses) = cache.stats();
    eprintln!("cache: {hits} hits, {misses} misses");

    println!(
        "kappa {:.4}  correlation {:.4}  over {} posts ({} excluded)",
        report.kappa,
        report.correlation,
        report.n_scored,
        report.excluded.len()
    );

    let manifest = StageManifest::new(
        "sensitivity",
        &loaded.digest,
        &benchmark.manifest.lexicon_version,
        loaded.config.seeds,
    )
    .with_model(&judge_spec.model_name);
    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| loaded.output_dir().join("sensitivity.json"));
    if let Some(parent) = out_path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))
            .map_err(CliError::Data)?;
    }
    let file = SensitivityFile { manifest, report };
    std::fs::write(
        &out_path,
        serde_json::to_string_pretty(&file).expect("report serializes"),
    )
    .with_context(|| format!("writing {}", out_path.display()))
    .map_err(CliError::Data)?;
    println!("sensitivity report written to {}", out_path.display());
    Ok(())
}
