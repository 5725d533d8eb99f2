//! `build-benchmark`: ingest → filter → label → balance → persist.

use std::path::PathBuf;

use sempres_core::dataset::{
    balance, distribution_report, filter_corpus, ingest, label_corpus, save_benchmark,
    BalanceOptions, DistributionReport, IngestFormat, LabelingOptions, ManifestContext,
};

use crate::config::LoadedConfig;
use crate::error::CliResult;
use crate::manifest::{MESSAGE_PLACEMENT, TOOL_VERSION};

use super::{created_at, load_lexicon, make_backend, open_cache, require_file};

pub struct Args {
    pub corpus: PathBuf,
    pub format: IngestFormat,
    pub mock: Option<PathBuf>,
    pub seed: Option<u64>,
    pub male_sample: Option<usize>,
}

pub fn run(loaded: &LoadedConfig, args: &Args) -> CliResult<()> {
    let lexicon = load_lexicon(loaded).map_err(|e| e.at_stage("load-lexicon"))?;

    require_file(&args.corpus, "corpus").map_err(|e| e.at_stage("ingest"))?;
    let raw = ingest(&args.corpus, args.format).map_err(|e| crate::error::CliError::from(e).at_stage("ingest"))?;
    eprintln!("ingested {} posts", raw.len());
    if raw.is_empty() {
        eprintln!("warning: corpus is empty; writing an empty benchmark");
    }

    let mode = loaded.config.run.normalization;
    let filtered = filter_corpus(&raw, &lexicon, mode);
    eprintln!(
        "filtered to {} posts ({} dropped by lexicon filter or deduplication)",
        filtered.len(),
        raw.len() - filtered.len()
    );

    let cache = open_cache(loaded).map_err(|e| e.at_stage("label"))?;
    let judge_spec = loaded.judge_spec();
    let backend = make_backend(
        &judge_spec,
        args.mock.as_deref(),
        loaded.config.judge.rate_limit_per_sec,
    )
    .map_err(|e| e.at_stage("label"))?;

    let labeled = label_corpus(
        &filtered,
        &judge_spec,
        backend.as_ref(),
        &cache,
        LabelingOptions {
            concurrency: loaded.config.run.concurrency,
        },
    )
    .map_err(|e| crate::error::CliError::from(e).at_stage("label"))?;
    for dropped in &labeled.dropped {
        eprintln!("dropped {}: {}", dropped.id, dropped.reason);
    }
    let (hits, misses) = cache.stats();
    eprintln!("cache: {hits} hits, {misses} misses");

    print_distribution("before balancing", &distribution_report(&labeled.posts));

    let opts = BalanceOptions {
        seed: args.seed.unwrap_or(loaded.config.seeds.balance),
        male_sample: args.male_sample.unwrap_or(loaded.config.run.male_sample),
    };
    let ctx = ManifestContext {
        lexicon_version: lexicon.version().to_string(),
        judge_model: judge_spec.model_name.clone(),
        created_at: created_at(args.mock.is_some()),
    };
    let (mut benchmark, report) = balance(&labeled.posts, opts, &ctx);
    if report.male_shortfall {
        eprintln!(
            "warning: only {} male posts available for a sample of {}",
            report.male_available, opts.male_sample
        );
    }

    benchmark
        .manifest
        .extra
        .insert("config_digest".into(), loaded.digest.clone().into());
    benchmark
        .manifest
        .extra
        .insert("tool_version".into(), TOOL_VERSION.into());
    benchmark
        .manifest
        .extra
        .insert("message_placement".into(), MESSAGE_PLACEMENT.into());
    benchmark.manifest.extra.insert(
        "seeds".into(),
        serde_json::to_value(loaded.config.seeds).expect("seeds serialize"),
    );

    print_distribution("after balancing", &benchmark.manifest.histograms);

    let out = loaded.benchmark_path();
    save_benchmark(&benchmark, &out)
        .map_err(|e| crate::error::CliError::from(e).at_stage("persist"))?;
    println!(
        "benchmark written to {} ({} posts: {} minority-emotion, {} minority-age, {} against, {} male sample)",
        out.display(),
        benchmark.posts.len(),
        report.minority_emotion_ids.len(),
        report.minority_age_ids.len(),
        report.stance_against_ids.len(),
        report.male_sample_ids.len(),
    );
    Ok(())
}

fn print_distribution(title: &str, report: &DistributionReport) {
    println!("label distribution {title}:");
    for (task, histogram) in report {
        let total: usize = histogram.values().sum();
        print!("  {task:<10} (n={total:<6})");
        for (class, count) in histogram {
            print!("  {class}={count}");
        }
        println!();
    }
}
