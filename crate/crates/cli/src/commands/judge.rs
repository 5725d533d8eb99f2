//! `judge`: five task verdicts per post, for the original or recommended
//! variant.

use std::collections::HashMap;
use std::path::PathBuf;

use anyhow::anyhow;

use sempres_core::dataset::load_benchmark;
use sempres_core::gateway::RecommendOutcome;
use sempres_core::judge::{compose_with_emojis, label_all};

use crate::config::{slug, LoadedConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{read_jsonl, write_jsonl, JudgeRow, StageManifest};

use super::{make_backend, open_cache, parallel_map, require_file, StrategyArg, VariantArg};

pub struct Args {
    pub variant: VariantArg,
    pub recommendations: Option<PathBuf>,
    pub model: Option<String>,
    pub strategy: StrategyArg,
    pub mock: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn run(loaded: &LoadedConfig, args: &Args) -> CliResult<()> {
    let benchmark = load_benchmark(&loaded.benchmark_path())
        .map_err(|e| CliError::from(e).at_stage("load-benchmark"))?;

    // (post_id, composed text) items, plus the variant tag and output name.
    let (variant_tag, file_tag, items) = match args.variant {
        VariantArg::Original => {
            let items: Vec<(String, String)> = benchmark
                .posts
                .iter()
                .map(|p| (p.id.clone(), compose_with_emojis(&p.text, &p.emojis)))
                .collect();
            ("original".to_string(), "original".to_string(), items)
        }
        VariantArg::Recommended => {
            let rec_path = args.recommendations.clone().unwrap_or_else(|| {
                default_recommendations_path(loaded, args.model.as_deref(), args.strategy)
            });
            require_file(&rec_path, "recommendations")?;
            let (manifest, outcomes): (serde_json::Value, Vec<RecommendOutcome>) =
                read_jsonl(&rec_path)?;
            let strategy = manifest["strategy"].as_str().unwrap_or("recommended");
            let model = manifest["model"].as_str().unwrap_or("model");
            // Random-baseline recommendations judge as their own variant.
            let variant_tag = if strategy == "random" { "random" } else { "recommended" };
            let file_tag = format!("{}_{}", slug(model), strategy);

            let by_id: HashMap<&str, _> = benchmark
                .posts
                .iter()
                .map(|p| (p.id.as_str(), p))
                .collect();
            let mut items = Vec::new();
            let mut skipped = 0usize;
            for outcome in &outcomes {
                match outcome {
                    RecommendOutcome::Ok(rec) => {
                        let post = by_id.get(rec.post_id.as_str()).ok_or_else(|| {
                            CliError::data(anyhow!(
                                "recommendation for unknown post id {:?}",
                                rec.post_id
                            ))
                        })?;
                        items.push((
                            rec.post_id.clone(),
                            compose_with_emojis(&post.text, &rec.emojis),
                        ));
                    }
                    RecommendOutcome::Failed(f) => {
                        skipped += 1;
                        eprintln!("skipping {}: recommendation failed ({})", f.post_id, f.reason);
                    }
                }
            }
            if skipped > 0 {
                eprintln!("{skipped} posts skipped (no recommendation to judge)");
            }
            (variant_tag.to_string(), file_tag, items)
        }
    };

    let judge_spec = loaded.judge_spec();
    let backend = make_backend(
        &judge_spec,
        args.mock.as_deref(),
        loaded.config.judge.rate_limit_per_sec,
    )?;
    let cache = open_cache(loaded)?;

    let variant_for_rows = variant_tag.clone();
    let per_post = parallel_map(
        &items,
        loaded.config.run.concurrency,
        |(post_id, text)| -> CliResult<Vec<JudgeRow>> {
            let outcome = label_all(text, &judge_spec, backend.as_ref(), &cache)?;
            Ok(outcome
                .verdicts
                .into_iter()
                .map(|v| JudgeRow {
                    post_id: post_id.clone(),
                    variant: variant_for_rows.clone(),
                    task: v.task,
                    votes: v.votes,
                    label: v.label,
                })
                .collect())
        },
    )
    .into_iter()
    .collect::<CliResult<Vec<_>>>()
    .map_err(|e| e.at_stage("judge"))?;
    let rows: Vec<JudgeRow> = per_post.into_iter().flatten().collect();

    let (hits, misses) = cache.stats();
    eprintln!("cache: {hits} hits, {misses} misses");

    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| loaded.output_dir().join(format!("judged_{file_tag}.jsonl")));
    let lexicon_version = benchmark.manifest.lexicon_version.clone();
    let manifest = StageManifest::new("judge", &loaded.digest, &lexicon_version, loaded.config.seeds)
        .with_model(&judge_spec.model_name)
        .with_variant(&variant_tag);
    write_jsonl(&out_path, &manifest, &rows)?;

    println!(
        "{} verdicts over {} posts written to {}",
        rows.len(),
        items.len(),
        out_path.display()
    );
    Ok(())
}

pub(crate) fn default_recommendations_path(
    loaded: &LoadedConfig,
    model: Option<&str>,
    strategy: StrategyArg,
) -> PathBuf {
    let model_name = if strategy == StrategyArg::Random {
        "random-baseline".to_string()
    } else {
        loaded
            .recommender_spec(model)
            .map(|s| s.model_name)
            .unwrap_or_else(|_| "model".to_string())
    };
    loaded.output_dir().join(format!(
        "recommendations_{}_{}.jsonl",
        slug(&model_name),
        strategy.tag()
    ))
}
