//! `recommend`: one recommendation (or failure record) per benchmark post.

use std::path::PathBuf;

use sempres_core::dataset::load_benchmark;
use sempres_core::gateway::{
    random_baseline, recommend, PromptStrategy, RecommendOutcome,
};

use crate::config::{slug, LoadedConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{write_jsonl, StageManifest};

use super::{load_lexicon, make_backend, open_cache, parallel_map, StrategyArg};

pub struct Args {
    pub model: Option<String>,
    pub strategy: StrategyArg,
    pub seed: Option<u64>,
    pub mock: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn run(loaded: &LoadedConfig, args: &Args) -> CliResult<()> {
    let benchmark = load_benchmark(&loaded.benchmark_path())
        .map_err(|e| CliError::from(e).at_stage("load-benchmark"))?;
    let lexicon = load_lexicon(loaded)?;

    let (model_name, outcomes) = match args.strategy {
        StrategyArg::Random => {
            let seed = args.seed.unwrap_or(loaded.config.seeds.baseline);
            let outcomes: Vec<RecommendOutcome> = benchmark
                .posts
                .iter()
                .map(|post| RecommendOutcome::Ok(random_baseline(&post.id, &lexicon, seed)))
                .collect();
            ("random-baseline".to_string(), outcomes)
        }
        _ => {
            let spec = loaded.recommender_spec(args.model.as_deref())?;
            let backend = make_backend(
                &spec,
                args.mock.as_deref(),
                loaded
                    .recommender_config(args.model.as_deref())
                    .and_then(|m| m.rate_limit_per_sec),
            )?;
            let cache = open_cache(loaded)?;

            let outcomes = parallel_map(
                &benchmark.posts,
                loaded.config.run.concurrency,
                |post| -> CliResult<RecommendOutcome> {
                    let strategy = match args.strategy {
                        StrategyArg::ZeroShot => PromptStrategy::ZeroShot,
                        StrategyArg::FewShot => PromptStrategy::few_shot_default(),
                        StrategyArg::Conditional => PromptStrategy::conditional(
                            Some(post.labels.age),
                            Some(post.labels.gender),
                        )?,
                        StrategyArg::Random => unreachable!("handled above"),
                    };
                    Ok(recommend(
                        &post.id,
                        &post.text,
                        &spec,
                        &strategy,
                        backend.as_ref(),
                        &cache,
                    ))
                },
            )
            .into_iter()
            .collect::<CliResult<Vec<_>>>()
            .map_err(|e| e.at_stage("recommend"))?;

            let (hits, misses) = cache.stats();
            eprintln!("cache: {hits} hits, {misses} misses");
            (spec.model_name.clone(), outcomes)
        }
    };

    let failures = outcomes
        .iter()
        .filter(|o| matches!(o, RecommendOutcome::Failed(_)))
        .count();

    let out_path = args.out.clone().unwrap_or_else(|| {
        loaded.output_dir().join(format!(
            "recommendations_{}_{}.jsonl",
            slug(&model_name),
            args.strategy.tag()
        ))
    });
    let manifest = StageManifest::new(
        "recommend",
        &loaded.digest,
        lexicon.version(),
        loaded.config.seeds,
    )
    .with_model(&model_name)
    .with_strategy(args.strategy.tag());
    write_jsonl(&out_path, &manifest, &outcomes)?;

    println!(
        "{} recommendations written to {} ({} failures)",
        outcomes.len(),
        out_path.display(),
        failures
    );
    Ok(())
}
