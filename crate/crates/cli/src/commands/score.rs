//! `score`: joins the benchmark, recommendations, and both judged files into
//! the full evaluation report.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};

use sempres_core::dataset::{load_benchmark, BenchmarkPost};
use sempres_core::gateway::RecommendOutcome;
use sempres_core::judge::{JudgeVerdict, LabelSet};
use sempres_core::metrics::{compile_report, human_comparison, HumanComparisonRow, PostEvaluation, ScoreReport};

use crate::config::{slug, LoadedConfig};
use crate::error::{CliError, CliResult};
use crate::manifest::{read_jsonl, JudgeRow, StageManifest};

use super::{require_file, StrategyArg};

pub struct Args {
    pub model: Option<String>,
    pub strategy: StrategyArg,
    pub recommendations: Option<PathBuf>,
    pub judged_original: Option<PathBuf>,
    pub judged_recommended: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub out_prefix: Option<String>,
}

/// The persisted JSON report: manifest first, then the metrics.
#[derive(Debug, Serialize, Deserialize)]
struct ScoreFile {
    manifest: StageManifest,
    report: ScoreReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    human_comparison: Option<Vec<HumanComparisonRow>>,
}

#[derive(Debug, Deserialize)]
struct AnnotationRow {
    post_id: String,
    score: f64,
}

pub fn run(loaded: &LoadedConfig, args: &Args) -> CliResult<()> {
    let benchmark = load_benchmark(&loaded.benchmark_path())
        .map_err(|e| CliError::from(e).at_stage("load-benchmark"))?;

    let rec_path = args.recommendations.clone().unwrap_or_else(|| {
        super::judge::default_recommendations_path(loaded, args.model.as_deref(), args.strategy)
    });
    require_file(&rec_path, "recommendations")?;
    let (rec_manifest, outcomes): (serde_json::Value, Vec<RecommendOutcome>) =
        read_jsonl(&rec_path)?;
    let model = rec_manifest["model"].as_str().unwrap_or("model").to_string();
    let strategy = rec_manifest["strategy"].as_str().unwrap_or("strategy").to_string();

    let judged_original = args
        .judged_original
        .clone()
        .unwrap_or_else(|| loaded.output_dir().join("judged_original.jsonl"));
    let judged_recommended = args.judged_recommended.clone().unwrap_or_else(|| {
        loaded
            .output_dir()
            .join(format!("judged_{}_{}.jsonl", slug(&model), strategy))
    });
    require_file(&judged_original, "judged-original")?;
    require_file(&judged_recommended, "judged-recommended")?;
    let (_, original_rows): (serde_json::Value, Vec<JudgeRow>) = read_jsonl(&judged_original)?;
    let (_, recommended_rows): (serde_json::Value, Vec<JudgeRow>) =
        read_jsonl(&judged_recommended)?;

    let posts = assemble(&benchmark.posts, &outcomes, &original_rows, &recommended_rows)?;

    let report = compile_report(
        &posts,
        &model,
        &strategy,
        loaded.config.run.normalization,
        loaded.config.run.top_k,
    )?;

    let human = match &args.annotations {
        Some(path) => {
            require_file(path, "annotations")?;
            let pairs = read_annotations(path)?;
            Some(human_comparison(&report.matching_pairs, &pairs)?)
        }
        None => None,
    };

    let manifest = StageManifest::new(
        "score",
        &loaded.digest,
        &benchmark.manifest.lexicon_version,
        loaded.config.seeds,
    )
    .with_model(&model)
    .with_strategy(&strategy);

    let prefix = args
        .out_prefix
        .clone()
        .unwrap_or_else(|| format!("score_{}_{}", slug(&model), strategy));
    let out_dir = loaded.output_dir();
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(CliError::Data)?;

    let file = ScoreFile {
        manifest: manifest.clone(),
        report,
        human_comparison: human,
    };

    let json_path = out_dir.join(format!("{prefix}.json"));
    write_text(&json_path, &serde_json::to_string_pretty(&file).expect("report serializes"))?;

    let mut text = format!("# manifest: {}\n", manifest.to_line());
    text.push_str(&file.report.render_text());
    if let Some(rows) = &file.human_comparison {
        text.push_str("human comparison (matching pairs, count, downstream, human):\n");
        for row in rows {
            let human_score = row
                .mean_human_score
                .map(|s| format!("{s:.3}"))
                .unwrap_or_else(|| "-".to_string());
            text.push_str(&format!(
                "  {}  {:>5}  {:.1}  {}\n",
                row.matching_pairs, row.count, row.downstream_score, human_score
            ));
        }
    }
    let text_path = out_dir.join(format!("{prefix}.txt"));
    write_text(&text_path, &text)?;

    let histogram_csv = format!("# manifest: {}\n{}", manifest.to_line(), file.report.histogram_csv());
    write_text(&out_dir.join(format!("{prefix}_histogram.csv")), &histogram_csv)?;
    let top_csv = format!("# manifest: {}\n{}", manifest.to_line(), file.report.top_emojis_csv());
    write_text(&out_dir.join(format!("{prefix}_top_emojis.csv")), &top_csv)?;

    print!("{}", file.report.render_text());
    println!("score report written to {}", json_path.display());
    Ok(())
}

/// Joins the four inputs per post id, verifying the id sets line up.
fn assemble(
    posts: &[BenchmarkPost],
    outcomes: &[RecommendOutcome],
    original_rows: &[JudgeRow],
    recommended_rows: &[JudgeRow],
) -> CliResult<Vec<PostEvaluation>> {
    let benchmark_ids: BTreeSet<&str> = posts.iter().map(|p| p.id.as_str()).collect();
    let outcome_ids: BTreeSet<&str> = outcomes.iter().map(|o| o.post_id()).collect();
    check_ids("recommendations", &benchmark_ids, &outcome_ids)?;

    let outcomes_by_id: HashMap<&str, &RecommendOutcome> =
        outcomes.iter().map(|o| (o.post_id(), o)).collect();
    let original_labels = labels_by_post(original_rows);
    let recommended_labels = labels_by_post(recommended_rows);

    let judged_original_ids: BTreeSet<&str> =
        original_labels.keys().map(String::as_str).collect();
    check_ids("judged-original", &benchmark_ids, &judged_original_ids)?;

    let ok_rec_ids: BTreeSet<&str> = outcomes
        .iter()
        .filter_map(|o| o.as_ok().map(|r| r.post_id.as_str()))
        .collect();
    let judged_recommended_ids: BTreeSet<&str> =
        recommended_labels.keys().map(String::as_str).collect();
    check_ids("judged-recommended", &ok_rec_ids, &judged_recommended_ids)?;

    Ok(posts
        .iter()
        .map(|post| {
            let outcome = outcomes_by_id[post.id.as_str()];
            PostEvaluation {
                post_id: post.id.clone(),
                truth_emojis: post.emojis.clone(),
                recommendation: outcome.as_ok().cloned(),
                original_labels: original_labels.get(&post.id).copied().flatten(),
                recommended_labels: recommended_labels.get(&post.id).copied().flatten(),
            }
        })
        .collect())
}

/// Rebuilds one `LabelSet` per post from its judge rows; posts with any
/// INVALID verdict map to `None`.
fn labels_by_post(rows: &[JudgeRow]) -> HashMap<String, Option<LabelSet>> {
    let mut by_post: HashMap<String, Vec<JudgeVerdict>> = HashMap::new();
    for row in rows {
        let unanimous = row.votes.windows(2).all(|w| w[0] == w[1]);
        by_post.entry(row.post_id.clone()).or_default().push(JudgeVerdict {
            task: row.task,
            label: row.label.clone(),
            votes: row.votes.clone(),
            unanimous,
        });
    }
    by_post
        .into_iter()
        .map(|(id, verdicts)| (id, LabelSet::from_verdicts(&verdicts)))
        .collect()
}

/// Annotations come from annotators, not from a pipeline stage: plain JSONL
/// of `{post_id, score}`, comments and a manifest line tolerated.
fn read_annotations(path: &Path) -> CliResult<Vec<(String, f64)>> {
    let content = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Data)?;
    let mut pairs = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Ok(value) = serde_json::from_str::<serde_json::Value>(line) {
            if value.get("type").and_then(|t| t.as_str()) == Some("manifest") {
                continue;
            }
        }
        let row: AnnotationRow = serde_json::from_str(line)
            .with_context(|| format!("{} line {}", path.display(), idx + 1))
            .map_err(CliError::Data)?;
        pairs.push((row.post_id, row.score));
    }
    Ok(pairs)
}

fn check_ids(
    what: &str,
    expected: &BTreeSet<&str>,
    found: &BTreeSet<&str>,
) -> CliResult<()> {
    let missing: Vec<&&str> = expected.difference(found).collect();
    let extra: Vec<&&str> = found.difference(expected).collect();
    if missing.is_empty() && extra.is_empty() {
        return Ok(());
    }
    let mut message = format!("{what} post ids do not match the benchmark:");
    if !missing.is_empty() {
        message.push_str(&format!(" missing {missing:?}"));
    }
    if !extra.is_empty() {
        message.push_str(&format!(" unexpected {extra:?}"));
    }
    Err(CliError::data(anyhow!(message)))
}

fn write_text(path: &Path, content: &str) -> CliResult<()> {
    std::fs::write(path, content)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Data)
}
