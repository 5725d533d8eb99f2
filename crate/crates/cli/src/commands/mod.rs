//! Subcommand implementations. Stages communicate only via files so every
//! intermediate is inspectable and independently re-runnable.

pub mod build_benchmark;
pub mod judge;
pub mod recommend;
pub mod score;
pub mod sensitivity;

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, Context};
use clap::ValueEnum;

use sempres_core::emoji::EmojiLexicon;
use sempres_core::gateway::{ChatBackend, HttpBackend, MockBackend, ModelSpec, ResponseCache};

use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    ZeroShot,
    FewShot,
    Conditional,
    Random,
}

impl StrategyArg {
    pub fn tag(self) -> &'static str {
        match self {
            StrategyArg::ZeroShot => "zero_shot",
            StrategyArg::FewShot => "few_shot",
            StrategyArg::Conditional => "conditional",
            StrategyArg::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Original,
    Recommended,
}

pub(crate) fn load_lexicon(loaded: &LoadedConfig) -> CliResult<EmojiLexicon> {
    EmojiLexicon::load(&loaded.lexicon_path()).map_err(CliError::from)
}

pub(crate) fn open_cache(loaded: &LoadedConfig) -> CliResult<ResponseCache> {
    ResponseCache::open(loaded.cache_dir())
        .with_context(|| format!("opening cache {}", loaded.cache_dir().display()))
        .map_err(CliError::Data)
}

/// Scripted mock when a fixture is given, HTTP otherwise. API keys come from
/// `SEMPRES_API_KEY_<PROVIDER>`.
pub(crate) fn make_backend(
    spec: &ModelSpec,
    mock: Option<&Path>,
    rate_limit_per_sec: Option<f64>,
) -> CliResult<Box<dyn ChatBackend>> {
    match mock {
        Some(path) => MockBackend::from_file(path)
            .map(|b| Box::new(b) as Box<dyn ChatBackend>)
            .with_context(|| format!("loading mock fixture {}", path.display()))
            .map_err(CliError::Config),
        None => {
            spec.validate().map_err(CliError::config)?;
            let api_key = std::env::var(spec.api_key_env_var()).ok();
            let mut backend = HttpBackend::new(&spec.endpoint, api_key);
            if let Some(rate) = rate_limit_per_sec.filter(|r| *r > 0.0) {
                backend = backend.with_rate_limit(rate, rate.max(1.0));
            }
            Ok(Box::new(backend))
        }
    }
}

/// Timestamp for manifests: pinned to the epoch under a mock backend so
/// repeated runs produce identical bytes.
pub(crate) fn created_at(mock: bool) -> String {
    if mock {
        "1970-01-01T00:00:00Z".to_string()
    } else {
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    }
}

/// Applies `f` to every item with up to `workers` threads, returning results
/// in input order.
pub(crate) fn parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let mut initial: Vec<Option<R>> = Vec::with_capacity(items.len());
    initial.resize_with(items.len(), || None);
    let slots = Mutex::new(initial);
    let next = AtomicUsize::new(0);
    let workers = workers.clamp(1, items.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= items.len() {
                    break;
                }
                let result = f(&items[i]);
                slots.lock().unwrap()[i] = Some(result);
            });
        }
    });

    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("worker filled every slot"))
        .collect()
}

/// Missing input files are data errors that name the path.
pub(crate) fn require_file(path: &Path, what: &str) -> CliResult<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::data(anyhow!(
            "{what} file {} does not exist",
            path.display()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<usize> = (0..100).collect();
        let out = parallel_map(&items, 7, |&i| i * 2);
        assert_eq!(out, (0..100).map(|i| i * 2).collect::<Vec<_>>());
    }

    #[test]
    fn created_at_is_pinned_under_mock() {
        assert_eq!(created_at(true), "1970-01-01T00:00:00Z");
        assert_ne!(created_at(false), "1970-01-01T00:00:00Z");
    }
}
