//! `sedx group`: run the recursive grouping and persist the registry.

use std::path::Path;

use sedx_core::grouping::model_recursive;

use crate::config::RunConfig;
use crate::corpus::load_corpus;
use crate::error::{CliError, Result};
use crate::model_file::{RegistryFile, MODEL_FORMAT_VERSION};
use crate::report::KeyValues;

pub fn run(
    corpus_path: &Path,
    config: &RunConfig,
    out: &Path,
    summary: Option<&Path>,
) -> Result<()> {
    let block = config.grouping.as_ref().ok_or_else(|| {
        CliError::Usage("group requires a [grouping] block in the config".into())
    })?;
    let corpus = load_corpus(corpus_path)?;
    let spec = config.seasonal_spec()?;
    let registry = model_recursive(
        &corpus,
        &spec,
        &config.model_config(),
        &config.train_config(),
        config.holdout_spec(),
        &config.grouping_config(block),
    )?;

    let mut kv = KeyValues::new();
    kv.set("entries.count", registry.entries.len());
    kv.set("entries.background", registry.background_count());
    kv.set(
        "entries.fallback",
        registry.entries.len() - registry.background_count(),
    );
    for (i, entry) in registry.entries.iter().enumerate() {
        let kind = if entry.is_background() {
            "background"
        } else {
            "fallback"
        };
        kv.set(format!("entry.{i:03}.kind"), kind);
        kv.set(format!("entry.{i:03}.round"), entry.round);
        kv.set(format!("entry.{i:03}.covered"), entry.covered.join(" "));
    }

    RegistryFile {
        format_version: MODEL_FORMAT_VERSION,
        config: config.clone(),
        registry,
    }
    .save(out)?;

    match summary {
        Some(path) => kv.write(path)?,
        None => print!("{}", kv.render()),
    }
    println!("group: registry written to {}", out.display());
    Ok(())
}
