//! Manifest files: one diagram path per line, optionally followed by an
//! integer class label. Paths are resolved relative to the manifest's
//! directory so a dataset directory stays relocatable.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use persistence_fisher::diagram::{load_diagram_file, EssentialPolicy, PersistenceDiagram};

#[derive(Clone, Debug)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: Option<i32>,
}

pub fn read_manifest(manifest: &Path) -> Result<Vec<ManifestEntry>> {
    let text = std::fs::read_to_string(manifest)
        .with_context(|| format!("reading manifest {}", manifest.display()))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let path = tokens.next().expect("non-empty line");
        let label = match tokens.next() {
            Some(tok) => Some(
                tok.parse::<i32>()
                    .with_context(|| format!("manifest line {}: invalid label `{tok}`", idx + 1))?,
            ),
            None => None,
        };
        if tokens.next().is_some() {
            bail!("manifest line {}: too many fields", idx + 1);
        }
        entries.push(ManifestEntry {
            path: base.join(path),
            label,
        });
    }
    if entries.is_empty() {
        bail!("manifest {} lists no diagrams", manifest.display());
    }
    Ok(entries)
}

/// Loads every manifest entry as a diagram under the given policy.
pub fn load_diagrams(
    entries: &[ManifestEntry],
    policy: EssentialPolicy,
) -> Result<Vec<PersistenceDiagram>> {
    entries
        .iter()
        .map(|e| {
            load_diagram_file(&e.path, policy)
                .with_context(|| format!("loading diagram {}", e.path.display()))
        })
        .collect()
}

/// Labels for every entry; fails if any entry lacks one.
pub fn require_labels(entries: &[ManifestEntry]) -> Result<Vec<i32>> {
    entries
        .iter()
        .map(|e| {
            e.label
                .with_context(|| format!("manifest entry {} has no label", e.path.display()))
        })
        .collect()
}

pub fn entry_ids(entries: &[ManifestEntry]) -> Vec<String> {
    entries
        .iter()
        .map(|e| e.path.display().to_string())
        .collect()
}
