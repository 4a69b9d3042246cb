use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use deteval::report::{DatasetFingerprint, RunManifest, TOOL_VERSION};
use sha2::{Digest, Sha256};

/// Hash over the sorted `.txt` files of `dir`: each file contributes its
/// name and contents, both length-prefixed.
pub fn fingerprint(role: &str, dir: &Path) -> Result<DatasetFingerprint> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "txt"))
        .collect();
    files.sort();

    let mut hasher = Sha256::new();
    let mut total_bytes = 0u64;
    for path in &files {
        let name = path.file_name().unwrap_or_default().to_string_lossy();
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        hasher.update((name.len() as u64).to_le_bytes());
        hasher.update(name.as_bytes());
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
        total_bytes += bytes.len() as u64;
    }
    Ok(DatasetFingerprint {
        role: role.to_string(),
        path: dir.display().to_string(),
        file_count: files.len(),
        total_bytes,
        sha256: hex::encode(hasher.finalize()),
    })
}

pub fn manifest(
    argv: &[String],
    datasets: Vec<DatasetFingerprint>,
    threads: usize,
    wall_time_seconds: f64,
) -> RunManifest {
    RunManifest {
        command_line: argv.to_vec(),
        datasets,
        tool_version: TOOL_VERSION.to_string(),
        threads,
        wall_time_seconds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprint_tracks_content_and_ignores_other_files() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("000001.txt"), "a").unwrap();
        fs::write(dir.path().join("000000.txt"), "bc").unwrap();
        let a = fingerprint("labels", dir.path()).unwrap();
        assert_eq!((a.file_count, a.total_bytes), (2, 3));
        fs::write(dir.path().join("README"), "x").unwrap();
        assert_eq!(fingerprint("labels", dir.path()).unwrap().sha256, a.sha256);
        fs::write(dir.path().join("000001.txt"), "b").unwrap();
        assert_ne!(fingerprint("labels", dir.path()).unwrap().sha256, a.sha256);
    }
}
