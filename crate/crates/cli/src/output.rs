// src/output.rs
//
// Artifact emission. Every experiment produces its artifacts in memory;
// this module writes them under the output directory and records each one
// in manifest.json with its relative path and SHA-256 content hash, so a
// rerun can be compared byte for byte. A directory that already holds a
// manifest is refused unless --force is given, and a run that fails
// mid-stream still leaves a manifest covering whatever was written.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

pub struct Artifact {
    pub rel_path: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(rel_path: &str, content: String) -> Artifact {
        Artifact {
            rel_path: rel_path.to_string(),
            bytes: content.into_bytes(),
        }
    }

    /// Pretty-printed JSON with a trailing newline; key order follows the
    /// struct declaration, so reruns are byte-identical.
    pub fn json<T: Serialize>(rel_path: &str, value: &T) -> Result<Artifact, CliError> {
        let mut content = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Numerical(format!("cannot serialize {rel_path}: {e}")))?;
        content.push('\n');
        Ok(Artifact::text(rel_path, content))
    }
}

/// A CSV table built row by row; floats are written in shortest
/// round-trip form, so the file carries full precision.
pub struct Csv {
    content: String,
}

impl Csv {
    pub fn new(header: &str) -> Csv {
        Csv {
            content: format!("{header}\n"),
        }
    }

    pub fn row(&mut self, cells: &[CsvCell]) {
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.content.push(',');
            }
            match cell {
                CsvCell::Int(v) => write!(self.content, "{v}").unwrap(),
                CsvCell::Float(v) => write!(self.content, "{v}").unwrap(),
                CsvCell::Str(v) => write!(self.content, "{v}").unwrap(),
            }
        }
        self.content.push('\n');
    }

    pub fn artifact(self, rel_path: &str) -> Artifact {
        Artifact::text(rel_path, self.content)
    }
}

pub enum CsvCell<'a> {
    Int(i64),
    Float(f64),
    Str(&'a str),
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

#[derive(Serialize)]
struct ManifestEntry {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    artifacts: Vec<ManifestEntry>,
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| CliError::Io(format!("cannot serialize manifest: {e}")))?;
    text.push('\n');
    std::fs::write(&path, text)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Write the artifacts plus manifest.json into `dir`. On an IO failure the
/// manifest still lists every artifact written before the failure, with
/// the error recorded, and the original failure is returned.
pub fn emit_outputs(
    experiment: &str,
    seed: u64,
    run_error: Option<&str>,
    artifacts: &[Artifact],
    dir: &Path,
    force: bool,
) -> Result<(), CliError> {
    let manifest_path = dir.join("manifest.json");
    if manifest_path.exists() && !force {
        return Err(CliError::Io(format!(
            "{} already exists; pass --force to overwrite the previous run",
            manifest_path.display()
        )));
    }
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;

    let mut entries = Vec::new();
    let mut failure: Option<CliError> = None;
    for artifact in artifacts {
        let path = dir.join(&artifact.rel_path);
        if let Err(e) = std::fs::write(&path, &artifact.bytes) {
            failure = Some(CliError::Io(format!(
                "cannot write {}: {e}",
                path.display()
            )));
            break;
        }
        entries.push(ManifestEntry {
            path: artifact.rel_path.clone(),
            sha256: sha256_hex(&artifact.bytes),
        });
    }

    let io_message = failure.as_ref().map(|e| e.to_string());
    let manifest = Manifest {
        experiment,
        seed,
        error: io_message.as_deref().or(run_error),
        artifacts: entries,
    };
    write_manifest(dir, &manifest)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_artifact_list_yields_a_manifest_with_zero_entries() {
        let dir = tempfile::tempdir().unwrap();
        emit_outputs("profile", 7, None, &[], dir.path(), false).unwrap();
        let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["experiment"], "profile");
        assert_eq!(value["seed"], 7);
        assert_eq!(value["artifacts"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn rerun_into_the_same_directory_is_refused_without_force() {
        let dir = tempfile::tempdir().unwrap();
        let artifacts = [Artifact::text("a.csv", "x\n1\n".into())];
        emit_outputs("profile", 0, None, &artifacts, dir.path(), false).unwrap();
        let err = emit_outputs("profile", 0, None, &artifacts, dir.path(), false).unwrap_err();
        assert!(matches!(err, CliError::Io(_)));
        emit_outputs("profile", 0, None, &artifacts, dir.path(), true).unwrap();
    }

    #[test]
    fn manifest_hash_matches_the_file_content() {
        let dir = tempfile::tempdir().unwrap();
        let artifacts = [Artifact::text("table.csv", "t,g\n0,0.5\n".into())];
        emit_outputs("profile", 0, None, &artifacts, dir.path(), false).unwrap();
        let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        let written = std::fs::read(dir.path().join("table.csv")).unwrap();
        assert_eq!(
            value["artifacts"][0]["sha256"].as_str().unwrap(),
            sha256_hex(&written)
        );
    }

    #[test]
    fn csv_rows_join_cells_with_commas() {
        let mut csv = Csv::new("iter,energy,label");
        csv.row(&[CsvCell::Int(3), CsvCell::Float(0.5), CsvCell::Str("ok")]);
        let artifact = csv.artifact("t.csv");
        assert_eq!(
            String::from_utf8(artifact.bytes).unwrap(),
            "iter,energy,label\n3,0.5,ok\n"
        );
    }
}
