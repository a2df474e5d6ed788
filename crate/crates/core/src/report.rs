//! Output formatting: 17-significant-digit floats, CSV, JSON reports and a
//! deterministic manifest of everything written.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::verify::Check;

/// Round-trippable float: 17 significant digits in scientific notation.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|&x| fmt(x)).collect::<Vec<_>>().join(",")
}

/// Option as a CSV cell, empty when absent.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub eos: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn new(eos: String, seed: u64, checks: Vec<Check>) -> Self {
        Self {
            command: "verify",
            eos,
            seed,
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub config: BTreeMap<String, String>,
    pub pass: bool,
    pub files: Vec<FileEntry>,
}

/// Collects output files in `dir` and records them for the manifest.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(contents.as_bytes());
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: contents.len(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        Ok(())
    }

    pub fn write_json<T: serde::Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    /// Write `manifest.json` listing every file written so far.
    pub fn finish(self, command: &str, seed: Option<u64>, config: &BTreeMap<String, String>, pass: bool) -> Result<PathBuf> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config: config.clone(),
            pass,
            files: self.files,
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
        assert_eq!(csv_row(&[1.0, 2.0]), "1.0000000000000000e0,2.0000000000000000e0");
    }

    #[test]
    fn manifest_is_deterministic() {
        let run = || {
            let d = tempfile::tempdir().unwrap();
            let mut o = OutputDir::create(d.path()).unwrap();
            o.write("a.csv", "x\n1\n").unwrap();
            let p = o.finish("test", Some(3), &BTreeMap::new(), true).unwrap();
            std::fs::read_to_string(p).unwrap()
        };
        let a = run();
        assert_eq!(a, run());
        assert!(a.contains("\"sha256\""));
    }
}
