//! Result sets and their JSON/CSV serialization.

use std::fmt::Write as _;
use std::path::Path;

use itlab_core::eig::EigenvalueRecord;
use itlab_core::regions::RegionReport;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub command: String,
    pub config_sha256: String,
    pub itlab_version: String,
    pub core_version: String,
    /// Seconds since the Unix epoch; only present when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new(command: &str, config_sha256: &str, with_timestamp: bool) -> Self {
        let timestamp = with_timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Provenance {
            command: command.to_string(),
            config_sha256: config_sha256.to_string(),
            itlab_version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: itlab_core::VERSION.to_string(),
            timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSet {
    pub records: Vec<EigenvalueRecord>,
    #[serde(default)]
    pub region: Option<RegionReport>,
    /// Modes (or whole runs) that failed; the records are partial when nonempty.
    #[serde(default)]
    pub failures: Vec<String>,
    pub provenance: Provenance,
}

impl ResultSet {
    pub fn stable(&self) -> impl Iterator<Item = &EigenvalueRecord> {
        self.records.iter().filter(|r| r.stable)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("result file: {e}")))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_re,lambda_im,residual,mode,mesh_N,stable\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{:e},{},{},{}", r.lambda.re, r.lambda.im, r.residual, r.mode, r.mesh_n, r.stable);
        }
        out
    }

    /// Writes `<stem>.json` and `<stem>.csv` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(), CliError> {
        write_file(&dir.join(format!("{stem}.json")), &self.to_json()?)?;
        write_file(&dir.join(format!("{stem}.csv")), &self.to_csv())
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn sample() -> ResultSet {
        ResultSet {
            records: vec![EigenvalueRecord {
                lambda: Complex64::new(8.125, -0.5),
                residual: 1.5e-14,
                mode: 2,
                mesh_n: 30,
                stable: true,
                multiplicity: 1,
            }],
            region: None,
            failures: vec![],
            provenance: Provenance::new("solve", "ab", false),
        }
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        assert_eq!(csv, "lambda_re,lambda_im,residual,mode,mesh_N,stable\n8.125,-0.5,1.5e-14,2,30,true\n");
    }

    #[test]
    fn json_roundtrip_without_timestamp() {
        let r = sample();
        let text = r.to_json().unwrap();
        assert!(!text.contains("timestamp"));
        assert_eq!(ResultSet::from_json(&text).unwrap(), r);
        assert!(Provenance::new("solve", "ab", true).timestamp.is_some());
    }

    #[test]
    fn hash() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
