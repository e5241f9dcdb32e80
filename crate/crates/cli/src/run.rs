//! Output directory, artifact bookkeeping and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

pub const OUT_ENV: &str = "ISOREARR_OUT";
const DEFAULT_OUT: &str = "isorearr-out";

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub seeds: Vec<u64>,
    pub status: String,
    pub error: Option<String>,
    pub verdicts: Vec<Verdict>,
    pub timings: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
}

pub struct Run {
    dir: PathBuf,
    start: Instant,
    pub timestamp: Option<String>,
    pub seeds: Vec<u64>,
    pub verdicts: Vec<Verdict>,
    pub timings: BTreeMap<String, f64>,
    pub artifacts: Vec<String>,
}

/// Flag, then the environment, then the config file, then the default.
pub fn output_dir(flag: Option<PathBuf>, config: Option<String>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .or_else(|| config.map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

impl Run {
    pub fn new(dir: PathBuf, timestamp: bool) -> Self {
        let timestamp = timestamp.then(|| {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            format!("unix time {secs}")
        });
        Run {
            dir,
            start: Instant::now(),
            timestamp,
            seeds: Vec::new(),
            verdicts: Vec::new(),
            timings: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating {}", self.dir.display()))?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn verdict(&mut self, check: impl Into<String>, pass: bool) {
        self.verdicts.push(Verdict {
            check: check.into(),
            pass,
        });
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Writes `manifest.json` and returns the process exit code.
    pub fn finish(
        mut self,
        command: &str,
        config: BTreeMap<String, String>,
        outcome: Result<()>,
    ) -> i32 {
        self.timings
            .insert("total_seconds".into(), self.start.elapsed().as_secs_f64());
        let (status, error, code) = match &outcome {
            Err(e) => ("error", Some(format!("{e:#}")), 2),
            Ok(()) if self.passed() => ("pass", None, 0),
            Ok(()) => ("fail", None, 1),
        };
        let manifest = RunManifest {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            seeds: self.seeds.clone(),
            status: status.into(),
            error: error.clone(),
            verdicts: std::mem::take(&mut self.verdicts),
            timings: std::mem::take(&mut self.timings),
            artifacts: std::mem::take(&mut self.artifacts),
        };
        let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        let written = std::fs::create_dir_all(&self.dir)
            .and_then(|_| std::fs::write(self.dir.join("manifest.json"), body + "\n"));
        if let Err(e) = written {
            eprintln!(
                "error: cannot write manifest in {}: {e}",
                self.dir.display()
            );
            return 2;
        }
        if let Some(e) = error {
            eprintln!("error: {e}");
        }
        for v in &manifest.verdicts {
            println!("{} {}", if v.pass { "PASS" } else { "FAIL" }, v.check);
        }
        println!("{status}: artifacts in {}", self.dir.display());
        code
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_status_follows_verdicts() {
        let tmp = std::env::temp_dir().join(format!("isorearr-run-{}", std::process::id()));
        let mut ok = Run::new(tmp.clone(), false);
        ok.verdict("a", true);
        assert_eq!(ok.finish("x", BTreeMap::new(), Ok(())), 0);
        let mut bad = Run::new(tmp.clone(), false);
        bad.verdict("a", true);
        bad.verdict("b", false);
        assert_eq!(bad.finish("x", BTreeMap::new(), Ok(())), 1);
        let text = std::fs::read_to_string(tmp.join("manifest.json")).unwrap();
        assert!(text.contains("\"status\": \"fail\""));
        let err = Run::new(tmp.clone(), false);
        assert_eq!(
            err.finish("x", BTreeMap::new(), Err(anyhow::anyhow!("boom"))),
            2
        );
        std::fs::remove_dir_all(&tmp).unwrap();
    }
}
