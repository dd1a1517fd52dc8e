//! Output files. Every file starts with the resolved configuration: as
//! `# ` comment lines in CSV, as a `config` member in JSON, and as a
//! `config` field on each line of a records file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::{Error, Result};

pub const OUT_ENV: &str = "WFPO_OUT";

/// Output directory: the explicit flag, then the config's `output.dir`,
/// then `$WFPO_OUT`, then `out`.
pub fn resolve_out_dir(flag: Option<&Path>, cfg: &RunConfig, env: Option<&str>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Where a transfer value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Second-order ACF formula with bare-Hamiltonian field-free dynamics.
    Unitary,
    /// Second-order ACF formula with the Lindblad field-free propagator.
    Lgks,
    /// Integral of the field against the dipole coherence of a full run.
    Coherence,
    /// Final population of a full run.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodRecord {
    pub method: Method,
    pub delta_n: f64,
    pub delta_e: Option<f64>,
    pub params: serde_json::Value,
}

pub struct OutputDir {
    root: PathBuf,
    config: RunConfig,
}

impl OutputDir {
    pub fn create(root: PathBuf, config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(&root).map_err(|source| io_err(&root, source))?;
        Ok(Self {
            root,
            config: config.clone(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn write(&self, name: &str, content: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, content).map_err(|source| io_err(&path, source))?;
        Ok(path)
    }

    /// CSV with the configuration as a comment header; values as
    /// `{:.16e}`.
    pub fn write_csv<R>(&self, name: &str, columns: &[&str], rows: R) -> Result<PathBuf>
    where
        R: IntoIterator,
        R::Item: AsRef<[f64]>,
    {
        let mut s = config_comment(&self.config);
        s.push_str(&columns.join(","));
        s.push('\n');
        for row in rows {
            let row = row.as_ref();
            if row.len() != columns.len() {
                return Err(Error::Serialize(format!(
                    "{name}: row has {} values for {} columns",
                    row.len(),
                    columns.len()
                )));
            }
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{v:.16e}");
            }
            s.push('\n');
        }
        self.write(name, &s)
    }

    /// `{"config": ..., "result": ...}`, pretty-printed.
    pub fn write_json<T: Serialize>(&self, name: &str, result: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            config: &'a RunConfig,
            result: &'a T,
        }
        let mut s = serde_json::to_string_pretty(&Doc {
            config: &self.config,
            result,
        })
        .map_err(|e| Error::Serialize(e.to_string()))?;
        s.push('\n');
        self.write(name, &s)
    }

    /// One JSON object per line in `<subcommand>_records.jsonl`; the file
    /// holds the records of the latest run only.
    pub fn write_records(&self, subcommand: &str, records: &[MethodRecord]) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Line<'a> {
            #[serde(flatten)]
            record: &'a MethodRecord,
            config: &'a RunConfig,
        }
        let mut s = String::new();
        for record in records {
            let line = serde_json::to_string(&Line {
                record,
                config: &self.config,
            })
            .map_err(|e| Error::Serialize(e.to_string()))?;
            s.push_str(&line);
            s.push('\n');
        }
        self.write(&format!("{subcommand}_records.jsonl"), &s)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn config_comment(cfg: &RunConfig) -> String {
    let mut s = format!("# wfpo {}\n", env!("CARGO_PKG_VERSION"));
    for line in cfg.to_toml().lines() {
        if line.is_empty() {
            s.push_str("#\n");
        } else {
            let _ = writeln!(s, "# {line}");
        }
    }
    s
}
