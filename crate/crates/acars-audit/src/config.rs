//! Run configuration with flags > config file > defaults precedence.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cipher::{DEFAULT_IOC_THRESHOLD, DEFAULT_MIN_LEN};
use crate::ingest::CorpusFormat;

pub const DEFAULT_DEDUP_WINDOW_S: i64 = 30;
pub const KEY_ENV_VAR: &str = "ACARS_AUDIT_KEY";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config line {line}: expected key=value, got {got:?}")]
    Malformed { line: usize, got: String },
    #[error("config key {key:?}: {detail}")]
    BadValue { key: String, detail: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("--{flag}: path {path} does not exist")]
    MissingPath { flag: &'static str, path: String },
    #[error("--{flag}: {detail}")]
    OutOfRange { flag: &'static str, detail: String },
    #[error("no --input given")]
    NoInput,
}

/// Everything a pipeline run needs; field names mirror the CLI flags.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub input_format: CorpusFormat,
    pub registry: Option<PathBuf>,
    pub blocklist: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub ofc_list: Option<PathBuf>,
    pub gazetteer: Option<PathBuf>,
    pub keywords: Option<PathBuf>,
    pub crib_template: Option<PathBuf>,
    pub dedup_window_s: i64,
    pub ioc_threshold: f64,
    pub min_cipher_len: usize,
    pub offshore_threshold: u64,
    pub out: Option<PathBuf>,
    pub out_format: String,
    pub redact_policy: String,
    pub key_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            input_format: CorpusFormat::Jsonl,
            registry: None,
            blocklist: None,
            rules: None,
            ofc_list: None,
            gazetteer: None,
            keywords: None,
            crib_template: None,
            dedup_window_s: DEFAULT_DEDUP_WINDOW_S,
            ioc_threshold: DEFAULT_IOC_THRESHOLD,
            min_cipher_len: DEFAULT_MIN_LEN,
            offshore_threshold: crate::audit::DEFAULT_OFFSHORE_THRESHOLD,
            out: None,
            out_format: "text".to_string(),
            redact_policy: "keep".to_string(),
            key_file: None,
        }
    }
}

impl RunConfig {
    /// Apply one `key=value` pair; keys are the flag names without `--`.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |detail: String| ConfigError::BadValue {
            key: key.to_string(),
            detail,
        };
        match key {
            "input" => self.inputs.push(PathBuf::from(value)),
            "input-format" => {
                self.input_format = match value {
                    "jsonl" => CorpusFormat::Jsonl,
                    "rawlog" => CorpusFormat::Rawlog,
                    other => return Err(bad(format!("unknown format {other:?}"))),
                }
            }
            "registry" => self.registry = Some(PathBuf::from(value)),
            "blocklist" => self.blocklist = Some(PathBuf::from(value)),
            "rules" => self.rules = Some(PathBuf::from(value)),
            "ofc-list" => self.ofc_list = Some(PathBuf::from(value)),
            "gazetteer" => self.gazetteer = Some(PathBuf::from(value)),
            "keywords" => self.keywords = Some(PathBuf::from(value)),
            "crib-template" => self.crib_template = Some(PathBuf::from(value)),
            "dedup-window-s" => {
                self.dedup_window_s = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "ioc-threshold" => {
                self.ioc_threshold = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "min-cipher-len" => {
                self.min_cipher_len = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "offshore-threshold" => {
                self.offshore_threshold = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "out-format" => self.out_format = value.to_string(),
            "redact-policy" => self.redact_policy = value.to_string(),
            "key-file" => self.key_file = Some(PathBuf::from(value)),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Load a flat `key=value` config file (blank lines and `#` comments
    /// allowed) on top of the current values.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line: idx + 1,
                    got: line.to_string(),
                });
            };
            self.apply_kv(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Check path existence and threshold ranges.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.inputs.is_empty() {
            return Err(ConfigError::NoInput);
        }
        let paths: [(&'static str, Option<&PathBuf>); 9] = [
            ("registry", self.registry.as_ref()),
            ("blocklist", self.blocklist.as_ref()),
            ("rules", self.rules.as_ref()),
            ("ofc-list", self.ofc_list.as_ref()),
            ("gazetteer", self.gazetteer.as_ref()),
            ("keywords", self.keywords.as_ref()),
            ("crib-template", self.crib_template.as_ref()),
            ("key-file", self.key_file.as_ref()),
            ("input", self.inputs.first()),
        ];
        for (flag, path) in paths {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(ConfigError::MissingPath {
                        flag,
                        path: p.display().to_string(),
                    });
                }
            }
        }
        for p in &self.inputs {
            if !p.exists() {
                return Err(ConfigError::MissingPath {
                    flag: "input",
                    path: p.display().to_string(),
                });
            }
        }
        if self.dedup_window_s < 0 {
            return Err(ConfigError::OutOfRange {
                flag: "dedup-window-s",
                detail: format!("window must be >= 0, got {}", self.dedup_window_s),
            });
        }
        if !(self.ioc_threshold > 0.0 && self.ioc_threshold < 1.0) {
            return Err(ConfigError::OutOfRange {
                flag: "ioc-threshold",
                detail: format!("threshold must be in (0,1), got {}", self.ioc_threshold),
            });
        }
        Ok(())
    }

    /// Resolve the redaction key: `--key-file` wins over `ACARS_AUDIT_KEY`.
    pub fn redaction_key(&self) -> Result<Option<Vec<u8>>, ConfigError> {
        if let Some(path) = &self.key_file {
            let bytes = std::fs::read(path).map_err(|source| ConfigError::Io {
                path: path.display().to_string(),
                source,
            })?;
            return Ok(Some(bytes));
        }
        Ok(std::env::var(KEY_ENV_VAR).ok().map(String::into_bytes))
    }
}
