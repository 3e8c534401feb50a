//! Run configuration shared by every pipeline stage.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::align::FilterConfig;
use crate::baselines::LexRankConfig;
use crate::rouge::RougeConfig;
use crate::segment::RuleTokenizer;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("`seed` is required for sampling; set it in the config or pass --seed")]
    MissingSeed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub languages: Vec<String>,
    pub filters: FilterConfig,
    pub parallel_k: usize,
    pub valid_fraction: f64,
    pub seed: Option<u64>,
    pub lexrank: LexRankConfig,
    pub budget: usize,
    pub rouge: RougeConfig,
    /// Also emit the same-language `X-X` pair sets.
    pub monolingual: bool,
    /// Extra abbreviation files, `<dir>/<lang>.txt`.
    pub abbreviations_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            languages: ["en", "de", "fr", "cs"].map(String::from).to_vec(),
            filters: FilterConfig::default(),
            parallel_k: 7000,
            valid_fraction: 0.05,
            seed: None,
            lexrank: LexRankConfig::default(),
            budget: 600,
            rouge: RougeConfig::default(),
            monolingual: false,
            abbreviations_dir: None,
        }
    }
}

/// Every key a config file may set, with a one-line description.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("languages", "language codes, default [\"en\", \"de\", \"fr\", \"cs\"]"),
    ("filters.min_body_tokens", "minimum body tokens, default 250"),
    ("filters.max_body_tokens", "maximum body tokens, default 5000"),
    ("filters.min_lead_tokens", "minimum lead tokens, default 20"),
    ("filters.max_lead_tokens", "maximum lead tokens, default 400"),
    ("parallel_k", "clusters sampled into the parallel subset, default 7000"),
    (
        "valid_fraction",
        "share of comparable clusters sent to valid, default 0.05",
    ),
    ("seed", "sampling seed, no default"),
    ("lexrank.damping", "default 0.85"),
    ("lexrank.epsilon", "L1 convergence threshold, default 1e-6"),
    ("lexrank.max_iter", "default 100"),
    ("budget", "paragraph extraction budget in tokens, default 600"),
    ("rouge.lowercase", "fold case before matching, default true"),
    ("rouge.mode", "ROUGE-L mode, summary-union (default) or sequence"),
    ("monolingual", "also build X-X pair sets, default false"),
    ("abbreviations_dir", "directory of extra <lang>.txt abbreviation lists"),
];

/// Help text listing the given config keys.
pub fn describe_keys(keys: &[&str]) -> String {
    if keys.is_empty() {
        return "Config keys read: none\n".to_string();
    }
    let mut out = String::from("Config keys read:\n");
    for key in keys {
        let matching = CONFIG_KEYS
            .iter()
            .filter(|(k, _)| k == key || k.strip_prefix(key).is_some_and(|rest| rest.starts_with('.')));
        for (k, desc) in matching {
            out.push_str(&format!("  {k:<26} {desc}\n"));
        }
    }
    out
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.languages.is_empty() {
            return Err(ConfigError::Invalid("languages is empty".into()));
        }
        let mut seen = self.languages.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.languages.len() {
            return Err(ConfigError::Invalid("languages has duplicates".into()));
        }
        self.filters
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.valid_fraction > 0.0 && self.valid_fraction < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "valid_fraction must be in (0, 1), got {}",
                self.valid_fraction
            )));
        }
        if self.budget == 0 {
            return Err(ConfigError::Invalid("budget must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.lexrank.damping) || self.lexrank.epsilon <= 0.0 {
            return Err(ConfigError::Invalid(
                "lexrank damping must be in [0, 1) and epsilon positive".into(),
            ));
        }
        Ok(())
    }

    pub fn require_seed(&self) -> Result<u64, ConfigError> {
        self.seed.ok_or(ConfigError::MissingSeed)
    }

    /// sha256 over the canonical serialization, defaults filled in.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// Built-in tokenizer extended with `abbreviations_dir`, if set.
    pub fn tokenizer(&self) -> Result<RuleTokenizer, ConfigError> {
        let mut tok = RuleTokenizer::default();
        if let Some(dir) = &self.abbreviations_dir {
            for lang in &self.languages {
                let path = dir.join(format!("{lang}.txt"));
                if path.exists() {
                    tok.load_abbreviation_file(lang, &path)
                        .map_err(|source| ConfigError::Io { path, source })?;
                }
            }
        }
        Ok(tok)
    }
}
