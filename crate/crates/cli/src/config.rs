//! Run configuration: command-line flags over a TOML config file over
//! built-in defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

/// Largest accepted degree bound unless the config raises it.
pub const DEFAULT_HARD_CAP: u32 = 128;
pub const DEFAULT_MAXDEG: u32 = 40;
pub const CACHE_ENV: &str = "THHFORGE_CACHE";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Csv,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "table" | "text" => OutputFormat::Table,
            "json" => OutputFormat::Json,
            "csv" => OutputFormat::Csv,
            "svg" => OutputFormat::Svg,
            _ => bail!("unknown output format {s:?} (table, json, csv, svg)"),
        })
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Table => "table",
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
        })
    }
}

/// Keys accepted in the config file; every key is optional.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<u32>,
    pub maxdeg: Option<u32>,
    pub spectrum: Option<String>,
    pub target: Option<String>,
    pub presentation: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub cache_dir: Option<PathBuf>,
    pub verify: Option<bool>,
    pub hard_cap: Option<u32>,
    pub jobs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

/// Values given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub p: Option<u32>,
    pub maxdeg: Option<u32>,
    pub spectrum: Option<String>,
    pub target: Option<String>,
    pub presentation: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub cache_dir: Option<PathBuf>,
    pub verify: Option<bool>,
    pub jobs: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub p: u32,
    pub maxdeg: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presentation: Option<PathBuf>,
    pub format: OutputFormat,
    #[serde(skip)]
    pub cache_dir: PathBuf,
    pub verify: bool,
    pub hard_cap: u32,
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 2,
            maxdeg: DEFAULT_MAXDEG,
            spectrum: None,
            target: None,
            presentation: None,
            format: OutputFormat::Table,
            cache_dir: PathBuf::from(".thhforge-cache"),
            verify: false,
            hard_cap: DEFAULT_HARD_CAP,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl RunConfig {
    /// Flags beat the file, the file beats defaults. The cache directory
    /// additionally honours `THHFORGE_CACHE` above the file.
    pub fn resolve(file: &FileConfig, flags: &Overrides, env_cache: Option<PathBuf>) -> anyhow::Result<Self> {
        let d = RunConfig::default();
        let cfg = RunConfig {
            p: flags.p.or(file.p).unwrap_or(d.p),
            maxdeg: flags.maxdeg.or(file.maxdeg).unwrap_or(d.maxdeg),
            spectrum: flags.spectrum.clone().or_else(|| file.spectrum.clone()),
            target: flags.target.clone().or_else(|| file.target.clone()),
            presentation: flags.presentation.clone().or_else(|| file.presentation.clone()),
            format: flags.format.or(file.format).unwrap_or(d.format),
            cache_dir: flags
                .cache_dir
                .clone()
                .or(env_cache)
                .or_else(|| file.cache_dir.clone())
                .unwrap_or(d.cache_dir),
            verify: flags.verify.or(file.verify).unwrap_or(d.verify),
            hard_cap: file.hard_cap.unwrap_or(d.hard_cap),
            jobs: flags.jobs.or(file.jobs).unwrap_or(d.jobs).max(1),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.maxdeg > self.hard_cap {
            bail!("maxdeg {} exceeds the hard cap {}", self.maxdeg, self.hard_cap);
        }
        if !thhforge_core::fplin::is_prime(self.p) {
            bail!("p = {} is not prime", self.p);
        }
        if let Some(path) = &self.presentation {
            if !path.exists() {
                bail!("presentation file {} does not exist", path.display());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = FileConfig::parse("p = 3\nmaxdeg = 60\nformat = \"json\"\ncache_dir = \"/from/file\"").unwrap();
        let flags = Overrides {
            maxdeg: Some(20),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&file, &flags, None).unwrap();
        assert_eq!((cfg.p, cfg.maxdeg, cfg.format), (3, 20, OutputFormat::Json));
        assert_eq!(cfg.cache_dir, PathBuf::from("/from/file"));
        let cfg = RunConfig::resolve(&file, &flags, Some("/env".into())).unwrap();
        assert_eq!(cfg.cache_dir, PathBuf::from("/env"));
        let cfg = RunConfig::resolve(&FileConfig::default(), &Overrides::default(), None).unwrap();
        assert_eq!((cfg.p, cfg.maxdeg), (2, DEFAULT_MAXDEG));
    }

    #[test]
    fn cap_and_unknown_keys() {
        let flags = Overrides {
            maxdeg: Some(500),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&FileConfig::default(), &flags, None).is_err());
        let raised = FileConfig::parse("hard_cap = 600").unwrap();
        assert!(RunConfig::resolve(&raised, &flags, None).is_ok());
        assert!(FileConfig::parse("colour = 1").is_err());
    }
}
