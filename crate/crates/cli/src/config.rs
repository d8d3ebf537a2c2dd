//! Pipeline configuration: a TOML file supplies defaults, command-line
//! flags override individual values, and `DASMINE_STORE` overrides the
//! store path.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub store: PathBuf,
    pub journals: Option<PathBuf>,
    pub taxonomy: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub window_years: u32,
    pub prep: PrepSection,
    pub seeds: SeedSection,
    pub svm: SvmSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrepSection {
    pub stopword_filter: bool,
    pub stemming: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedSection {
    pub split: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvmSection {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            store: PathBuf::from("store"),
            journals: None,
            taxonomy: None,
            labels: None,
            rules: None,
            stopwords: None,
            window_years: 3,
            prep: PrepSection::default(),
            seeds: SeedSection::default(),
            svm: SvmSection::default(),
        }
    }
}

impl Default for PrepSection {
    fn default() -> Self {
        PrepSection { stopword_filter: false, stemming: true }
    }
}

impl Default for SeedSection {
    fn default() -> Self {
        SeedSection { split: 42 }
    }
}

impl Default for SvmSection {
    fn default() -> Self {
        SvmSection { lambda: 1e-4, epochs: 100, seed: 42 }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: PipelineConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(config)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Referenced files must exist before a command starts.
    pub fn check_referenced_files(&self) -> Result<()> {
        for (name, path) in [
            ("journals", &self.journals),
            ("taxonomy", &self.taxonomy),
            ("labels", &self.labels),
            ("rules", &self.rules),
            ("stopwords", &self.stopwords),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    bail!("configured {name} file does not exist: {}", p.display());
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrips_losslessly() {
        let config = PipelineConfig {
            journals: Some(PathBuf::from("fixtures/journals.csv")),
            window_years: 5,
            svm: SvmSection { lambda: 5e-4, ..PipelineConfig::default().svm },
            ..Default::default()
        };
        let text = config.to_toml();
        let parsed: PipelineConfig = toml::from_str(&text).unwrap();
        assert_eq!(parsed, config);
        assert_eq!(parsed.to_toml(), text);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = "store = \"s\"\nwindow_years = 3\nbogus = 1\n[prep]\nstopword_filter = false\nstemming = true\n[seeds]\nsplit = 1\n[svm]\nlambda = 0.1\nepochs = 2\nseed = 3\n";
        assert!(toml::from_str::<PipelineConfig>(text).is_err());
    }

    #[test]
    fn partial_config_gets_documented_defaults() {
        let config: PipelineConfig = toml::from_str("window_years = 5\n").unwrap();
        assert_eq!(config.window_years, 5);
        assert_eq!(config.store, PathBuf::from("store"));
        assert!(config.prep.stemming, "stemming defaults on");
        assert!(!config.prep.stopword_filter, "stop-word filter defaults off");
        assert_eq!(config.seeds.split, 42);
        assert_eq!(config.svm.epochs, 100);
    }
}
