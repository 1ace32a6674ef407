//! JSON configuration file shared by the CLI and the C API: every flag has
//! an equivalent here, plus the engine constants. Flags override file
//! values; file values override the built-in defaults.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::agents::{archetypes_from_csv_file, DynamicsParams, PropertyWeights, SatisfactionParams};
use crate::behavior::BehaviorThresholds;
use crate::engine::SimulationConfig;
use crate::error::{Error, Result};
use crate::market::Catalog;
use crate::scenarios::Scenario;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub agents: Option<u32>,
    pub runs: Option<u32>,
    pub seed: Option<u64>,
    pub months: Option<u32>,
    pub jobs: Option<u32>,
    pub out_dir: Option<PathBuf>,
    pub thresholds: Option<BehaviorThresholds>,
    pub weights: Option<PropertyWeights>,
    pub dynamics: Option<DynamicsFileConfig>,
    pub archetypes_csv: Option<PathBuf>,
    pub catalog_csv: Option<PathBuf>,
    /// An inline scenario definition, selectable by its id.
    pub scenario: Option<Scenario>,
}

/// Dynamics constants as they appear in config files.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsFileConfig {
    pub experience_rate: f64,
    pub certainty_rate: f64,
    pub experience_blend: f64,
    pub social_scale: f64,
    pub social_sample_size: u32,
    pub unavailable_certainty_penalty: f64,
    pub include_lifetime_property: bool,
}

impl Default for DynamicsFileConfig {
    fn default() -> Self {
        let s = SatisfactionParams::default();
        let d = DynamicsParams::default();
        DynamicsFileConfig {
            experience_rate: d.experience_rate,
            certainty_rate: d.certainty_rate,
            experience_blend: s.experience_blend,
            social_scale: s.social_scale,
            social_sample_size: s.social_sample_size,
            unavailable_certainty_penalty: d.unavailable_certainty_penalty,
            include_lifetime_property: s.include_lifetime,
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config schema: {e}")))
    }

    /// Fold the file values into a simulation config (unset fields keep the
    /// defaults already present in `config`).
    pub fn apply_to(&self, config: &mut SimulationConfig) -> Result<()> {
        if let Some(v) = self.agents {
            config.n_agents = v;
        }
        if let Some(v) = self.runs {
            config.runs = v;
        }
        if let Some(v) = self.seed {
            config.master_seed = v;
        }
        if let Some(v) = self.months {
            config.months = v;
        }
        if let Some(t) = self.thresholds {
            config.thresholds = t;
        }
        if let Some(w) = self.weights {
            config.satisfaction.weights = w;
        }
        if let Some(d) = &self.dynamics {
            config.satisfaction.experience_blend = d.experience_blend;
            config.satisfaction.social_scale = d.social_scale;
            config.satisfaction.social_sample_size = d.social_sample_size;
            config.satisfaction.include_lifetime = d.include_lifetime_property;
            config.dynamics.experience_rate = d.experience_rate;
            config.dynamics.certainty_rate = d.certainty_rate;
            config.dynamics.unavailable_certainty_penalty = d.unavailable_certainty_penalty;
        }
        if let Some(path) = &self.catalog_csv {
            config.catalog = Catalog::from_csv_file(path)?;
        }
        if let Some(path) = &self.archetypes_csv {
            config.archetypes = archetypes_from_csv_file(path)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_changes_nothing() {
        let file = FileConfig::parse("{}").unwrap();
        let mut config = SimulationConfig::default();
        let before_agents = config.n_agents;
        file.apply_to(&mut config).unwrap();
        assert_eq!(config.n_agents, before_agents);
    }

    #[test]
    fn fields_override_defaults() {
        let file = FileConfig::parse(
            r#"{"agents": 77, "seed": 9, "dynamics": {"experience_blend": 0.2}}"#,
        )
        .unwrap();
        let mut config = SimulationConfig::default();
        file.apply_to(&mut config).unwrap();
        assert_eq!(config.n_agents, 77);
        assert_eq!(config.master_seed, 9);
        assert_eq!(config.satisfaction.experience_blend, 0.2);
        // Untouched dynamics fields keep their defaults.
        assert_eq!(config.dynamics.experience_rate, 0.2);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(FileConfig::parse(r#"{"agent": 5}"#).is_err());
    }
}
