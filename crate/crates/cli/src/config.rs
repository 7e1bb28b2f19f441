//! Run configuration, read from TOML.
//!
//! Every table and key is optional; omitted values take the defaults shown.
//!
//! ```toml
//! [density]
//! horizons = [1024, 4096, 16384, 65536]
//! k_max = 15
//!
//! [badness]
//! epsilon = "1/3"
//! stages = 3
//! delta = "1/10"
//! m_max = 1099511627776
//! t_max = 16777216
//! n_max = 1099511627776
//!
//! [probe]
//! horizon = 4194304
//! a_bound = 2
//! min_blocks = 3
//! image_threshold = "1/4"
//! input_threshold = "1/32"
//! confirm_cost = false
//!
//! [onto]
//! k_max = 14
//!
//! [pipeline]
//! set_horizon = 1048576
//! image_horizon = 1024
//! n_out = 4096
//! k_max = 14
//! e_max = 16
//! max_intervals = 8
//! search_horizon = 131072
//! target = "x*x+1"
//! target_horizon = 50
//!
//! [monoid]
//! horizon = 2000
//! branch_cap = 256
//!
//! [generate]
//! n_out = 4096
//! search_horizon = 256
//! horizon = 50
//! ```
//!
//! Command-line flags override the file.

use std::path::Path;

use densclone::ideal::{ProbeConfig, SearchHorizons};
use densclone::precomplete::PipelineConfig;
use densclone::Rat;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub density: DensityConfig,
    pub badness: BadnessConfig,
    pub probe: ProbeSection,
    pub onto: OntoConfig,
    pub pipeline: PipelineConfig,
    pub monoid: MonoidConfig,
    pub generate: GenerateConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub horizons: Vec<u64>,
    pub k_max: u32,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { horizons: vec![1 << 10, 1 << 12, 1 << 14, 1 << 16], k_max: 15 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BadnessConfig {
    pub epsilon: Rat,
    pub stages: u32,
    pub delta: Rat,
    pub m_max: u64,
    pub t_max: u64,
    pub n_max: u64,
}

impl Default for BadnessConfig {
    fn default() -> Self {
        let h = SearchHorizons::default();
        BadnessConfig { epsilon: Rat::new(1, 3), stages: 3, delta: Rat::new(1, 10), m_max: h.m_max, t_max: h.t_max, n_max: h.n_max }
    }
}

impl BadnessConfig {
    pub fn horizons(&self) -> SearchHorizons {
        SearchHorizons { m_max: self.m_max, t_max: self.t_max, n_max: self.n_max }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSection {
    pub horizon: u64,
    pub a_bound: u64,
    pub min_blocks: usize,
    pub image_threshold: Rat,
    pub input_threshold: Rat,
    /// Required before any image over three or more coordinates is computed.
    pub confirm_cost: bool,
}

impl Default for ProbeSection {
    fn default() -> Self {
        let p = ProbeConfig::default();
        ProbeSection {
            horizon: p.horizon,
            a_bound: p.a_bound,
            min_blocks: p.min_blocks,
            image_threshold: p.image_threshold,
            input_threshold: p.input_threshold,
            confirm_cost: false,
        }
    }
}

impl ProbeSection {
    pub fn probe_config(&self) -> ProbeConfig {
        ProbeConfig {
            horizon: self.horizon,
            a_bound: self.a_bound,
            min_blocks: self.min_blocks,
            image_threshold: self.image_threshold.clone(),
            input_threshold: self.input_threshold.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OntoConfig {
    pub k_max: u32,
}

impl Default for OntoConfig {
    fn default() -> Self {
        OntoConfig { k_max: 14 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonoidConfig {
    pub horizon: u64,
    pub branch_cap: usize,
}

impl Default for MonoidConfig {
    fn default() -> Self {
        MonoidConfig { horizon: 2000, branch_cap: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    pub n_out: u64,
    pub search_horizon: u64,
    pub horizon: u64,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig { n_out: 1 << 12, search_horizon: 256, horizon: 50 }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Horizons must be positive and the rationals strictly positive.
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("density.k_max", self.density.k_max as u64),
            ("badness.m_max", self.badness.m_max),
            ("badness.t_max", self.badness.t_max),
            ("badness.n_max", self.badness.n_max),
            ("probe.horizon", self.probe.horizon),
            ("onto.k_max", self.onto.k_max as u64),
            ("pipeline.set_horizon", self.pipeline.set_horizon),
            ("pipeline.image_horizon", self.pipeline.image_horizon),
            ("pipeline.n_out", self.pipeline.n_out),
            ("pipeline.search_horizon", self.pipeline.search_horizon),
            ("monoid.horizon", self.monoid.horizon),
            ("generate.n_out", self.generate.n_out),
            ("generate.search_horizon", self.generate.search_horizon),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(format!("{name} must be positive"));
        }
        if self.density.horizons.is_empty() || self.density.horizons.contains(&0) {
            return Err("density.horizons must be a nonempty list of positive values".into());
        }
        for (name, r) in [("badness.epsilon", &self.badness.epsilon), ("badness.delta", &self.badness.delta)] {
            if !r.is_positive() {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}
