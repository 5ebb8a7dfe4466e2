//! Experiment configuration: a TOML file, overridable from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stochsource_core::campaign::DEFAULT_BLOCK_SIZE;
use stochsource_core::{
    find_source, truncation_order, CampaignConfig, CampaignSource, LameParams, Model, TestSource,
};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Acoustic,
    Elastic,
}

impl From<ModelName> for Model {
    fn from(m: ModelName) -> Self {
        match m {
            ModelName::Acoustic => Model::Acoustic,
            ModelName::Elastic => Model::Elastic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lame {
    pub lambda: f64,
    pub mu: f64,
}

impl Default for Lame {
    fn default() -> Self {
        Self { lambda: 1.0, mu: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: ModelName,
    /// Side length `a` of the square domain.
    pub side: f64,
    pub delta: f64,
    pub realizations: u64,
    pub mesh: usize,
    /// Truncation order; derived from `delta` when absent.
    pub order: Option<u32>,
    pub lambda0: f64,
    pub xi0: f64,
    pub k0: f64,
    pub omega0: f64,
    pub lame: Lame,
    /// Registry source name; defaults to the model name.
    pub source: Option<String>,
    pub seed: u64,
    pub workers: usize,
    pub block_size: u64,
    pub zero_direction: [f64; 2],
    pub output: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelName::Acoustic,
            side: 1.0,
            delta: 0.05,
            realizations: 10_000,
            mesh: 64,
            order: None,
            lambda0: 1e-3,
            xi0: 1e-3,
            k0: 1.0,
            omega0: 1e-3,
            lame: Lame::default(),
            source: None,
            seed: 1,
            workers: 1,
            block_size: DEFAULT_BLOCK_SIZE,
            zero_direction: [1.0, 0.0],
            output: PathBuf::from("out"),
        }
    }
}

/// Command-line values that replace file values when present.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub model: Option<ModelName>,
    #[arg(long)]
    pub side: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, short = 'R')]
    pub realizations: Option<u64>,
    #[arg(long)]
    pub mesh: Option<usize>,
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long)]
    pub xi0: Option<f64>,
    #[arg(long)]
    pub k0: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub lame_lambda: Option<f64>,
    #[arg(long)]
    pub lame_mu: Option<f64>,
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long, env = "STOCHSOURCE_SEED")]
    pub seed: Option<u64>,
    #[arg(long, short = 'j')]
    pub workers: Option<usize>,
    #[arg(long)]
    pub block_size: Option<u64>,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

macro_rules! replace {
    ($dst:expr, $src:expr) => {
        if let Some(v) = $src.clone() {
            $dst = v;
        }
    };
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        replace!(self.model, o.model);
        replace!(self.side, o.side);
        replace!(self.delta, o.delta);
        replace!(self.realizations, o.realizations);
        replace!(self.mesh, o.mesh);
        replace!(self.lambda0, o.lambda0);
        replace!(self.xi0, o.xi0);
        replace!(self.k0, o.k0);
        replace!(self.omega0, o.omega0);
        replace!(self.lame.lambda, o.lame_lambda);
        replace!(self.lame.mu, o.lame_mu);
        replace!(self.seed, o.seed);
        replace!(self.workers, o.workers);
        replace!(self.block_size, o.block_size);
        replace!(self.output, o.output);
        if o.order.is_some() {
            self.order = o.order;
        }
        if o.source.is_some() {
            self.source = o.source.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("side", self.side),
            ("lambda0", self.lambda0),
            ("xi0", self.xi0),
            ("k0", self.k0),
            ("omega0", self.omega0),
            ("lame.mu", self.lame.mu),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("`{name}` must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::Config(format!("`delta` must lie in [0, 1), got {}", self.delta)));
        }
        for (name, v) in [("realizations", self.realizations), ("block_size", self.block_size)] {
            if v == 0 {
                return Err(Error::Config(format!("`{name}` must be positive")));
            }
        }
        if self.mesh < 2 {
            return Err(Error::Config(format!("`mesh` must be at least 2, got {}", self.mesh)));
        }
        if self.workers == 0 {
            return Err(Error::Config("`workers` must be positive".into()));
        }
        if self.order == Some(0) {
            return Err(Error::Config("`order` must be positive".into()));
        }
        LameParams::new(self.lame.lambda, self.lame.mu)?;
        let src = self.test_source()?;
        if Model::from(self.model) != src.model {
            return Err(Error::Config(format!("source `{}` is a {} source", src.name, src.model)));
        }
        Ok(())
    }

    pub fn source_name(&self) -> &str {
        self.source.as_deref().unwrap_or(match self.model {
            ModelName::Acoustic => "acoustic",
            ModelName::Elastic => "elastic",
        })
    }

    pub fn test_source(&self) -> Result<TestSource> {
        let name = self.source_name();
        find_source(name).ok_or_else(|| Error::Config(format!("unknown source `{name}`")))
    }

    pub fn resolved_order(&self) -> Result<u32> {
        match self.order {
            Some(n) => Ok(n),
            None => Ok(truncation_order(self.delta)?),
        }
    }

    /// Campaign settings for the noise levels `deltas`.
    pub fn campaign(&self, deltas: &[f64]) -> Result<(CampaignConfig, CampaignSource)> {
        self.validate()?;
        let model = Model::from(self.model);
        let (offset, baseline) = match model {
            Model::Acoustic => (self.lambda0, self.k0),
            Model::Elastic => (self.xi0, self.omega0),
        };
        let cfg = CampaignConfig {
            model,
            side: self.side,
            noise_levels: deltas.to_vec(),
            realizations: self.realizations,
            mesh: self.mesh,
            order: self.resolved_order()?,
            zero_mode_offset: offset,
            baseline,
            lame: LameParams::new(self.lame.lambda, self.lame.mu)?,
            zero_direction: self.zero_direction,
            seed: self.seed,
            block_size: self.block_size,
            source: self.source_name().to_string(),
        };
        Ok((cfg, self.test_source()?.campaign_source()))
    }

    /// SHA-256 of the settings that determine output bytes; `workers` and
    /// `output` are excluded.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.workers = 1;
        canonical.output = PathBuf::new();
        canonical.source = Some(self.source_name().to_string());
        let json = serde_json::to_vec(&canonical).expect("configuration serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}
