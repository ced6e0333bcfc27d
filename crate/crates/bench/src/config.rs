//! Experiment configuration files (TOML).

use std::path::Path;

use anyhow::{bail, Context, Result};
use gaussgrid::field::FieldKindName;
use gaussgrid::{CountStrategy, FieldExpansion, NodeFamily, Profit};
use serde::{Deserialize, Serialize};

use crate::functions::{default_suite, NamedFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Quad,
    Interp,
    Pde,
    Bnt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Smolyak,
    APriori,
    APosteriori,
    /// Both the a-priori and the a-posteriori construction.
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    /// `kl`, `lc` or `haar`.
    pub kind: String,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    /// Sine terms behind each `haar` basis function.
    #[serde(default = "default_series")]
    pub series: usize,
}

fn default_q() -> f64 {
    1.0
}
fn default_sigma() -> f64 {
    3.0
}
fn default_truncation() -> usize {
    1000
}
fn default_series() -> usize {
    4096
}

impl FieldSpec {
    pub fn expansion(&self) -> Result<FieldExpansion> {
        Ok(match self.kind.parse::<FieldKindName>()? {
            FieldKindName::Kl => FieldExpansion::karhunen_loeve(self.q, self.sigma, self.truncation),
            FieldKindName::Lc => FieldExpansion::levy_ciesielski(self.sigma, self.truncation),
            FieldKindName::Haar => FieldExpansion::haar_chalf(self.q, self.series, self.sigma, self.truncation),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_families")]
    pub families: Vec<String>,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    /// Largest Smolyak level swept.
    #[serde(default = "default_w_max")]
    pub w_max: usize,
    /// Smolyak sweeps stop once a grid would exceed this many points.
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    /// Model evaluations allowed to the adaptive constructions.
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_buffer")]
    pub buffer: usize,
    /// `error` or `error-per-work`.
    #[serde(default = "default_profit")]
    pub profit: String,
    /// Ratio between consecutive error checkpoints of adaptive runs.
    #[serde(default = "default_checkpoint_ratio")]
    pub checkpoint_ratio: f64,
    #[serde(default = "default_probe_samples")]
    pub probe_samples: usize,
    #[serde(default = "default_probe_seed")]
    pub probe_seed: u64,
}

fn default_families() -> Vec<String> {
    vec!["gh".into(), "leja".into(), "gk".into()]
}
fn default_strategy() -> Strategy {
    Strategy::Smolyak
}
fn default_w_max() -> usize {
    8
}
fn default_max_points() -> usize {
    20_000
}
fn default_budget() -> usize {
    2000
}
fn default_buffer() -> usize {
    5
}
fn default_profit() -> String {
    "error".into()
}
fn default_checkpoint_ratio() -> f64 {
    1.25
}
fn default_probe_samples() -> usize {
    200
}
fn default_probe_seed() -> u64 {
    0x5eed
}

impl Default for GridSpec {
    fn default() -> Self {
        toml::from_str("").expect("every grid field has a default")
    }
}

impl GridSpec {
    pub fn families(&self) -> Result<Vec<NodeFamily>> {
        self.families.iter().map(|f| Ok(f.parse::<NodeFamily>()?)).collect()
    }

    pub fn profit(&self) -> Result<Profit> {
        match self.profit.as_str() {
            "error" => Ok(Profit::Error),
            "error-per-work" | "error_per_work" => Ok(Profit::ErrorPerWork),
            other => bail!("unknown profit {other:?}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    /// `K`; defaults depend on the experiment.
    pub batches: Option<usize>,
    /// `P` per batch, or the number of reference solves for PDE runs.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeSpec {
    #[serde(default = "default_mesh")]
    pub mesh_n: usize,
    #[serde(default = "default_rhs")]
    pub rhs: f64,
}

fn default_mesh() -> usize {
    256
}
fn default_rhs() -> f64 {
    1.0
}

impl Default for PdeSpec {
    fn default() -> Self {
        Self {
            mesh_n: default_mesh(),
            rhs: default_rhs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Parameter count of the scalar sweeps.
    #[serde(default = "default_dims")]
    pub dims: usize,
    /// `incremental`, `combitec`, or absent for both.
    #[serde(default)]
    pub count: Option<String>,
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default)]
    pub pde: PdeSpec,
    #[serde(default, rename = "function")]
    pub functions: Vec<NamedFunction>,
}

fn default_dims() -> usize {
    1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).context("parsing experiment config")?;
        if cfg.functions.is_empty() {
            cfg.functions = default_suite();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims == 0 {
            bail!("dims must be positive");
        }
        if self.grid.budget == 0 || self.grid.buffer == 0 || self.grid.max_points == 0 {
            bail!("budget, buffer and max_points must be positive");
        }
        if self.grid.checkpoint_ratio <= 1.0 {
            bail!("checkpoint_ratio must exceed 1");
        }
        if self.mc.batches == Some(0) || self.mc.samples == Some(0) {
            bail!("Monte Carlo batch and sample counts must be positive");
        }
        if self.pde.mesh_n < 2 {
            bail!("mesh_n must be at least 2");
        }
        if matches!(self.experiment, ExperimentKind::Pde | ExperimentKind::Bnt) && self.field.is_none() {
            bail!("PDE experiments need a [field] section");
        }
        self.grid.families()?;
        self.grid.profit()?;
        self.count_strategy()?;
        if let Some(f) = &self.field {
            f.expansion()?;
        }
        Ok(())
    }

    pub fn count_strategy(&self) -> Result<Option<CountStrategy>> {
        Ok(match &self.count {
            None => None,
            Some(s) => Some(s.parse()?),
        })
    }

    /// The seed, which every randomized experiment must have.
    pub fn seed(&self) -> Result<u64> {
        self.mc
            .seed
            .context("this experiment is randomized: set mc.seed or pass --seed")
    }

    /// `K` and `P` for the interpolation sweeps.
    pub fn mc_shape(&self) -> (usize, usize) {
        let (k, p) = if self.dims == 1 { (30, 100) } else { (50, 500) };
        (self.mc.batches.unwrap_or(k), self.mc.samples.unwrap_or(p))
    }

    /// One line of JSON echoing the whole configuration.
    pub fn comment_line(&self) -> String {
        format!("# config {}", serde_json::to_string(self).expect("config serializes"))
    }
}
