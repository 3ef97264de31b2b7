//! JSON run configuration and command-line flags.
//!
//! Flags override the matching fields of the config file, which override the
//! built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use scalemix::dist::MixingFamily;
use scalemix::gsm::{GsmConfig, MarginSpec};
use scalemix::mixed::MixedConfig;
use scalemix::sim::TruthSpec;
use scalemix::EdgePriorWeights;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CENTERING: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    FitContinuous,
    FitMixed,
    Simulate,
    Evaluate,
    DiagnoseTails,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::FitContinuous => "fit-continuous",
            Mode::FitMixed => "fit-mixed",
            Mode::Simulate => "simulate",
            Mode::Evaluate => "evaluate",
            Mode::DiagnoseTails => "diagnose-tails",
        }
    }
}

#[derive(Parser, Debug, Clone, Default)]
#[command(name = "scalemix", version, about = "Graph structure learning for non-normal and mixed data")]
pub struct Args {
    /// Workflow to run.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Input CSV (header row, numeric cells).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Total sweeps per chain, burn-in included [default: 10000].
    #[arg(long)]
    pub iters: Option<usize>,
    /// Sweeps discarded from the start of each chain [default: 4000].
    #[arg(long)]
    pub burnin: Option<usize>,
    /// Base RNG seed [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Independent chains, seeded `seed, seed + 1, ...`, pooled after burn-in.
    #[arg(long)]
    pub chains: Option<usize>,
    /// Edge-probability threshold for sign classification and `edges.txt` [default: 0.5].
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Directory for output files, created if missing [default: out].
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Centre and scale continuous columns to mean 0, s.d. 1.
    #[arg(long)]
    pub standardize: bool,
    /// True precision CSV for evaluation.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Discrete,
    Continuous,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Skew {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    /// Mixing law of a continuous column; Gaussian when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixing: Option<MixingFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skew: Option<Skew>,
    /// Shift applied to a discrete column before modelling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centering: Option<f64>,
}

impl ColumnSchema {
    pub fn continuous(name: impl Into<String>) -> Self {
        ColumnSchema {
            name: name.into(),
            kind: ColumnKind::Continuous,
            mixing: None,
            skew: None,
            centering: None,
        }
    }

    pub fn discrete(name: impl Into<String>) -> Self {
        ColumnSchema {
            kind: ColumnKind::Discrete,
            ..Self::continuous(name)
        }
    }

    pub fn margin(&self) -> MarginSpec {
        let skew = self.skew.unwrap_or_default();
        MarginSpec {
            mixing: self.mixing.unwrap_or(MixingFamily::Degenerate),
            skew_alpha: skew.alpha,
            skew_beta: skew.beta,
        }
    }

    pub fn centering(&self) -> f64 {
        self.centering.unwrap_or(DEFAULT_CENTERING)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GsmSettings {
    pub b: f64,
    pub rho: f64,
    pub edge_weight: f64,
    /// Defaults to the number of variables.
    pub graph_moves_per_sweep: Option<usize>,
    pub scale_step: f64,
    pub sample_precision: bool,
    pub drift_check_every: usize,
}

impl Default for GsmSettings {
    fn default() -> Self {
        GsmSettings {
            b: 10.0,
            rho: 0.5,
            edge_weight: 0.1,
            graph_moves_per_sweep: None,
            scale_step: 0.5,
            sample_precision: true,
            drift_check_every: 1000,
        }
    }
}

impl GsmSettings {
    pub fn build(&self, margins: Vec<MarginSpec>, iters: usize, burnin: usize, seed: u64) -> CliResult<GsmConfig> {
        let q = margins.len();
        let mut c = GsmConfig::new(margins, iters, burnin, seed)?;
        c.b = self.b;
        c.rho = self.rho;
        c.edge_weights = EdgePriorWeights::uniform(q, self.edge_weight)?;
        if let Some(m) = self.graph_moves_per_sweep {
            c.graph_moves_per_sweep = m;
        }
        c.scale_step = self.scale_step;
        c.sample_precision = self.sample_precision;
        c.drift_check_every = self.drift_check_every;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixedSettings {
    pub alpha: f64,
    pub beta: f64,
    pub slab_prob: f64,
    pub pg_shape: u32,
    pub omega_step: f64,
    pub theta_step: f64,
    pub slab_step: f64,
    pub drift_check_every: usize,
}

impl Default for MixedSettings {
    fn default() -> Self {
        let d = MixedConfig::new(1, 0, 0);
        MixedSettings {
            alpha: d.alpha,
            beta: d.beta,
            slab_prob: d.slab_prob,
            pg_shape: d.pg_shape,
            omega_step: d.omega_step,
            theta_step: d.theta_step,
            slab_step: d.slab_step,
            drift_check_every: d.drift_check_every,
        }
    }
}

impl MixedSettings {
    pub fn build(&self, iters: usize, burnin: usize, seed: u64) -> CliResult<MixedConfig> {
        let c = MixedConfig {
            alpha: self.alpha,
            beta: self.beta,
            slab_prob: self.slab_prob,
            pg_shape: self.pg_shape,
            iters,
            burnin,
            seed,
            omega_step: self.omega_step,
            theta_step: self.theta_step,
            slab_step: self.slab_step,
            drift_check_every: self.drift_check_every,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimModel {
    Gsm,
    Mixed,
}

/// Ready-made simulation designs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimPreset {
    /// 100 rows, 50 banded variables, exponential and inverse gamma margins.
    Continuous,
    /// 100 rows, 9 discrete and 41 continuous variables with a −0.7 block.
    Mixed,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSettings {
    pub preset: Option<SimPreset>,
    pub model: Option<SimModel>,
    pub n: Option<usize>,
    pub truth: Option<TruthSpec>,
    /// Generator margins (continuous model), one per variable.
    pub margins: Option<Vec<MarginSpec>>,
    pub num_discrete: Option<usize>,
    pub pg_shape: Option<u32>,
}

/// A fully resolved simulation request.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationPlan {
    pub model: SimModel,
    pub n: usize,
    pub truth: TruthSpec,
    pub margins: Vec<MarginSpec>,
    pub num_discrete: usize,
    pub pg_shape: u32,
}

impl SimulateSettings {
    pub fn resolve(&self) -> CliResult<SimulationPlan> {
        use scalemix::sim::designs;
        let (model, n, truth, margins, num_discrete) = match self.preset {
            Some(SimPreset::Continuous) => (
                Some(SimModel::Gsm),
                Some(designs::DESIGN_ROWS),
                Some(designs::continuous_truth()),
                Some(designs::continuous_generator_margins()),
                None,
            ),
            Some(SimPreset::Mixed) => (
                Some(SimModel::Mixed),
                Some(designs::DESIGN_ROWS),
                Some(designs::mixed_truth()),
                None,
                Some(designs::MIXED_NUM_DISCRETE),
            ),
            None => (None, None, None, None, None),
        };
        let model = self.model.or(model).unwrap_or(SimModel::Gsm);
        let n = self
            .n
            .or(n)
            .ok_or_else(|| CliError::Config("simulate.n is required".into()))?;
        let truth = self
            .truth
            .clone()
            .or(truth)
            .ok_or_else(|| CliError::Config("simulate.truth is required".into()))?;
        let margins = self
            .margins
            .clone()
            .or(margins)
            .unwrap_or_else(|| vec![MarginSpec::gaussian(); truth.q]);
        if model == SimModel::Gsm && margins.len() != truth.q {
            return Err(CliError::Config(format!(
                "{} margins for {} variables",
                margins.len(),
                truth.q
            )));
        }
        let num_discrete = self.num_discrete.or(num_discrete).unwrap_or(0);
        Ok(SimulationPlan {
            model,
            n,
            truth,
            margins,
            num_discrete,
            pg_shape: self.pg_shape.unwrap_or(1),
        })
    }
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burnin: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardize: Option<bool>,
    /// Column schema; when absent every column is continuous and Gaussian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<ColumnSchema>>,
    #[serde(default)]
    pub gsm: GsmSettings,
    #[serde(default)]
    pub mixed: MixedSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSettings>,
}

impl ConfigFile {
    pub fn new() -> Self {
        ConfigFile {
            schema_version: SCHEMA_VERSION,
            ..Default::default()
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: ConfigFile =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }
}

/// Effective settings after merging flags, config file and defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub data: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub iters: usize,
    pub burnin: usize,
    pub seed: u64,
    pub chains: usize,
    pub threshold: f64,
    pub output_dir: PathBuf,
    pub standardize: bool,
    pub file: ConfigFile,
}

impl RunConfig {
    pub const DEFAULT_ITERS: usize = 10_000;
    pub const DEFAULT_BURNIN: usize = 4_000;
    pub const DEFAULT_SEED: u64 = 1;
    pub const DEFAULT_THRESHOLD: f64 = 0.5;

    pub fn resolve(args: &Args) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::new(),
        };
        Self::from_parts(args, file)
    }

    pub fn from_parts(args: &Args, file: ConfigFile) -> CliResult<Self> {
        let mode = args
            .mode
            .or(file.mode)
            .ok_or_else(|| CliError::Config("no mode given (--mode or config `mode`)".into()))?;
        let cfg = RunConfig {
            mode,
            data: args.data.clone().or_else(|| file.data.clone()),
            truth: args.truth.clone().or_else(|| file.truth.clone()),
            iters: args.iters.or(file.iters).unwrap_or(Self::DEFAULT_ITERS),
            burnin: args.burnin.or(file.burnin).unwrap_or(Self::DEFAULT_BURNIN),
            seed: args.seed.or(file.seed).unwrap_or(Self::DEFAULT_SEED),
            chains: args.chains.or(file.chains).unwrap_or(1),
            threshold: args.threshold.or(file.threshold).unwrap_or(Self::DEFAULT_THRESHOLD),
            output_dir: args
                .output_dir
                .clone()
                .or_else(|| file.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out")),
            standardize: args.standardize || file.standardize.unwrap_or(false),
            file,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if matches!(self.mode, Mode::FitContinuous | Mode::FitMixed) && self.iters <= self.burnin {
            return Err(CliError::Config(format!(
                "iters ({}) must exceed burnin ({})",
                self.iters, self.burnin
            )));
        }
        if self.chains == 0 {
            return Err(CliError::Config("chains must be at least 1".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(CliError::Config(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        Ok(())
    }

    pub fn data_path(&self) -> CliResult<&Path> {
        self.data
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("mode {} needs --data", self.mode.name())))
    }

    /// Seed of chain `k`.
    pub fn chain_seed(&self, k: usize) -> u64 {
        self.seed.wrapping_add(k as u64)
    }
}
