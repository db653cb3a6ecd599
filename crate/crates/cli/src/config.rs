//! JSON experiment configuration: schema, loading, and validation.
//!
//! A config file is a single JSON object whose `experiment` field selects
//! the schema for the rest of the file and must agree with the subcommand.
//! Markets are given either as a catalog name (`"model": "m1"`) or inline
//! (`"model": {"heston": {...}}`) plus explicit `s0`, `r`, `t`, `strike`;
//! row-level fields override catalog defaults.

use std::fmt;
use std::path::Path;

use cospricer_core::cos::OptionKind;
use cospricer_core::models::{MarketContext, ModelSpec};
use cospricer_core::oracles::CarrMadanConfig;
use serde::Deserialize;

use crate::catalog;

/// The eight experiment kinds the binary can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Price,
    Range,
    Density,
    Figure1,
    Figure2,
    Table1,
    Table2,
    Counterexamples,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::Price => "price",
            Self::Range => "range",
            Self::Density => "density",
            Self::Figure1 => "figure1",
            Self::Figure2 => "figure2",
            Self::Table1 => "table1",
            Self::Table2 => "table2",
            Self::Counterexamples => "counterexamples",
        };
        f.write_str(name)
    }
}

/// Parsed configuration file, one variant per experiment.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Config {
    Price(PriceConfig),
    Range(RangeConfig),
    Density(DensityConfig),
    Figure1(Figure1Config),
    Figure2(Figure2Config),
    Table1(Table1Config),
    Table2(Table2Config),
    Counterexamples(CounterexamplesConfig),
}

impl Config {
    pub fn experiment(&self) -> Experiment {
        match self {
            Self::Price(_) => Experiment::Price,
            Self::Range(_) => Experiment::Range,
            Self::Density(_) => Experiment::Density,
            Self::Figure1(_) => Experiment::Figure1,
            Self::Figure2(_) => Experiment::Figure2,
            Self::Table1(_) => Experiment::Table1,
            Self::Table2(_) => Experiment::Table2,
            Self::Counterexamples(_) => Experiment::Counterexamples,
        }
    }
}

/// Anything that stops a config from describing a runnable experiment.
#[derive(Debug)]
pub enum ConfigError {
    Io(std::io::Error),
    Parse(serde_json::Error),
    UnknownModel { name: String },
    MissingField { field: &'static str, context: String },
    BadValue { what: &'static str, detail: String },
    ExperimentMismatch { requested: Experiment, found: Experiment },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(e) => write!(f, "cannot read config: {e}"),
            Self::Parse(e) => write!(f, "cannot parse config: {e}"),
            Self::UnknownModel { name } => {
                write!(f, "unknown model name {name:?}; known: {}", catalog::NAMES.join(", "))
            }
            Self::MissingField { field, context } => write!(f, "missing {field:?}: {context}"),
            Self::BadValue { what, detail } => write!(f, "bad {what}: {detail}"),
            Self::ExperimentMismatch { requested, found } => {
                write!(f, "subcommand {requested} does not match config experiment {found}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<std::io::Error> for ConfigError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        Self::Parse(e)
    }
}

/// Reads and parses a config file; schema errors surface as [`ConfigError`].
pub fn load(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Market description as written in JSON.
#[derive(Clone, Debug, Deserialize)]
pub struct MarketConfig {
    pub model: ModelField,
    #[serde(default)]
    pub s0: Option<f64>,
    #[serde(default)]
    pub r: Option<f64>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub strike: Option<f64>,
    #[serde(default)]
    pub kind: Option<KindField>,
}

/// Either a catalog name or inline model parameters.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ModelField {
    Named(String),
    Inline(InlineModel),
}

/// Inline model parameters, keyed by family.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InlineModel {
    BlackScholes { sigma: f64 },
    Laplace { sigma: f64 },
    Heston { kappa: f64, eta: f64, theta: f64, v0: f64, rho: f64 },
    VarianceGamma { sigma: f64, theta: f64, nu: f64 },
    Cgmy { c: f64, g: f64, m: f64, y: f64 },
    MertonJump { sigma: f64, intensity: f64, mean_jump: f64, jump_vol: f64 },
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindField {
    Put,
    Call,
}

/// A fully resolved market: model, context, contract.
#[derive(Clone, Copy, Debug)]
pub struct Market {
    pub model: ModelSpec,
    pub ctx: MarketContext,
    pub strike: f64,
    pub kind: OptionKind,
}

impl MarketConfig {
    /// Resolves catalog names, applies row-level overrides, validates.
    pub fn resolve(&self) -> Result<Market, ConfigError> {
        let (model, s0, r, t, strike) = match &self.model {
            ModelField::Named(name) => {
                let entry = catalog::resolve(name)
                    .ok_or_else(|| ConfigError::UnknownModel { name: name.clone() })?;
                (
                    entry.model,
                    self.s0.unwrap_or(entry.s0),
                    self.r.unwrap_or(entry.r),
                    self.t.unwrap_or(entry.t),
                    self.strike.unwrap_or(entry.strike),
                )
            }
            ModelField::Inline(inline) => {
                let model = inline.build()?;
                let need = |field: &'static str, v: Option<f64>| {
                    v.ok_or(ConfigError::MissingField {
                        field,
                        context: "inline models need explicit market fields".to_string(),
                    })
                };
                (
                    model,
                    need("s0", self.s0)?,
                    need("r", self.r)?,
                    need("t", self.t)?,
                    need("strike", self.strike)?,
                )
            }
        };
        let ctx = MarketContext::new(s0, r, t).map_err(|e| ConfigError::BadValue {
            what: "market context",
            detail: e.to_string(),
        })?;
        if !(strike > 0.0 && strike.is_finite()) {
            return Err(ConfigError::BadValue {
                what: "strike",
                detail: format!("{strike} is not a positive price"),
            });
        }
        let kind = match self.kind {
            Some(KindField::Put) => OptionKind::Put,
            Some(KindField::Call) | None => OptionKind::Call,
        };
        Ok(Market { model, ctx, strike, kind })
    }
}

impl InlineModel {
    fn build(self) -> Result<ModelSpec, ConfigError> {
        let built = match self {
            Self::BlackScholes { sigma } => ModelSpec::black_scholes(sigma),
            Self::Laplace { sigma } => ModelSpec::laplace(sigma),
            Self::Heston { kappa, eta, theta, v0, rho } => {
                ModelSpec::heston(kappa, eta, theta, v0, rho)
            }
            Self::VarianceGamma { sigma, theta, nu } => {
                ModelSpec::variance_gamma(sigma, theta, nu)
            }
            Self::Cgmy { c, g, m, y } => ModelSpec::cgmy(c, g, m, y),
            Self::MertonJump { sigma, intensity, mean_jump, jump_vol } => {
                ModelSpec::merton_jump(sigma, intensity, mean_jump, jump_vol)
            }
        };
        built.map_err(|e| ConfigError::BadValue { what: "model", detail: e.to_string() })
    }
}

/// Shared rule settings: tolerance plus the order of each window rule.
#[derive(Clone, Copy, Debug, Deserialize)]
pub struct RuleConfig {
    pub epsilon: f64,
    pub n_c: u32,
    pub n_m: u32,
}

impl RuleConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(ConfigError::BadValue {
                what: "epsilon",
                detail: format!("{} is not a positive tolerance", self.epsilon),
            });
        }
        if !matches!(self.n_c, 2 | 4 | 6) {
            return Err(ConfigError::BadValue {
                what: "n_c",
                detail: format!("{} cumulants; the rule is defined for 2, 4 or 6", self.n_c),
            });
        }
        if self.n_m < 2 || self.n_m > 8 || self.n_m % 2 != 0 {
            return Err(ConfigError::BadValue {
                what: "n_m",
                detail: format!("moment order {} outside the even range 2..=8", self.n_m),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct PriceConfig {
    #[serde(flatten)]
    pub market: MarketConfig,
    #[serde(flatten)]
    pub rules: RuleConfig,
    /// Fixed term count; when absent the term count doubles adaptively.
    #[serde(default)]
    pub n: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RangeConfig {
    #[serde(flatten)]
    pub market: MarketConfig,
    #[serde(flatten)]
    pub rules: RuleConfig,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DensityConfig {
    #[serde(flatten)]
    pub market: MarketConfig,
    #[serde(flatten)]
    pub rules: RuleConfig,
    pub n: usize,
    pub grid: GridConfig,
}

/// Evenly spaced evaluation points in centered log-price coordinates.
#[derive(Clone, Copy, Debug, Deserialize)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
}

impl GridConfig {
    pub fn points(&self) -> Result<Vec<f64>, ConfigError> {
        if self.count < 2 || !(self.x_max > self.x_min) {
            return Err(ConfigError::BadValue {
                what: "grid",
                detail: "need x_max > x_min and at least two points".to_string(),
            });
        }
        let step = (self.x_max - self.x_min) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.x_min + step * i as f64).collect())
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct Figure1Config {
    pub sigma: f64,
    pub epsilon: f64,
    /// Supremum of the payoff; 1 studies the bare distributions.
    pub k_bound: f64,
    pub orders: Vec<u32>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Figure2Config {
    pub sigma: f64,
    pub s0: f64,
    pub r: f64,
    pub t: f64,
    pub strike: f64,
    #[serde(default)]
    pub kind: Option<KindField>,
    pub n_c: u32,
    pub n_m: u32,
    pub panel_a_epsilons: Vec<f64>,
    pub panel_b_epsilon: f64,
    /// Manual half-widths as multiples of the maturity-scaled volatility.
    pub panel_b_r_over_sigma: Vec<f64>,
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
    #[serde(default = "default_time_reps")]
    pub time_reps: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Table1Config {
    pub rows: Vec<TableRowConfig>,
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
    #[serde(default = "default_time_reps")]
    pub time_reps: usize,
}

#[derive(Clone, Debug, Deserialize)]
pub struct TableRowConfig {
    /// Row label in the output; defaults to the model name.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub market: MarketConfig,
    #[serde(flatten)]
    pub rules: RuleConfig,
    /// Transcribed reference price; when absent the damped-integral
    /// recomputation drives the search on its own.
    #[serde(default)]
    pub reference: Option<f64>,
    #[serde(default)]
    pub carr_madan: Option<CmField>,
}

/// Overrides for the damped-integral reference when the default Fourier
/// window is too short for a slowly decaying characteristic function.
#[derive(Clone, Copy, Debug, Deserialize)]
pub struct CmField {
    pub alpha: f64,
    pub u_max: f64,
    pub n_points: usize,
}

impl CmField {
    pub fn build(self) -> CarrMadanConfig {
        CarrMadanConfig { alpha: self.alpha, u_max: self.u_max, n_points: self.n_points }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct Table2Config {
    #[serde(flatten)]
    pub market: MarketConfig,
    #[serde(flatten)]
    pub rules: RuleConfig,
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub reference: Option<f64>,
    /// Differences below this threshold are reported as exact zeros.
    #[serde(default = "default_zero_threshold")]
    pub zero_threshold: f64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CounterexamplesConfig {
    #[serde(default = "default_ladder")]
    pub ladder_n_values: Vec<usize>,
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
}

fn default_n_cap() -> usize {
    1_000_000
}

fn default_time_reps() -> usize {
    51
}

fn default_zero_threshold() -> f64 {
    1e-10
}

fn default_ladder() -> Vec<usize> {
    vec![1000, 2000, 4000, 8000]
}
