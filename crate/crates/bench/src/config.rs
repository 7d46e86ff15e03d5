//! Experiment configuration: defaults, TOML file, and command-line overrides.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use phaseret::denoise::{
    load_cnn_denoiser, Denoiser, GaussianDenoiser, IdentityDenoiser, MedianDenoiser, TvDenoiser,
};
use phaseret::solvers::Pipeline;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Hio,
    Prdeep,
    PrdeepDc,
    PrdeepL2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Hio, Algorithm::Prdeep, Algorithm::PrdeepDc, Algorithm::PrdeepL2];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Hio => "hio",
            Algorithm::Prdeep => "prdeep",
            Algorithm::PrdeepDc => "prdeep-dc",
            Algorithm::PrdeepL2 => "prdeep-l2",
        }
    }

    /// Row label in the console table.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Hio => "HIO",
            Algorithm::Prdeep => "prDeep",
            Algorithm::PrdeepDc => "prDeep-DC",
            Algorithm::PrdeepL2 => "prDeep-L2",
        }
    }

    pub fn pipeline(self) -> Option<Pipeline> {
        match self {
            Algorithm::Hio => None,
            Algorithm::Prdeep => Some(Pipeline::PrDeep),
            Algorithm::PrdeepDc => Some(Pipeline::PrDeepDc),
            Algorithm::PrdeepL2 => Some(Pipeline::PrDeepL2),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| BenchError::config(format!("unknown algorithm {s:?}")))
    }
}

/// Denoiser selection written as `kind` or `kind:key=value,key=value`, e.g.
/// `tv:weight=2,iters=50` or `cnn:path=weights.bin,sigma=10`.
#[derive(Debug, Clone, PartialEq)]
pub enum DenoiserSpec {
    Identity,
    Tv { weight: f64, iters: usize },
    Median { window: usize },
    Gaussian { std: f64 },
    Cnn { path: PathBuf, sigma: Option<f64> },
}

pub const DEFAULT_TV_WEIGHT: f64 = 2.0;
pub const DEFAULT_TV_ITERS: usize = 50;

impl Default for DenoiserSpec {
    fn default() -> Self {
        DenoiserSpec::Tv {
            weight: DEFAULT_TV_WEIGHT,
            iters: DEFAULT_TV_ITERS,
        }
    }
}

impl DenoiserSpec {
    pub fn build(&self) -> Result<Arc<dyn Denoiser>> {
        Ok(match self {
            DenoiserSpec::Identity => Arc::new(IdentityDenoiser),
            DenoiserSpec::Tv { weight, iters } => Arc::new(TvDenoiser {
                weight: *weight,
                iters: *iters,
            }),
            DenoiserSpec::Median { window } => Arc::new(MedianDenoiser { window: *window }),
            DenoiserSpec::Gaussian { std } => Arc::new(GaussianDenoiser { std: *std }),
            DenoiserSpec::Cnn { path, sigma } => {
                let mut d = load_cnn_denoiser(path)?;
                if let Some(s) = sigma {
                    d.weights.noise_level = Some(*s);
                }
                Arc::new(d)
            }
        })
    }
}

impl fmt::Display for DenoiserSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DenoiserSpec::Identity => write!(f, "identity"),
            DenoiserSpec::Tv { weight, iters } => write!(f, "tv:weight={weight},iters={iters}"),
            DenoiserSpec::Median { window } => write!(f, "median:window={window}"),
            DenoiserSpec::Gaussian { std } => write!(f, "gaussian:std={std}"),
            DenoiserSpec::Cnn { path, sigma: None } => write!(f, "cnn:path={}", path.display()),
            DenoiserSpec::Cnn { path, sigma: Some(s) } => write!(f, "cnn:path={},sigma={s}", path.display()),
        }
    }
}

fn parse_value<T: FromStr>(kind: &str, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| BenchError::config(format!("{kind}: bad value {value:?} for {key}")))
}

impl FromStr for DenoiserSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), p),
            None => (s.trim(), ""),
        };
        let mut pairs = Vec::new();
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| BenchError::config(format!("{kind}: expected key=value, got {item:?}")))?;
            pairs.push((k.trim(), v.trim()));
        }
        let unknown = |key: &str| BenchError::config(format!("{kind}: unknown parameter {key:?}"));
        let mut spec = match kind {
            "identity" => DenoiserSpec::Identity,
            "tv" => DenoiserSpec::default(),
            "median" => DenoiserSpec::Median { window: 3 },
            "gaussian" => DenoiserSpec::Gaussian { std: 1.0 },
            "cnn" => DenoiserSpec::Cnn {
                path: PathBuf::new(),
                sigma: None,
            },
            other => return Err(BenchError::config(format!("unknown denoiser {other:?}"))),
        };
        for (key, value) in pairs {
            match (&mut spec, key) {
                (DenoiserSpec::Tv { weight, .. }, "weight") => *weight = parse_value(kind, key, value)?,
                (DenoiserSpec::Tv { iters, .. }, "iters") => *iters = parse_value(kind, key, value)?,
                (DenoiserSpec::Median { window }, "window") => *window = parse_value(kind, key, value)?,
                (DenoiserSpec::Gaussian { std }, "std") => *std = parse_value(kind, key, value)?,
                (DenoiserSpec::Cnn { path, .. }, "path") => *path = PathBuf::from(value),
                (DenoiserSpec::Cnn { sigma, .. }, "sigma") => *sigma = Some(parse_value(kind, key, value)?),
                _ => return Err(unknown(key)),
            }
        }
        if let DenoiserSpec::Cnn { path, .. } = &spec {
            if path.as_os_str().is_empty() {
                return Err(BenchError::config("cnn: missing path"));
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub algorithms: Vec<Algorithm>,
    pub alphas: Vec<f64>,
    pub denoiser: DenoiserSpec,
    pub lambda: f64,
    /// Step size as a multiple of `1/L`.
    pub tau: f64,
    pub iters: usize,
    pub linesearch: bool,
    /// Master seeds; each one yields an independent noise draw per cell.
    pub seeds: Vec<u64>,
    pub oversampling: f64,
    pub out: PathBuf,
}

pub const DEFAULT_LAMBDA: f64 = phaseret::solvers::DEFAULT_LAMBDA;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: PathBuf::from("data/desk"),
            algorithms: Algorithm::ALL.to_vec(),
            alphas: vec![2.0, 3.0, 4.0],
            denoiser: DenoiserSpec::default(),
            lambda: DEFAULT_LAMBDA,
            tau: 1.0,
            iters: 200,
            linesearch: false,
            seeds: vec![0, 1, 2],
            oversampling: 4.0,
            out: PathBuf::from("results.csv"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(BenchError::config("alphas must be nonempty"));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(BenchError::config(format!("alpha {a} is not ≥ 0")));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::config("at least one algorithm is required"));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::config("seeds must be nonempty"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(BenchError::config(format!("lambda {} is not ≥ 0", self.lambda)));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(BenchError::config(format!("tau {} is not > 0", self.tau)));
        }
        if self.iters == 0 {
            return Err(BenchError::config("iters must be ≥ 1"));
        }
        if !(self.oversampling.is_finite() && self.oversampling >= 1.0) {
            return Err(BenchError::config(format!("oversampling {} is not ≥ 1", self.oversampling)));
        }
        Ok(())
    }

    /// Applies every field set in `overrides` on top of `self`.
    pub fn apply(&mut self, overrides: &ConfigOverrides) -> Result<()> {
        let o = overrides;
        if let Some(v) = &o.dataset {
            self.dataset = v.clone();
        }
        if let Some(v) = &o.algs {
            self.algorithms = parse_list(v)?;
        }
        if let Some(v) = &o.alphas {
            self.alphas = v.clone();
        }
        if let Some(v) = &o.denoiser {
            self.denoiser = v.parse()?;
        }
        if let Some(v) = o.lambda {
            self.lambda = v;
        }
        if let Some(v) = o.tau {
            self.tau = v;
        }
        if let Some(v) = o.iters {
            self.iters = v;
        }
        if let Some(v) = o.linesearch {
            self.linesearch = v;
        }
        if let Some(v) = &o.seeds {
            self.seeds = v.clone();
        }
        if let Some(v) = o.oversampling {
            self.oversampling = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        Ok(())
    }

    /// Defaults, then `file` (if any), then `flags`.
    pub fn resolve(file: Option<&Path>, flags: &ConfigOverrides) -> Result<Self> {
        let mut config = Self::default();
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|source| BenchError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let from_file: ConfigOverrides = toml::from_str(&text)?;
            config.apply(&from_file)?;
        }
        config.apply(flags)?;
        config.validate()?;
        Ok(config)
    }
}

fn parse_list(items: &[String]) -> Result<Vec<Algorithm>> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
        let a: Algorithm = item.parse()?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    Ok(out)
}

/// Optional settings shared by the config file and the command line; keys
/// mirror the flag names.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub dataset: Option<PathBuf>,
    pub algs: Option<Vec<String>>,
    pub alphas: Option<Vec<f64>>,
    pub denoiser: Option<String>,
    pub lambda: Option<f64>,
    pub tau: Option<f64>,
    pub iters: Option<usize>,
    pub linesearch: Option<bool>,
    pub seeds: Option<Vec<u64>>,
    pub oversampling: Option<f64>,
    pub out: Option<PathBuf>,
}
