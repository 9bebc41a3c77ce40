//! Run configuration loaded from TOML.
//!
//! ```toml
//! counts = "counts.csv"
//! adjacency = "adjacency.txt"
//! output = "out"
//! scales = [0.0, 1.0, 25.0]
//! alpha = 0.05
//!
//! [sampler]
//! iterations = 110000
//! burn_in = 10000
//! thinning = 10
//! seed = 1
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use areal_decomp::{Hyperparams, ScaleSet};
use serde::Deserialize;

pub const DEFAULT_SCALES: [f64; 3] = [0.0, 1.0, 25.0];

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    counts: Option<PathBuf>,
    adjacency: Option<PathBuf>,
    output: Option<PathBuf>,
    truth: Option<PathBuf>,
    scales: Option<Vec<f64>>,
    alpha: Option<f64>,
    strict_adjacency: Option<bool>,
    dense_oracle: Option<bool>,
    #[serde(default)]
    sampler: SamplerSection,
    grid: Option<GridDims>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplerSection {
    a_u: Option<f64>,
    b_u: Option<f64>,
    a_v: Option<f64>,
    b_v: Option<f64>,
    proposal_sd: Option<f64>,
    iterations: Option<usize>,
    burn_in: Option<usize>,
    thinning: Option<usize>,
    seed: Option<u64>,
}

/// Lattice dimensions for grid-mode precision output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDims {
    pub nrow: usize,
    pub ncol: usize,
}

impl std::str::FromStr for GridDims {
    type Err = String;

    /// Parses `ROWSxCOLS`, e.g. `3x3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (r, c) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("expected ROWSxCOLS, got '{s}'"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad grid dimension '{t}': {e}"))
        };
        Ok(GridDims {
            nrow: parse(r)?,
            ncol: parse(c)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub counts: Option<PathBuf>,
    pub adjacency: Option<PathBuf>,
    pub output: PathBuf,
    pub truth: Option<PathBuf>,
    pub scales: ScaleSet<f64>,
    pub hyper: Hyperparams<f64>,
    pub alpha: f64,
    pub strict_adjacency: bool,
    pub dense_oracle: bool,
    pub grid: Option<GridDims>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            counts: None,
            adjacency: None,
            output: PathBuf::from("output"),
            truth: None,
            scales: ScaleSet::new(DEFAULT_SCALES.to_vec()).expect("valid default scales"),
            hyper: Hyperparams::default(),
            alpha: areal_decomp::credibility::DEFAULT_ALPHA,
            strict_adjacency: false,
            dense_oracle: false,
            grid: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file '{}'", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base).with_context(|| format!("in config file '{}'", path.display()))
    }

    /// Parses TOML text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text)?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let d = RunConfig::default();
        let s = file.sampler;
        let h = d.hyper;
        let hyper = Hyperparams {
            a_u: s.a_u.unwrap_or(h.a_u),
            b_u: s.b_u.unwrap_or(h.b_u),
            a_v: s.a_v.unwrap_or(h.a_v),
            b_v: s.b_v.unwrap_or(h.b_v),
            proposal_sd: s.proposal_sd.unwrap_or(h.proposal_sd),
            iterations: s.iterations.unwrap_or(h.iterations),
            burn_in: s.burn_in.unwrap_or(h.burn_in),
            thinning: s.thinning.unwrap_or(h.thinning),
            seed: s.seed.unwrap_or(h.seed),
        };
        hyper.validate()?;
        let scales = match file.scales {
            Some(v) => ScaleSet::new(v)?,
            None => d.scales,
        };
        let alpha = file.alpha.unwrap_or(d.alpha);
        if !(alpha > 0.0 && alpha < 0.5) {
            bail!("alpha must lie in (0, 0.5), got {alpha}");
        }
        Ok(RunConfig {
            counts: file.counts.map(resolve),
            adjacency: file.adjacency.map(resolve),
            output: resolve(file.output.unwrap_or(d.output)),
            truth: file.truth.map(resolve),
            scales,
            hyper,
            alpha,
            strict_adjacency: file.strict_adjacency.unwrap_or(false),
            dense_oracle: file.dense_oracle.unwrap_or(false),
            grid: file.grid,
        })
    }

    pub fn counts_path(&self) -> Result<&Path> {
        existing("counts", self.counts.as_deref())
    }

    pub fn adjacency_path(&self) -> Result<&Path> {
        existing("adjacency", self.adjacency.as_deref())
    }

    pub fn truth_path(&self) -> Result<Option<&Path>> {
        self.truth
            .as_deref()
            .map(|p| existing("truth", Some(p)))
            .transpose()
    }
}

fn existing<'a>(what: &str, path: Option<&'a Path>) -> Result<&'a Path> {
    let path = path.with_context(|| format!("config does not name a {what} file"))?;
    if !path.is_file() {
        bail!("{what} file '{}' does not exist", path.display());
    }
    Ok(path)
}
