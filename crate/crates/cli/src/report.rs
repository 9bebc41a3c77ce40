//! Machine-readable run report and output manifest.

use std::collections::HashMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use areal_decomp::diagnostics::{self, GEWEKE_MIN_LEN};
use areal_decomp::{CountData, PosteriorSamples};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Absolute Geweke z beyond which a monitor is flagged.
pub const GEWEKE_WARN: f64 = 3.0;
/// ESS below which a monitor is flagged.
pub const ESS_WARN: f64 = 100.0;
/// Overall acceptance outside this band is flagged.
pub const ACCEPTANCE_BAND: (f64, f64) = (0.15, 0.7);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub regions: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub samples: usize,
    pub acceptance: Acceptance,
    pub monitors: Vec<Monitor>,
    pub truth_correlation: Option<f64>,
    pub dense_oracle_max_error: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Acceptance {
    pub overall: f64,
    pub per_site: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monitor {
    pub name: String,
    pub geweke_z: Option<f64>,
    pub geweke_degenerate: bool,
    pub ess: Option<f64>,
    pub ess_degenerate: bool,
}

impl Report {
    pub fn build(
        samples: &PosteriorSamples<f64>,
        data: &CountData<f64>,
        truth: Option<&[f64]>,
    ) -> Result<Self> {
        let summary = diagnostics::summarize(samples, data)?;
        let mut warnings = Vec::new();
        let acc = summary.acceptance;
        if samples.sweeps > 0 && !(ACCEPTANCE_BAND.0..=ACCEPTANCE_BAND.1).contains(&acc.overall) {
            warnings.push(format!("overall acceptance rate {:.3} is outside [{}, {}]", acc.overall, ACCEPTANCE_BAND.0, ACCEPTANCE_BAND.1));
        }
        if samples.states.len() < GEWEKE_MIN_LEN {
            warnings.push(format!(
                "only {} retained samples; diagnostics need at least {GEWEKE_MIN_LEN}",
                samples.states.len()
            ));
        }
        let monitors = summary
            .monitors
            .into_iter()
            .map(|m| {
                let geweke_z = m.geweke.map(|g| g.z).filter(|z| z.is_finite());
                let ess = m.ess.map(|e| e.value);
                if let Some(z) = geweke_z.filter(|z| z.abs() > GEWEKE_WARN) {
                    warnings.push(format!("{}: Geweke z = {z:.2}", m.name));
                }
                if m.geweke.is_some_and(|g| g.degenerate) {
                    warnings.push(format!("{}: constant trace, Geweke z undefined", m.name));
                }
                if let Some(e) = ess.filter(|e| *e < ESS_WARN) {
                    warnings.push(format!("{}: effective sample size {e:.1}", m.name));
                }
                Monitor {
                    name: m.name,
                    geweke_z,
                    geweke_degenerate: m.geweke.is_some_and(|g| g.degenerate),
                    ess,
                    ess_degenerate: m.ess.is_some_and(|e| e.degenerate),
                }
            })
            .collect();
        let truth_correlation = match truth {
            Some(t) if !samples.states.is_empty() => Some(pearson(&posterior_mean_eta(samples), t)),
            _ => None,
        };
        let h = &samples.hyperparams;
        Ok(Report {
            seed: h.seed,
            regions: samples.n,
            iterations: h.iterations,
            burn_in: h.burn_in,
            thinning: h.thinning,
            samples: samples.states.len(),
            acceptance: Acceptance {
                overall: acc.overall,
                per_site: acc.per_site,
            },
            monitors,
            truth_correlation,
            dense_oracle_max_error: None,
            warnings,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing report '{}'", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading report '{}'", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn posterior_mean_eta(samples: &PosteriorSamples<f64>) -> Vec<f64> {
    let mut mean = vec![0.0; samples.n];
    for s in &samples.states {
        for (m, (u, v)) in mean.iter_mut().zip(s.u.iter().zip(&s.v)) {
            *m += u + v;
        }
    }
    let count = samples.states.len() as f64;
    mean.iter_mut().for_each(|m| *m /= count);
    mean
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

#[derive(Debug, Deserialize)]
struct TruthRow {
    region_id: String,
    eta: f64,
}

/// Reads `region_id,eta` rows and reorders them to match `region_ids`.
pub fn read_truth(source: impl Read, region_ids: &[String]) -> Result<Vec<f64>> {
    let mut by_id = HashMap::new();
    for row in csv::Reader::from_reader(source).deserialize() {
        let row: TruthRow = row?;
        if by_id.insert(row.region_id.clone(), row.eta).is_some() {
            bail!("duplicate region '{}' in truth file", row.region_id);
        }
    }
    if by_id.len() != region_ids.len() {
        bail!("truth file has {} regions, counts have {}", by_id.len(), region_ids.len());
    }
    region_ids
        .iter()
        .map(|id| by_id.get(id).copied().with_context(|| format!("region '{id}' missing from truth file")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    /// Hashes `names` relative to `dir`, sorted by name.
    pub fn hash_files(dir: &Path, names: &[&str]) -> Result<Self> {
        let mut files = names
            .iter()
            .map(|name| {
                let bytes = fs::read(dir.join(name)).with_context(|| format!("hashing '{name}'"))?;
                Ok(ManifestEntry {
                    path: name.to_string(),
                    sha256: hex::encode(Sha256::digest(&bytes)),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        files.sort_by(|a, b| a.path.cmp(&b.path));
        Ok(Manifest { files })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing manifest '{}'", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
