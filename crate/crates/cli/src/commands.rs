//! Pipeline stages behind the `decomp` subcommands.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use areal_decomp::io::{self, fmt_real, CountTable};
use areal_decomp::{
    igmrf1_precision, igmrf2_grid_precision, pointwise_probability_map, posterior_mean,
    read_adjacency, AdjacencyGraph, BymSampler, Decomposer, PosteriorSamples,
};

use crate::config::{GridDims, RunConfig};
use crate::oracle;
use crate::report::{read_truth, Manifest, Report};

pub const PRECISION_FILE: &str = "precision.mtx";
pub const TRACE_FILE: &str = "trace.txt";
pub const REPORT_FILE: &str = "report.json";
pub const DETAILS_FILE: &str = "details.csv";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Runs `f`, prefixing any error with the stage name.
pub fn stage<T>(name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().with_context(|| format!("{name} stage failed"))
}

pub enum PrecisionSource<'a> {
    Adjacency { path: &'a Path, strict: bool },
    Grid(GridDims),
}

pub fn load_graph(path: &Path, strict: bool) -> Result<AdjacencyGraph> {
    let file = File::open(path).with_context(|| format!("opening adjacency file '{}'", path.display()))?;
    read_adjacency(BufReader::new(file), strict)
        .with_context(|| format!("parsing adjacency file '{}'", path.display()))
}

fn load_counts(cfg: &RunConfig) -> Result<CountTable<f64>> {
    let path = cfg.counts_path()?;
    let file = File::open(path).with_context(|| format!("opening counts file '{}'", path.display()))?;
    io::read_counts(file).with_context(|| format!("parsing counts file '{}'", path.display()))
}

fn load_trace(path: &Path) -> Result<PosteriorSamples<f64>> {
    let file = File::open(path).with_context(|| format!("opening trace file '{}'", path.display()))?;
    io::read_trace(BufReader::new(file)).with_context(|| format!("parsing trace file '{}'", path.display()))
}

fn load_inputs(cfg: &RunConfig) -> Result<(CountTable<f64>, AdjacencyGraph)> {
    let counts = load_counts(cfg)?;
    let graph = load_graph(cfg.adjacency_path()?, cfg.strict_adjacency)?;
    if graph.n() != counts.data.n() {
        bail!(
            "counts file has {} regions but adjacency has {}",
            counts.data.n(),
            graph.n()
        );
    }
    Ok((counts, graph))
}

fn load_truth(cfg: &RunConfig, counts: &CountTable<f64>) -> Result<Option<Vec<f64>>> {
    cfg.truth_path()?
        .map(|p| {
            let file = File::open(p).with_context(|| format!("opening truth file '{}'", p.display()))?;
            read_truth(file, &counts.region_ids).with_context(|| format!("parsing truth file '{}'", p.display()))
        })
        .transpose()
}

fn create_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory '{}'", dir.display()))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating '{}'", path.display()))?;
    let mut out = BufWriter::new(file);
    f(&mut out)?;
    out.flush().with_context(|| format!("writing '{}'", path.display()))
}

/// Writes the first-order precision of an adjacency file, or the
/// second-order lattice precision in grid mode.
pub fn cmd_precision(source: PrecisionSource<'_>, output: &Path) -> Result<PathBuf> {
    stage("precision", || {
        let matrix = match source {
            PrecisionSource::Adjacency { path, strict } => igmrf1_precision::<f64>(&load_graph(path, strict)?),
            PrecisionSource::Grid(d) => igmrf2_grid_precision::<f64>(d.nrow, d.ncol)?,
        };
        create_output(output)?;
        let path = output.join(PRECISION_FILE);
        write_with(&path, |out| Ok(io::write_coordinate(out, &matrix)?))?;
        Ok(path)
    })
}

/// Runs the sampler and writes the trace and run report.
pub fn cmd_sample(cfg: &RunConfig) -> Result<Report> {
    stage("sample", || {
        let (counts, graph) = load_inputs(cfg)?;
        let truth = load_truth(cfg, &counts)?;
        let sampler = BymSampler::new(counts.data.clone(), &graph, cfg.hyper.clone())?;
        let oracle_error = if cfg.dense_oracle {
            Some(oracle::check_u_conditional(&sampler, &sampler.initial_state())?)
        } else {
            None
        };
        let samples = sampler.run()?;
        create_output(&cfg.output)?;
        write_with(&cfg.output.join(TRACE_FILE), |out| Ok(io::write_trace(out, &samples)?))?;
        let mut report = Report::build(&samples, &counts.data, truth.as_deref())?;
        report.dense_oracle_max_error = oracle_error;
        report.write(&cfg.output.join(REPORT_FILE))?;
        Ok(report)
    })
}

/// Decomposes every sample in `trace` and writes per-level posterior means
/// and probability maps.
pub fn cmd_decompose(cfg: &RunConfig, trace: &Path) -> Result<PathBuf> {
    stage("decompose", || {
        let (counts, graph) = load_inputs(cfg)?;
        let samples = load_trace(trace)?;
        if samples.n != graph.n() {
            bail!("trace has {} regions but adjacency has {}", samples.n, graph.n());
        }
        if samples.states.is_empty() {
            bail!("trace '{}' holds no samples", trace.display());
        }
        let r = igmrf1_precision::<f64>(&graph);
        let dec = Decomposer::new(&r, graph.connected_components(), cfg.scales.clone())?;
        if cfg.dense_oracle {
            let x = areal_decomp::log_field(&counts.data, &samples.states[0])?;
            oracle::check_smooths(&dec, &r, &x)?;
        }
        let details = dec.decompose_samples(&samples, &counts.data)?;
        create_output(&cfg.output)?;
        let path = cfg.output.join(DETAILS_FILE);
        write_with(&path, |out| {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["region_id", "level", "mean", "prob_positive", "class"])?;
            for level in 0..cfg.scales.levels() {
                let mean = posterior_mean(&details, level)?;
                let map = pointwise_probability_map(&details, level, cfg.alpha)?;
                for (i, id) in counts.region_ids.iter().enumerate() {
                    w.write_record([
                        id.as_str(),
                        &(level + 1).to_string(),
                        &fmt_real(mean[i]),
                        &fmt_real(map.prob_positive[i]),
                        map.classification[i].as_str(),
                    ])?;
                }
            }
            w.flush()?;
            Ok(())
        })?;
        Ok(path)
    })
}

/// Recomputes the convergence report from a stored trace.
pub fn cmd_diagnose(cfg: &RunConfig, trace: &Path) -> Result<Report> {
    stage("diagnose", || {
        let counts = load_counts(cfg)?;
        let samples = load_trace(trace)?;
        if samples.n != counts.data.n() {
            bail!("trace has {} regions but counts have {}", samples.n, counts.data.n());
        }
        let truth = load_truth(cfg, &counts)?;
        let report = Report::build(&samples, &counts.data, truth.as_deref())?;
        create_output(&cfg.output)?;
        report.write(&cfg.output.join(DIAGNOSTICS_FILE))?;
        Ok(report)
    })
}

/// Sample, decompose, then hash every output into the manifest.
pub fn cmd_run(cfg: &RunConfig) -> Result<Manifest> {
    cmd_sample(cfg)?;
    cmd_decompose(cfg, &cfg.output.join(TRACE_FILE))?;
    stage("manifest", || {
        let manifest = Manifest::hash_files(&cfg.output, &[TRACE_FILE, REPORT_FILE, DETAILS_FILE])?;
        manifest.write(&cfg.output.join(MANIFEST_FILE))?;
        Ok(manifest)
    })
}
