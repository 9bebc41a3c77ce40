//! Text file formats: counts tables, sparse coordinate matrices and chain
//! traces. Floating point values are written with 17 significant digits so a
//! write/read round trip is exact.
//!
//! Trace layout (version 1), one item per line:
//!
//! ```text
//! decomp-trace 1
//! n <regions>
//! samples <retained states>
//! seed <u64>
//! iterations <count>
//! burn_in <count>
//! thinning <count>
//! a_u <value>
//! b_u <value>
//! a_v <value>
//! b_v <value>
//! proposal_sd <value>
//! sweeps <count>
//! accepted <n counts>
//! data
//! <kappa_u> <kappa_v> <u_0 … u_{n-1}> <v_0 … v_{n-1}>     (one line per state)
//! ```

use std::collections::HashSet;
use std::io::{BufRead, Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sampler::{ChainState, CountData, Hyperparams, PosteriorSamples};
use crate::scalar::Real;
use crate::sparsela::SparseSymmetric;

pub const TRACE_MAGIC: &str = "decomp-trace";
pub const TRACE_VERSION: u32 = 1;
const COORDINATE_BANNER: &str = "%%decomp sparse symmetric lower";

/// Formats with 17 significant digits.
pub fn fmt_real<T: Real>(x: T) -> String {
    format!("{x:.16e}")
}

fn parse_value<V: FromStr>(token: &str, line: usize, what: &str) -> Result<V> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} `{token}`"),
    })
}

/// Counts keyed by region identifier, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable<T> {
    pub region_ids: Vec<String>,
    pub data: CountData<T>,
}

/// Reads a `region_id,y,e` table.
pub fn read_counts<T: Real, R: Read>(source: R) -> Result<CountTable<T>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let header = reader.headers()?.clone();
    let expected = ["region_id", "y", "e"];
    if header.len() != 3 || header.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `region_id,y,e`, found `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut ids = Vec::new();
    let mut y = Vec::new();
    let mut e = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let id = record[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateRegion(id));
        }
        y.push(parse_value::<u64>(&record[1], line, "count")?);
        let expected: T = parse_value(&record[2], line, "expected count")?;
        if !(expected > T::zero()) || !expected.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("expected count must be positive, got {}", &record[2]),
            });
        }
        e.push(expected);
        ids.push(id);
    }
    Ok(CountTable {
        region_ids: ids,
        data: CountData::new(y, e)?,
    })
}

pub fn write_counts<T: Real, W: Write>(mut out: W, table: &CountTable<T>) -> Result<()> {
    writeln!(out, "region_id,y,e")?;
    for (i, id) in table.region_ids.iter().enumerate() {
        writeln!(out, "{id},{},{}", table.data.y()[i], fmt_real(table.data.e()[i]))?;
    }
    Ok(())
}

/// Writes `i j value` lines for the stored lower triangle. The dimension is
/// carried in a `% n=<dim>` comment.
pub fn write_coordinate<T: Real, W: Write>(mut out: W, a: &SparseSymmetric<T>) -> Result<()> {
    writeln!(out, "{COORDINATE_BANNER}")?;
    writeln!(out, "% n={}", a.n())?;
    for (i, j, v) in a.triplets() {
        writeln!(out, "{i} {j} {}", fmt_real(v))?;
    }
    Ok(())
}

/// Reads the coordinate format. Without a `% n=` comment the dimension is
/// `max index + 1`.
pub fn read_coordinate<T: Real, R: BufRead>(source: R) -> Result<SparseSymmetric<T>> {
    let mut n: Option<usize> = None;
    let mut triplets = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('%') {
            if let Some(dim) = comment.trim().strip_prefix("n=") {
                n = Some(parse_value(dim.trim(), lineno, "dimension")?);
            }
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(Error::Parse {
                line: lineno,
                message: "expected `i j value`".into(),
            });
        }
        let i: usize = parse_value(tokens[0], lineno, "row index")?;
        let j: usize = parse_value(tokens[1], lineno, "column index")?;
        let v: T = parse_value(tokens[2], lineno, "value")?;
        if i < j {
            return Err(Error::Parse {
                line: lineno,
                message: format!("entry ({i}, {j}) is above the diagonal"),
            });
        }
        triplets.push((i, j, v));
    }
    let n = n.unwrap_or_else(|| triplets.iter().map(|t| t.0 + 1).max().unwrap_or(0));
    SparseSymmetric::from_triplets(n, triplets)
}

pub fn write_trace<T: Real, W: Write>(mut out: W, samples: &PosteriorSamples<T>) -> Result<()> {
    let h = &samples.hyperparams;
    writeln!(out, "{TRACE_MAGIC} {TRACE_VERSION}")?;
    writeln!(out, "n {}", samples.n)?;
    writeln!(out, "samples {}", samples.states.len())?;
    writeln!(out, "seed {}", h.seed)?;
    writeln!(out, "iterations {}", h.iterations)?;
    writeln!(out, "burn_in {}", h.burn_in)?;
    writeln!(out, "thinning {}", h.thinning)?;
    for (name, value) in [
        ("a_u", h.a_u),
        ("b_u", h.b_u),
        ("a_v", h.a_v),
        ("b_v", h.b_v),
        ("proposal_sd", h.proposal_sd),
    ] {
        writeln!(out, "{name} {}", fmt_real(value))?;
    }
    writeln!(out, "sweeps {}", samples.sweeps)?;
    let accepted: Vec<String> = samples.accepted.iter().map(u64::to_string).collect();
    writeln!(out, "accepted {}", accepted.join(" "))?;
    writeln!(out, "data")?;
    let mut row = String::new();
    for s in &samples.states {
        row.clear();
        row.push_str(&fmt_real(s.kappa_u));
        row.push(' ');
        row.push_str(&fmt_real(s.kappa_v));
        for &x in s.u.iter().chain(&s.v) {
            row.push(' ');
            row.push_str(&fmt_real(x));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

struct TraceLines<R> {
    lines: std::io::Lines<R>,
    lineno: usize,
}

impl<R: BufRead> TraceLines<R> {
    fn next_line(&mut self) -> Result<String> {
        self.lineno += 1;
        match self.lines.next() {
            Some(line) => Ok(line?),
            None => Err(Error::Trace(format!("unexpected end of file at line {}", self.lineno))),
        }
    }

    /// Reads `key value...` and returns the remainder after the key.
    fn field(&mut self, key: &str) -> Result<String> {
        let line = self.next_line()?;
        let (found, rest) = line.split_once(' ').unwrap_or((line.as_str(), ""));
        if found != key {
            return Err(Error::Trace(format!(
                "line {}: expected `{key}`, found `{found}`",
                self.lineno
            )));
        }
        Ok(rest.to_string())
    }

    fn value<V: FromStr>(&mut self, key: &str) -> Result<V> {
        let raw = self.field(key)?;
        raw.trim()
            .parse()
            .map_err(|_| Error::Trace(format!("line {}: invalid {key} `{raw}`", self.lineno)))
    }
}

pub fn read_trace<T: Real, R: BufRead>(source: R) -> Result<PosteriorSamples<T>> {
    let mut lines = TraceLines {
        lines: source.lines(),
        lineno: 0,
    };
    let version: u32 = lines.value(TRACE_MAGIC)?;
    if version != TRACE_VERSION {
        return Err(Error::Trace(format!("unsupported trace version {version}")));
    }
    let n: usize = lines.value("n")?;
    let count: usize = lines.value("samples")?;
    let seed = lines.value("seed")?;
    let iterations = lines.value("iterations")?;
    let burn_in = lines.value("burn_in")?;
    let thinning = lines.value("thinning")?;
    let hyperparams = Hyperparams {
        a_u: lines.value("a_u")?,
        b_u: lines.value("b_u")?,
        a_v: lines.value("a_v")?,
        b_v: lines.value("b_v")?,
        proposal_sd: lines.value("proposal_sd")?,
        iterations,
        burn_in,
        thinning,
        seed,
    };
    let sweeps = lines.value("sweeps")?;
    let accepted_raw = lines.field("accepted")?;
    let accepted = accepted_raw
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Trace(format!("line {}: invalid acceptance count `{t}`", lines.lineno)))
        })
        .collect::<Result<Vec<u64>>>()?;
    if accepted.len() != n {
        return Err(Error::Trace(format!(
            "expected {n} acceptance counts, found {}",
            accepted.len()
        )));
    }
    lines.field("data")?;

    let mut states = Vec::with_capacity(count);
    for _ in 0..count {
        let line = lines.next_line()?;
        let values = line
            .split_whitespace()
            .map(|t| {
                t.parse::<T>()
                    .map_err(|_| Error::Trace(format!("line {}: invalid value `{t}`", lines.lineno)))
            })
            .collect::<Result<Vec<T>>>()?;
        if values.len() != 2 + 2 * n {
            return Err(Error::Trace(format!(
                "line {}: expected {} values, found {}",
                lines.lineno,
                2 + 2 * n,
                values.len()
            )));
        }
        states.push(ChainState {
            kappa_u: values[0],
            kappa_v: values[1],
            u: values[2..2 + n].to_vec(),
            v: values[2 + n..].to_vec(),
        });
    }
    if let Some(extra) = lines.lines.next() {
        if !extra?.trim().is_empty() {
            return Err(Error::Trace(format!("more than {count} samples present")));
        }
    }
    Ok(PosteriorSamples {
        n,
        hyperparams,
        states,
        accepted,
        sweeps,
    })
}
