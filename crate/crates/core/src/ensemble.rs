//! Synthetic ensembles of communities and log-log exponent recovery.
//!
//! Sample `i` of an ensemble draws from a ChaCha8 generator seeded with
//! `seed` and switched to stream `i`, so each sample depends only on
//! `(seed, i)`. Populations are log-uniform on `[n_min, n_max]`; outputs
//! carry multiplicative log-normal noise.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::format::sig12;
use crate::meanfield::{
    class_output, predicted_exponent, to_f64, Exponent, MeanFieldError, Population, ScalingClass, ScalingParams,
};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Model(#[from] MeanFieldError),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("sample {index} is not positive (N = {n}, Y = {y})")]
    NonPositive { index: usize, n: f64, y: f64 },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("row 1: header must be exactly `{expected}`, found {found:?}")]
    Header { expected: String, found: String },
    #[error("row {row}, column {column}: {message}")]
    Cell { row: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, EnsembleError>;

/// Recipe for a synthetic ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub class: ScalingClass,
    pub params: ScalingParams,
    pub n_samples: usize,
    pub n_min: f64,
    pub n_max: f64,
    /// Standard deviation of `ln Y` noise.
    pub noise_sigma: f64,
    /// `N_0 / N`, held fixed across the ensemble.
    pub inactive_fraction: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    /// 500 samples on `[10³, 10⁷]` with `σ = 0.1`, no inactive agents, seed 42.
    pub fn new(class: ScalingClass, params: ScalingParams) -> Self {
        EnsembleSpec {
            class,
            params,
            n_samples: 500,
            n_min: 1e3,
            n_max: 1e7,
            noise_sigma: 0.1,
            inactive_fraction: 0.0,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(EnsembleError::InvalidSpec(m.to_string()));
        if self.n_samples < 2 {
            return bad("n_samples must be at least 2");
        }
        if !(self.n_min.is_finite() && self.n_max.is_finite() && self.n_min >= 1.0 && self.n_max > self.n_min) {
            return bad("population bounds must satisfy 1 <= n_min < n_max");
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad("noise_sigma must be finite and non-negative");
        }
        if !(0.0..1.0).contains(&self.inactive_fraction) {
            return bad("inactive_fraction must lie in [0, 1)");
        }
        predicted_exponent(self.class, &self.params, true)?;
        Ok(())
    }
}

/// One observed community: population `N` and output `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleSample {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "Y")]
    pub y: f64,
}

/// Sample `index` of the ensemble described by `spec`.
pub fn sample_at(spec: &EnsembleSpec, index: usize) -> Result<EnsembleSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let u: f64 = rng.random();
    let z: f64 = rng.sample(StandardNormal);
    let (lo, hi) = (spec.n_min.ln(), spec.n_max.ln());
    let n = (lo + u * (hi - lo)).exp();
    let pop = Population::with_inactive_fraction(n, spec.inactive_fraction)?;
    let y = class_output(spec.class, &pop, &spec.params)? * (spec.noise_sigma * z).exp();
    Ok(EnsembleSample { n, y })
}

/// Generates the ensemble in parallel; identical to [`generate_sequential`].
pub fn generate(spec: &EnsembleSpec) -> Result<Vec<EnsembleSample>> {
    spec.validate()?;
    (0..spec.n_samples).into_par_iter().map(|i| sample_at(spec, i)).collect()
}

pub fn generate_sequential(spec: &EnsembleSpec) -> Result<Vec<EnsembleSample>> {
    spec.validate()?;
    (0..spec.n_samples).map(|i| sample_at(spec, i)).collect()
}

/// Ordinary least squares fit of `ln Y = log_intercept + beta · ln N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub beta: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    pub stderr_beta: f64,
    pub n: usize,
}

pub fn fit_power_law(samples: &[EnsembleSample]) -> Result<PowerLawFit> {
    for (index, s) in samples.iter().enumerate() {
        if !(s.n > 0.0 && s.y > 0.0 && s.n.is_finite() && s.y.is_finite()) {
            return Err(EnsembleError::NonPositive { index, n: s.n, y: s.y });
        }
    }
    let first = samples.first().map(|s| s.n);
    if samples.iter().all(|s| Some(s.n) == first) {
        return Err(EnsembleError::InsufficientData(format!(
            "need at least 2 distinct N values, got {} samples",
            samples.len()
        )));
    }
    let count = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.n.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / count;
    let my = ys.iter().sum::<f64>() / count;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let beta = sxy / sxx;
    let log_intercept = my - beta * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - log_intercept - beta * x).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    let stderr_beta = if samples.len() > 2 { (ss_res / (count - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(PowerLawFit { beta, log_intercept, r_squared, stderr_beta, n: samples.len() })
}

/// Default tolerance multiplier for [`compare`].
pub const DEFAULT_K: f64 = 2.0;

/// Fitted or observed exponent set against a class prediction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub class: ScalingClass,
    pub theory: f64,
    pub fitted: f64,
    /// `|fitted − theory|`.
    pub gap: f64,
    pub stderr: f64,
    pub k: f64,
    /// `gap ≤ k · stderr`.
    pub within: bool,
}

pub fn compare(fit: &PowerLawFit, class: ScalingClass, params: &ScalingParams, k: f64) -> Result<Comparison> {
    compare_value(fit.beta, fit.stderr_beta, class, params, k)
}

/// [`compare`] for an exponent known only as a value and standard error.
pub fn compare_value(beta: f64, stderr: f64, class: ScalingClass, params: &ScalingParams, k: f64) -> Result<Comparison> {
    let theory: Exponent = predicted_exponent(class, params, true)?;
    let theory = to_f64(theory);
    let gap = (beta - theory).abs();
    Ok(Comparison { class, theory, fitted: beta, gap, stderr, k, within: gap <= k * stderr })
}

fn parse_cell(row: usize, column: usize, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| EnsembleError::Cell { row, column, message: format!("not a number: {s:?}") })
}

/// Reads `N,Y` samples from any reader. Row 1 is the header.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<EnsembleSample>> {
    Ok(read_pairs(reader, ["N", "Y"])?.into_iter().map(|(n, y)| EnsembleSample { n, y }).collect())
}

/// Reads two positive numeric columns under the exact header `columns`.
/// Errors name the 1-based row (the header is row 1) and column.
pub fn read_pairs<R: Read>(reader: R, columns: [&str; 2]) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut records = rdr.records();
    let expected = columns.join(",");
    let header = match records.next() {
        None => return Err(EnsembleError::Header { expected, found: String::new() }),
        Some(r) => r.map_err(|e| EnsembleError::Cell { row: 1, column: 1, message: e.to_string() })?,
    };
    if header.len() != 2 || header[0] != *columns[0] || header[1] != *columns[1] {
        return Err(EnsembleError::Header { expected, found: header.iter().collect::<Vec<_>>().join(",") });
    }
    let mut out = Vec::new();
    for (i, record) in records.enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| EnsembleError::Cell { row, column: 1, message: e.to_string() })?;
        if record.len() != 2 {
            return Err(EnsembleError::Cell {
                row,
                column: record.len().min(2) + 1,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let mut pair = [0.0; 2];
        for (k, value) in pair.iter_mut().enumerate() {
            *value = parse_cell(row, k + 1, &record[k])?;
            if !(*value > 0.0 && value.is_finite()) {
                return Err(EnsembleError::Cell {
                    row,
                    column: k + 1,
                    message: format!("{} must be positive, got {value}", columns[k]),
                });
            }
        }
        out.push((pair[0], pair[1]));
    }
    Ok(out)
}

/// Reads `N,Y` samples from a file.
pub fn ingest_csv(path: &Path) -> Result<Vec<EnsembleSample>> {
    let io = |source| EnsembleError::Io { path: path.display().to_string(), source };
    let file = File::open(path).map_err(io)?;
    read_csv(file)
}

/// Writes samples as `N,Y` CSV with 12 significant digits.
pub fn write_csv<W: Write>(samples: &[EnsembleSample], mut out: W) -> std::io::Result<()> {
    writeln!(out, "N,Y")?;
    for s in samples {
        writeln!(out, "{},{}", sig12(s.n), sig12(s.y))?;
    }
    Ok(())
}
