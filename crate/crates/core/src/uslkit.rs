//! One-dimensional scaling: the Universal Scalability Law, serial time
//! models with an optional coherence term, and single-queue response time.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UslError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("USL denominator is non-positive at N = {n}")]
    NonPositiveDenominator { n: f64 },
    #[error("speedup is unbounded: no coherency penalty and contention {contention} < 1")]
    Unbounded { contention: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid data point {index}: {reason}")]
    InvalidData { index: usize, reason: String },
    #[error("effective exponent is only defined without a coherence term (kappa = {kappa})")]
    UnsupportedRegime { kappa: f64 },
    #[error("queue is unstable: arrival rate {lambda} >= service rate {mu}")]
    Unstable { lambda: f64, mu: f64 },
}

type Result<T> = std::result::Result<T, UslError>;

fn invalid(name: &'static str, reason: impl Into<String>) -> UslError {
    UslError::InvalidParam { name, reason: reason.into() }
}

/// Coefficients of `S(N) = N / (1 + contention·(N−1) + coherency·N(N−1))`.
///
/// Negative contention is allowed and models superlinear speedup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UslParams {
    contention: f64,
    coherency: f64,
}

impl UslParams {
    pub fn new(contention: f64, coherency: f64) -> Result<Self> {
        if !(contention.is_finite() && contention >= -1.0) {
            return Err(invalid("contention", format!("must be finite and >= -1, got {contention}")));
        }
        if !(coherency.is_finite() && coherency >= 0.0) {
            return Err(invalid("coherency", format!("must be finite and >= 0, got {coherency}")));
        }
        Ok(UslParams { contention, coherency })
    }

    pub fn contention(&self) -> f64 {
        self.contention
    }

    pub fn coherency(&self) -> f64 {
        self.coherency
    }

    fn denominator(&self, n: f64) -> f64 {
        1.0 + self.contention * (n - 1.0) + self.coherency * n * (n - 1.0)
    }
}

fn check_count(n: f64) -> Result<()> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(invalid("N", format!("must be >= 1, got {n}")));
    }
    Ok(())
}

/// Relative capacity of `n` workers.
pub fn usl_speedup(n: f64, p: &UslParams) -> Result<f64> {
    check_count(n)?;
    let den = p.denominator(n);
    if den <= 0.0 {
        return Err(UslError::NonPositiveDenominator { n });
    }
    Ok(n / den)
}

/// Worker count maximizing the speedup: `sqrt((1 − contention) / coherency)`,
/// clamped to 1 when the curve only falls.
pub fn usl_peak(p: &UslParams) -> Result<f64> {
    let one_minus = 1.0 - p.contention;
    if p.coherency == 0.0 {
        if one_minus > 0.0 {
            return Err(UslError::Unbounded { contention: p.contention });
        }
        return Ok(1.0);
    }
    if one_minus <= 0.0 {
        return Ok(1.0);
    }
    Ok((one_minus / p.coherency).sqrt().max(1.0))
}

/// Result of [`usl_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UslFit {
    pub params: UslParams,
    /// Sum of squared speedup residuals.
    pub residual: f64,
    pub iterations: usize,
}

const FIT_START: (f64, f64) = (0.1, 0.001);
const RESTART_CONTENTION: [f64; 3] = [-0.1, 0.1, 0.5];
const RESTART_COHERENCY: [f64; 3] = [0.0, 1e-4, 1e-2];
const MAX_ITER: usize = 500;

/// Least-squares fit of contention and coherency to `(N, speedup)` data.
///
/// Levenberg–Marquardt on the speedup residuals. Coherency is projected
/// onto `≥ 0`; contention is free down to −1. Starts at `(0.1, 0.001)` and
/// retries from a fixed 3×3 grid when the first residual is not negligible.
pub fn usl_fit(data: &[(f64, f64)]) -> Result<UslFit> {
    for (index, &(n, s)) in data.iter().enumerate() {
        if !(n.is_finite() && n >= 1.0) {
            return Err(UslError::InvalidData { index, reason: format!("N must be >= 1, got {n}") });
        }
        if !(s.is_finite() && s > 0.0) {
            return Err(UslError::InvalidData { index, reason: format!("speedup must be > 0, got {s}") });
        }
    }
    let mut distinct: Vec<f64> = data.iter().map(|d| d.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(UslError::InsufficientData(format!(
            "need at least 3 distinct N values, got {}",
            distinct.len()
        )));
    }

    let scale: f64 = data.iter().map(|d| d.1 * d.1).sum();
    let mut best = levenberg_marquardt(data, FIT_START);
    if best.1 > 1e-20 * scale {
        for a in RESTART_CONTENTION {
            for b in RESTART_COHERENCY {
                let candidate = levenberg_marquardt(data, (a, b));
                if candidate.1 < best.1 {
                    best = candidate;
                }
            }
        }
    }
    let ((a, b), residual, iterations) = best;
    if !residual.is_finite() {
        return Err(UslError::InsufficientData("no admissible parameters fit the data".into()));
    }
    Ok(UslFit { params: UslParams::new(a, b)?, residual, iterations })
}

fn cost(data: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let mut sum = 0.0;
    for &(n, s) in data {
        let den = 1.0 + a * (n - 1.0) + b * n * (n - 1.0);
        if den <= 0.0 {
            return f64::INFINITY;
        }
        let r = n / den - s;
        sum += r * r;
    }
    sum
}

fn project(a: f64, b: f64) -> (f64, f64) {
    (a.max(-1.0), b.max(0.0))
}

fn levenberg_marquardt(data: &[(f64, f64)], start: (f64, f64)) -> ((f64, f64), f64, usize) {
    let (mut a, mut b) = project(start.0, start.1);
    let mut current = cost(data, a, b);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < MAX_ITER {
        iterations += 1;
        // Normal equations J^T J δ = −J^T r.
        let (mut jaa, mut jab, mut jbb, mut ga, mut gb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(n, s) in data {
            let den = 1.0 + a * (n - 1.0) + b * n * (n - 1.0);
            let model = n / den;
            let r = model - s;
            let da = -model * (n - 1.0) / den;
            let db = -model * n * (n - 1.0) / den;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        let mut improved = false;
        while lambda < 1e16 {
            let m00 = jaa * (1.0 + lambda);
            let m11 = jbb * (1.0 + lambda);
            let det = m00 * m11 - jab * jab;
            if det.abs() < f64::MIN_POSITIVE || !det.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let step_a = -(m11 * ga - jab * gb) / det;
            let step_b = -(m00 * gb - jab * ga) / det;
            let (na, nb) = project(a + step_a, b + step_b);
            let trial = cost(data, na, nb);
            if trial <= current {
                let moved = (na - a).abs() + (nb - b).abs();
                a = na;
                b = nb;
                let gain = current - trial;
                current = trial;
                lambda = (lambda / 10.0).max(1e-15);
                improved = true;
                if moved < 1e-15 || gain <= 1e-30 * current.max(f64::MIN_POSITIVE) && moved < 1e-12 {
                    return ((a, b), current, iterations);
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    ((a, b), current, iterations)
}

/// Serial/parallel/coherence time model `T(N) = σ + π/N + κN`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SerialModel {
    sigma: f64,
    parallel: f64,
    kappa: f64,
}

impl SerialModel {
    /// `sigma > 0` serial time, `parallel ≥ 0` divisible work, `kappa ≥ 0`
    /// per-worker coherence cost.
    pub fn new(sigma: f64, parallel: f64, kappa: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("sigma", "serial time must be positive"));
        }
        if !(parallel.is_finite() && parallel >= 0.0) {
            return Err(invalid("pi", "parallel work must be non-negative"));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(invalid("kappa", "coherence cost must be non-negative"));
        }
        Ok(SerialModel { sigma, parallel, kappa })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn parallel(&self) -> f64 {
        self.parallel
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

pub fn serial_time(n: f64, m: &SerialModel) -> Result<f64> {
    check_count(n)?;
    Ok(m.sigma + m.parallel / n + m.kappa * n)
}

/// Local power-law exponent of `T(N) ≈ T₀ N^{−δ}` without coherence cost:
/// `δ = x / (1 + x)` with `x = π / (σN)`.
pub fn effective_exponent(n: f64, m: &SerialModel) -> Result<f64> {
    check_count(n)?;
    if m.kappa != 0.0 {
        return Err(UslError::UnsupportedRegime { kappa: m.kappa });
    }
    let x = m.parallel / (m.sigma * n);
    Ok(x / (1.0 + x))
}

/// Arrival and service rates of a single queue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueParams {
    pub lambda: f64,
    pub mu: f64,
}

/// `R = 1/(μ − λ)`; only defined for a stable queue.
pub fn response_time(q: &QueueParams) -> Result<f64> {
    if !(q.lambda.is_finite() && q.lambda >= 0.0) {
        return Err(invalid("lambda", "arrival rate must be non-negative"));
    }
    if !(q.mu.is_finite() && q.mu >= 0.0) {
        return Err(invalid("mu", "service rate must be non-negative"));
    }
    if q.lambda >= q.mu {
        return Err(UslError::Unstable { lambda: q.lambda, mu: q.mu });
    }
    Ok(1.0 / (q.mu - q.lambda))
}
