//! Grid sweeps over `(n, a)` and the regime-normalized ratios that should
//! tend to one (or stay inside a fixed bracket) as `n` grows.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds;
use crate::cesaro;
use crate::error::{domain, Error, Result};
use crate::hadamard::MultiplierOperator;
use crate::specfun;

/// Solver tolerance up to and including this degree; [`LOOSE_TOL`] above.
pub const TIGHT_TOL_MAX_N: usize = 1 << 13;
pub const TIGHT_TOL: f64 = 1e-10;
pub const LOOSE_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 20_000;

/// Allowed final `|ratio - 1|` below order one half: 10% up to a = 1/4, 15% above.
pub const BELOW_HALF_TOL_SMALL: f64 = 0.10;
pub const BELOW_HALF_TOL_LARGE: f64 = 0.15;
/// Allowed final `|ratio - 1|` at order one half.
pub const HALF_TOL: f64 = 0.20;
/// Relative widening of the limit bracket above order one half.
pub const ABOVE_HALF_SLACK: f64 = 0.02;
/// Slack on the sandwich `best_lower <= norm^2 <= upper`.
pub const SANDWICH_SLACK: f64 = 1e-9;

/// Powers of two from 2^3 to 2^20.
pub fn default_n_values() -> Vec<usize> {
    (3..=20).map(|p| 1usize << p).collect()
}

pub fn default_tolerance(n: usize) -> f64 {
    if n <= TIGHT_TOL_MAX_N {
        TIGHT_TOL
    } else {
        LOOSE_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BelowHalf,
    Half,
    AboveHalf,
}

impl Regime {
    pub fn of(alpha: f64) -> Self {
        if alpha < 0.5 {
            Regime::BelowHalf
        } else if alpha == 0.5 {
            Regime::Half
        } else {
            Regime::AboveHalf
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::BelowHalf => "below_half",
            Regime::Half => "half",
            Regime::AboveHalf => "above_half",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The quantity whose limit is known in each regime:
/// `norm / (C_a n^(1/2-a))` below one half, `norm / (sqrt(ln n)/2)` at one half,
/// and the norm itself above.
pub fn asymptote_ratio(n: usize, alpha: f64, norm: f64) -> Result<f64> {
    if n < 2 {
        return domain(format!("asymptotic ratio needs n >= 2, got {n}"));
    }
    let nf = n as f64;
    Ok(match Regime::of(alpha) {
        Regime::BelowHalf => norm / (specfun::c_alpha_gamma(alpha)? * nf.powf(0.5 - alpha)),
        Regime::Half => norm / (0.5 * nf.ln().sqrt()),
        Regime::AboveHalf => norm,
    })
}

/// Limit bracket for `1/2 < a < 1`:
/// `low = max{1, a/(2a-1)^(1/2) * (2a-1)^(a-1/2)/(2a)^a}`, `high = a/(2a-1)^(1/2)`.
pub fn theorem3_bracket(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return domain(format!("bracket is defined for 1/2 < alpha < 1, got {alpha}"));
    }
    Ok(limit_bracket(alpha))
}

// Also evaluated at a = 1, where both ends equal 1.
fn limit_bracket(alpha: f64) -> (f64, f64) {
    let e = 2.0 * alpha - 1.0;
    let high = alpha / e.sqrt();
    let second = high * e.powf(alpha - 0.5) / (2.0 * alpha).powf(alpha);
    (second.max(1.0), high)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alphas: Vec<f64>,
    pub n_values: Vec<usize>,
    /// Fixed solver tolerance; `None` uses [`default_tolerance`].
    pub tol: Option<f64>,
    pub max_iter: usize,
    pub workers: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alphas: vec![0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0],
            n_values: default_n_values(),
            tol: None,
            max_iter: DEFAULT_MAX_ITER,
            workers: 1,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() || self.n_values.is_empty() {
            return domain("sweep needs at least one alpha and one n");
        }
        if let Some(a) = self.alphas.iter().find(|a| !(a.is_finite() && (0.0..=1.0).contains(*a))) {
            return domain(format!("alpha must lie in [0, 1], got {a}"));
        }
        if self.n_values[0] < 2 {
            return domain(format!("n values must be at least 2, got {}", self.n_values[0]));
        }
        if self.n_values.windows(2).any(|w| w[1] <= w[0]) {
            return domain("n values must be strictly increasing");
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return domain(format!("tolerance must be positive, got {t}"));
            }
        }
        if self.max_iter == 0 || self.workers == 0 {
            return domain("max_iter and workers must be positive");
        }
        Ok(())
    }

    fn tolerance_for(&self, n: usize) -> f64 {
        self.tol.unwrap_or_else(|| default_tolerance(n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub alpha: f64,
    pub norm: f64,
    pub norm_sq: f64,
    pub upper: f64,
    pub best_lower: f64,
    pub best_m: usize,
    pub ratio: f64,
    pub regime: Regime,
    pub iterations: usize,
    pub residual: f64,
    #[serde(skip)]
    pub converged: bool,
    #[serde(skip)]
    pub tol: f64,
}

impl SweepRecord {
    pub fn sandwich_holds(&self) -> bool {
        self.best_lower <= self.norm_sq + SANDWICH_SLACK
            && self.norm_sq <= self.upper + SANDWICH_SLACK
    }
}

/// Computes one grid point. Solver non-convergence is kept in the record
/// (`converged = false`, with the achieved residual) rather than reported as
/// an error.
pub fn evaluate_point(n: usize, alpha: f64, tol: f64, max_iter: usize) -> Result<SweepRecord> {
    let kernel = cesaro::coefficients(n, alpha)?;
    let op = MultiplierOperator::from_kernel(&kernel);
    let result = match op.operator_norm(tol, max_iter) {
        Ok(r) => r,
        Err(Error::NoConvergence(partial)) => *partial,
        Err(e) => return Err(e),
    };
    let bracket = bounds::bracket(&kernel)?;
    Ok(SweepRecord {
        n,
        alpha,
        norm: result.norm,
        norm_sq: result.norm_sq,
        upper: bracket.upper,
        best_lower: bracket.lower,
        best_m: bracket.lower_m,
        ratio: asymptote_ratio(n, alpha, result.norm)?,
        regime: Regime::of(alpha),
        iterations: result.iterations,
        residual: result.residual,
        converged: result.converged,
        tol,
    })
}

/// All `(a, n)` grid points, computed on up to `config.workers` threads and
/// returned sorted by `a` then `n`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    let points: Vec<(f64, usize)> = config
        .alphas
        .iter()
        .flat_map(|&a| config.n_values.iter().map(move |&n| (a, n)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    let mut records = pool.install(|| {
        points
            .par_iter()
            .map(|&(a, n)| evaluate_point(n, a, config.tolerance_for(n), config.max_iter))
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by(|x, y| x.alpha.total_cmp(&y.alpha).then(x.n.cmp(&y.n)));
    Ok(records)
}

pub const CSV_SCHEMA_LINE: &str = "# schema=1";
pub const CSV_HEADER: &str =
    "n,alpha,norm,norm_sq,upper,best_lower,best_m,ratio,regime,iterations,residual";

/// 17 significant digits; parses back to the same `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(records: &[SweepRecord]) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_SCHEMA_LINE}").unwrap();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            fmt_float(r.alpha),
            fmt_float(r.norm),
            fmt_float(r.norm_sq),
            fmt_float(r.upper),
            fmt_float(r.best_lower),
            r.best_m,
            fmt_float(r.ratio),
            r.regime,
            r.iterations,
            fmt_float(r.residual),
        )
        .unwrap();
    }
    out
}

pub fn to_json(records: &[SweepRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

/// Outcome of [`trend_check`] for one order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub alpha: f64,
    pub regime: Regime,
    pub final_n: usize,
    pub final_ratio: f64,
    /// `|ratio - 1|` at the final n (below one half and at one half).
    pub final_gap: Option<f64>,
    /// Gap tolerance, or the relative bracket slack above one half.
    pub tolerance: f64,
    pub monotone: bool,
    pub passed: bool,
    pub detail: String,
}

/// `|ratio - 1|` must not grow across `records` by more than the solver
/// tolerance of the later point. Returns the offending pair on failure.
pub fn gaps_non_increasing(records: &[&SweepRecord]) -> std::result::Result<(), (usize, usize)> {
    for w in records.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = ((a.ratio - 1.0).abs(), (b.ratio - 1.0).abs());
        if gb > ga + b.tol.max(a.tol) {
            return Err((a.n, b.n));
        }
    }
    Ok(())
}

/// Minimum number of grid points per order.
pub const TREND_MIN_POINTS: usize = 4;

/// Per-order convergence verdicts.
///
/// Below and at one half, `|ratio - 1|` must be non-increasing over the last
/// four grid points (up to solver resolution) and within the regime tolerance
/// at the final `n`. Above one half the final norm must lie in the limit
/// bracket widened by [`ABOVE_HALF_SLACK`].
pub fn trend_check(records: &[SweepRecord]) -> Result<Vec<TrendReport>> {
    let mut by_alpha: BTreeMap<u64, Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        by_alpha.entry(ordered_key(r.alpha)).or_default().push(r);
    }
    let mut reports = Vec::with_capacity(by_alpha.len());
    for (_, mut group) in by_alpha {
        group.sort_by_key(|r| r.n);
        group.dedup_by_key(|r| r.n);
        let alpha = group[0].alpha;
        if group.len() < TREND_MIN_POINTS {
            return domain(format!(
                "trend check needs at least {TREND_MIN_POINTS} n values for alpha = {alpha}, got {}",
                group.len()
            ));
        }
        let last = *group.last().unwrap();
        let regime = Regime::of(alpha);
        let report = match regime {
            Regime::BelowHalf | Regime::Half => {
                let tolerance = match regime {
                    Regime::Half => HALF_TOL,
                    _ if alpha <= 0.25 => BELOW_HALF_TOL_SMALL,
                    _ => BELOW_HALF_TOL_LARGE,
                };
                let tail = &group[group.len() - TREND_MIN_POINTS..];
                let monotone = gaps_non_increasing(tail);
                let gap = (last.ratio - 1.0).abs();
                let passed = monotone.is_ok() && gap <= tolerance;
                let detail = match monotone {
                    Err((a, b)) => format!("|ratio-1| grew from n={a} to n={b}"),
                    Ok(()) => format!("final |ratio-1| = {gap:.4e} (limit {tolerance})"),
                };
                TrendReport {
                    alpha,
                    regime,
                    final_n: last.n,
                    final_ratio: last.ratio,
                    final_gap: Some(gap),
                    tolerance,
                    monotone: monotone.is_ok(),
                    passed,
                    detail,
                }
            }
            Regime::AboveHalf => {
                let (low, high) = limit_bracket(alpha);
                let (lo, hi) = (low * (1.0 - ABOVE_HALF_SLACK), high * (1.0 + ABOVE_HALF_SLACK));
                let passed = lo <= last.norm && last.norm <= hi;
                TrendReport {
                    alpha,
                    regime,
                    final_n: last.n,
                    final_ratio: last.ratio,
                    final_gap: None,
                    tolerance: ABOVE_HALF_SLACK,
                    monotone: true,
                    passed,
                    detail: format!("norm {:.6} vs bracket [{low:.6}, {high:.6}] +/- 2%", last.norm),
                }
            }
        };
        reports.push(report);
    }
    Ok(reports)
}

fn ordered_key(x: f64) -> u64 {
    // total order on non-negative finite floats
    x.to_bits()
}
