//! Certified brackets on `||sigma_n^a||^2`.
//!
//! With `d_k = c_{k+1} - c_k` (and `c_{n+1} = 0`), the squared norm satisfies
//!
//! ```text
//! m * sum_{k=m}^{n} d_k^2  <=  ||T_c||^2  <=  (n+1) * sum_{k=1}^{n} d_k^2
//! ```
//!
//! for every `m` in `1..=n`. The closed forms below bound the two sums through
//! Gautschi's inequality and an integral comparison.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cesaro::CesaroKernel;
use crate::error::{domain, Result};
use crate::specfun;

/// Default exponent for the `m = floor((n-1)/2^g)` choice.
pub const DEFAULT_GAMMA: f64 = 0.5;

/// `S` and its suffix sums `S~_m = sum_{k=m}^{n} d_k^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffEnergy {
    /// Ascending compensated sum over `k = 1..=n`.
    pub total: f64,
    /// `suffix[m-1] = S~_m` for `m = 1..=n`.
    pub suffix: Vec<f64>,
}

impl DiffEnergy {
    pub fn suffix_at(&self, m: usize) -> f64 {
        self.suffix[m - 1]
    }
}

fn require_degree(kernel: &CesaroKernel) -> Result<usize> {
    match kernel.n() {
        0 => domain("difference energy needs n >= 1"),
        n => Ok(n),
    }
}

pub fn diff_energy(kernel: &CesaroKernel) -> Result<DiffEnergy> {
    require_degree(kernel)?;
    let squares: Vec<f64> = kernel.differences().iter().map(|d| d * d).collect();

    let mut total = 0.0;
    let mut comp = 0.0;
    for &s in &squares {
        let y = s - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
    }

    let mut suffix = vec![0.0; squares.len()];
    let mut acc = 0.0;
    let mut comp = 0.0;
    for (slot, &s) in suffix.iter_mut().zip(&squares).rev() {
        let y = s - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
        *slot = acc;
    }
    Ok(DiffEnergy { total, suffix })
}

/// `(n+1) S`.
pub fn upper_certificate(kernel: &CesaroKernel) -> Result<f64> {
    let n = require_degree(kernel)?;
    Ok((n as f64 + 1.0) * diff_energy(kernel)?.total)
}

/// `m S~_m`.
pub fn lower_certificate(kernel: &CesaroKernel, m: usize) -> Result<f64> {
    let n = require_degree(kernel)?;
    if m == 0 || m > n {
        return domain(format!("m must lie in 1..={n}, got {m}"));
    }
    Ok(m as f64 * diff_energy(kernel)?.suffix_at(m))
}

/// Maximum of `m S~_m` over `m = 1..=n` and its smallest maximizer.
pub fn best_lower(kernel: &CesaroKernel) -> Result<(f64, usize)> {
    let energy = diff_energy(kernel)?;
    Ok(best_from_suffix(&energy.suffix))
}

fn best_from_suffix(suffix: &[f64]) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, &s) in suffix.iter().enumerate() {
        let v = (i + 1) as f64 * s;
        if v > best.0 {
            best = (v, i + 1);
        }
    }
    best
}

fn check_lemma_domain(n: usize, alpha: f64) -> Result<()> {
    if n < 2 {
        return domain(format!("closed-form estimates need n > 1, got {n}"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("closed-form estimates need 0 < alpha < 1, got {alpha}"));
    }
    Ok(())
}

/// Upper estimate of `S`. The order-one-half branch is taken only when
/// `alpha == 0.5` exactly.
pub fn closed_form_upper(n: usize, alpha: f64) -> Result<f64> {
    check_lemma_domain(n, alpha)?;
    let nf = n as f64;
    if alpha == 0.5 {
        let lead = PI / 4.0 * (nf + 1.0) / ((nf + 0.5) * (nf + 0.5));
        return Ok(lead * (1.0 + ((nf - 1.0).ln() + 1.0) / PI));
    }
    let g1 = specfun::log_gamma(alpha + 1.0)?;
    let g0 = specfun::log_gamma(alpha)?;
    let lead = (2.0 * g1).exp() * (nf + 1.0).powf(2.0 - 2.0 * alpha) / ((nf + alpha) * (nf + alpha));
    let inv = 1.0 / ((2.0 * g0).exp() * (2.0 * alpha - 1.0));
    Ok(lead * (1.0 + (nf - 1.0).powf(2.0 * alpha - 1.0) * inv + (2.0 * alpha - 2.0) * inv))
}

/// Lower estimate of `S~_m` for `1 <= m < n`.
pub fn closed_form_lower(n: usize, alpha: f64, m: usize) -> Result<f64> {
    check_lemma_domain(n, alpha)?;
    if m == 0 || m >= n {
        return domain(format!("m must lie in 1..{n}, got {m}"));
    }
    let nf = n as f64;
    let gap = (n - m) as f64 + 2.0;
    if alpha == 0.5 {
        let lead = PI / 4.0 * nf / ((nf + 0.5) * (nf + 0.5));
        return Ok(lead * (1.0 + (gap.ln() - 2f64.ln()) / PI));
    }
    let g1 = specfun::log_gamma(alpha + 1.0)?;
    let g0 = specfun::log_gamma(alpha)?;
    let lead = (2.0 * g1).exp() * nf.powf(2.0 - 2.0 * alpha) / ((nf + alpha) * (nf + alpha));
    let inv = 1.0 / ((2.0 * g0).exp() * (2.0 * alpha - 1.0));
    let e = 2.0 * alpha - 1.0;
    Ok(lead * (1.0 + gap.powf(e) * inv - 2f64.powf(e) * inv))
}

/// How `m` is chosen in the lower-bound arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProofRegime {
    /// `m = floor((n-1)/2^g)` with `0 < g < 1`.
    Gamma(f64),
    /// Order one half: the same formula with `g =` [`DEFAULT_GAMMA`].
    Half,
    /// `m = floor((n-1)/(2a))`.
    Above,
}

impl ProofRegime {
    /// The regime whose argument applies at order `alpha`.
    pub fn for_alpha(alpha: f64) -> Self {
        if alpha < 0.5 {
            ProofRegime::Gamma(DEFAULT_GAMMA)
        } else if alpha == 0.5 {
            ProofRegime::Half
        } else {
            ProofRegime::Above
        }
    }
}

/// The proof's `m`, clamped to `[1, n-1]`.
pub fn proof_m_choice(n: usize, alpha: f64, regime: ProofRegime) -> usize {
    let top = (n as f64 - 1.0).max(0.0);
    let raw = match regime {
        ProofRegime::Gamma(g) => top / 2f64.powf(g),
        ProofRegime::Half => top / 2f64.powf(DEFAULT_GAMMA),
        ProofRegime::Above => top / (2.0 * alpha),
    };
    let upper = n.saturating_sub(1).max(1);
    (raw.floor() as usize).clamp(1, upper)
}

/// Every bound available for one `(n, a)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBracket {
    pub n: usize,
    pub alpha: f64,
    /// `S`.
    #[serde(rename = "S")]
    pub diff_energy: f64,
    /// `max_m m S~_m`.
    pub lower: f64,
    pub lower_m: usize,
    /// `(n+1) S`.
    pub upper: f64,
    /// `(n+1) * closed_form_upper`; `None` outside `n > 1`, `0 < a < 1`.
    pub closed_upper: Option<f64>,
    /// `m * closed_form_lower(m)` at the proof's `m`.
    pub closed_lower: Option<f64>,
    pub proof_m: Option<usize>,
}

pub fn bracket(kernel: &CesaroKernel) -> Result<NormBracket> {
    let n = require_degree(kernel)?;
    let alpha = kernel.alpha();
    let energy = diff_energy(kernel)?;
    let (lower, lower_m) = best_from_suffix(&energy.suffix);
    let nf = n as f64;
    let lemmas = n > 1 && alpha > 0.0 && alpha < 1.0;
    let (closed_upper, closed_lower, proof_m) = if lemmas {
        let m = proof_m_choice(n, alpha, ProofRegime::for_alpha(alpha));
        (
            Some((nf + 1.0) * closed_form_upper(n, alpha)?),
            Some(m as f64 * closed_form_lower(n, alpha, m)?),
            Some(m),
        )
    } else {
        (None, None, None)
    };
    Ok(NormBracket {
        n,
        alpha,
        diff_energy: energy.total,
        lower,
        lower_m,
        upper: (nf + 1.0) * energy.total,
        closed_upper,
        closed_lower,
        proof_m,
    })
}
