//! Generalized Cesaro coefficient sequences.
//!
//! For degree `n` and order `a` in `[0, 1]` the mean `sigma_n^a` multiplies the
//! k-th Taylor coefficient by
//! `c_k = binom(n+a, a)^(-1) binom(n-k+a, a)` for `k <= n`, and by zero beyond.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::specfun;

/// The coefficients `c_0..c_n` of `sigma_n^a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CesaroKernel {
    n: usize,
    alpha: f64,
    coeffs: Vec<f64>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        domain(format!("Cesaro order must lie in [0, 1], got {alpha}"))
    }
}

/// Builds the kernel from `c_0 = 1` and `c_{k+1} = c_k (n-k)/(n-k+a)`.
///
/// Order 0 yields all ones and order 1 the Fejer weights `(n+1-k)/(n+1)`,
/// both exactly.
pub fn coefficients(n: usize, alpha: f64) -> Result<CesaroKernel> {
    check_alpha(alpha)?;
    let nf = n as f64;
    let coeffs = if alpha == 1.0 {
        (0..=n).map(|k| (nf + 1.0 - k as f64) / (nf + 1.0)).collect()
    } else {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut c = 1.0;
        coeffs.push(c);
        for k in 0..n {
            let rest = (n - k) as f64;
            c *= rest / (rest + alpha);
            coeffs.push(c);
        }
        coeffs
    };
    Ok(CesaroKernel { n, alpha, coeffs })
}

/// Evaluates every `c_k` directly through generalized binomials in log space.
/// Independent of [`coefficients`]; used as its oracle.
pub fn coefficients_gamma(n: usize, alpha: f64) -> Result<CesaroKernel> {
    check_alpha(alpha)?;
    let nf = n as f64;
    let ln_norm = specfun::ln_gen_binom(nf + alpha, alpha)?;
    let coeffs = (0..=n)
        .map(|k| {
            let top = specfun::ln_gen_binom((n - k) as f64 + alpha, alpha)?;
            Ok((top - ln_norm).exp())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CesaroKernel { n, alpha, coeffs })
}

impl CesaroKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `c_0..c_n`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c_k`, zero for `k > n`.
    pub fn get(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// Forward differences `c_{k+1} - c_k` for `k = 1..=n`, with `c_{n+1} = 0`.
    ///
    /// Uses `c_{k+1} - c_k = -(a/(n-k)) c_{k+1}` for `k < n` instead of a
    /// subtraction, so small orders do not lose digits to cancellation. The last
    /// entry is `-c_n`. Empty when `n = 0`.
    pub fn differences(&self) -> Vec<f64> {
        let n = self.n;
        if n == 0 {
            return Vec::new();
        }
        let mut diffs = Vec::with_capacity(n);
        if self.alpha == 1.0 {
            // (n-k)/(n+1) - (n+1-k)/(n+1)
            diffs.resize(n - 1, -1.0 / (n as f64 + 1.0));
        } else {
            for k in 1..n {
                diffs.push(-(self.alpha / (n - k) as f64) * self.coeffs[k + 1]);
            }
        }
        diffs.push(-self.coeffs[n]);
        diffs
    }

    /// `(sigma_n^a f)` on Taylor coefficients: `(c_k a_k)` for `k <= min(n, len-1)`.
    pub fn apply(&self, taylor: &[Complex64]) -> Vec<Complex64> {
        taylor.iter().zip(&self.coeffs).map(|(a, c)| a * c).collect()
    }
}

/// Gautschi bracket on `c_n^2`:
/// `Gamma(a+1)^2 n^(2-2a)/(n+a)^2 < c_n^2 < Gamma(a+1)^2 (n+1)^(2-2a)/(n+a)^2`.
pub fn tail_asymptotic_cn(n: usize, alpha: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return domain("c_n bracket needs n >= 1");
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("c_n bracket needs 0 < alpha < 1, got {alpha}"));
    }
    let g2 = (2.0 * specfun::log_gamma(alpha + 1.0)?).exp();
    let nf = n as f64;
    let denom = (nf + alpha) * (nf + alpha);
    let e = 2.0 - 2.0 * alpha;
    Ok((g2 * nf.powf(e) / denom, g2 * (nf + 1.0).powf(e) / denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn endpoint_examples() {
        assert_eq!(coefficients(2, 0.0).unwrap().coeffs(), &[1.0, 1.0, 1.0]);
        assert_eq!(coefficients(2, 1.0).unwrap().coeffs(), &[1.0, 2.0 / 3.0, 1.0 / 3.0]);
        let k = coefficients_gamma(2, 1.0).unwrap();
        for (got, want) in k.coeffs().iter().zip([1.0, 2.0 / 3.0, 1.0 / 3.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn half_order_example() {
        let want = [1.0, 4.0 / 5.0, 8.0 / 15.0];
        for k in [coefficients(2, 0.5).unwrap(), coefficients_gamma(2, 0.5).unwrap()] {
            for (got, w) in k.coeffs().iter().zip(want) {
                assert!((got - w).abs() < 1e-15, "{got} vs {w}");
            }
        }
    }

    #[test]
    fn degenerate_degree_zero() {
        let k = coefficients(0, 0.4).unwrap();
        assert_eq!(k.coeffs(), &[1.0]);
        assert!(k.differences().is_empty());
        assert_eq!(k.apply(&[c(3.0), c(4.0)]), vec![c(3.0)]);
    }

    #[test]
    fn rejects_out_of_range_order() {
        for a in [-0.1, 1.01, f64::NAN] {
            assert!(coefficients(3, a).is_err());
            assert!(coefficients_gamma(3, a).is_err());
        }
    }

    #[test]
    fn oracle_equivalence() {
        for n in 0..=200 {
            for a in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
                let rec = coefficients(n, a).unwrap();
                let gam = coefficients_gamma(n, a).unwrap();
                for (k, (x, y)) in rec.coeffs().iter().zip(gam.coeffs()).enumerate() {
                    assert!(((x - y) / y).abs() <= 1e-11, "n={n} a={a} k={k}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn kernel_invariants() {
        for n in [1, 2, 7, 50, 333] {
            for a in [0.0, 0.2, 0.5, 0.8, 1.0] {
                let k = coefficients(n, a).unwrap();
                let cs = k.coeffs();
                assert_eq!(cs[0], 1.0);
                for j in 0..n {
                    assert!(cs[j] > 0.0 && cs[j] <= 1.0);
                    if a > 0.0 {
                        assert!(cs[j + 1] < cs[j]);
                    } else {
                        assert_eq!(cs[j + 1], 1.0);
                    }
                    let lhs = cs[j + 1] * ((n - j) as f64 + a);
                    let rhs = cs[j] * (n - j) as f64;
                    assert!((lhs - rhs).abs() <= 1e-14 * rhs.max(1.0));
                }
            }
        }
    }

    #[test]
    fn monotone_in_order() {
        let alphas = [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0];
        for n in [3, 20, 150] {
            let kernels: Vec<_> = alphas.iter().map(|&a| coefficients(n, a).unwrap()).collect();
            for w in kernels.windows(2) {
                for k in 1..=n {
                    assert!(w[1].get(k) < w[0].get(k), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn differences_match_subtraction() {
        for a in [0.0, 0.3, 0.5, 1.0] {
            let k = coefficients(40, a).unwrap();
            let d = k.differences();
            for j in 1..=40 {
                let direct = k.get(j + 1) - k.get(j);
                assert!((d[j - 1] - direct).abs() < 1e-15, "a={a} j={j}");
            }
        }
    }

    #[test]
    fn apply_examples() {
        let s2 = coefficients(2, 0.0).unwrap();
        let f = [c(1.0), c(5.0), c(-3.0), c(7.0)];
        assert_eq!(s2.apply(&f), vec![c(1.0), c(5.0), c(-3.0)]);

        let fejer = coefficients(2, 1.0).unwrap();
        let out = fejer.apply(&[c(0.0), c(3.0), c(3.0)]);
        assert!((out[1] - c(2.0)).norm() < 1e-15 && (out[2] - c(1.0)).norm() < 1e-15);

        let any = coefficients(9, 0.37).unwrap();
        let a0 = Complex64::new(2.0, -1.5);
        assert_eq!(any.apply(&[a0]), vec![a0]);
    }

    #[test]
    fn last_coefficient_bracket() {
        let k = coefficients(10, 0.5).unwrap();
        let (lo, hi) = tail_asymptotic_cn(10, 0.5).unwrap();
        let cn2 = k.get(10).powi(2);
        assert!(lo < cn2 && cn2 < hi);

        let k = coefficients(1000, 0.25).unwrap();
        let (lo, hi) = tail_asymptotic_cn(1000, 0.25).unwrap();
        let cn2 = k.get(1000).powi(2);
        assert!(lo < cn2 && cn2 < hi);
        assert!((hi - lo) / (0.5 * (hi + lo)) < 0.003);

        assert!(tail_asymptotic_cn(0, 0.5).is_err());
        assert!(tail_asymptotic_cn(5, 1.0).is_err());
    }

    #[test]
    fn last_coefficient_scaling_limit() {
        let a = 0.3;
        let g2 = (2.0 * specfun::log_gamma(a + 1.0).unwrap()).exp();
        let mut prev = f64::INFINITY;
        for p in [6, 10, 14, 18] {
            let n = 1usize << p;
            let k = coefficients(n, a).unwrap();
            let gap = (k.get(n).powi(2) * (n as f64).powf(2.0 * a) / g2 - 1.0).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-4);
    }
}
