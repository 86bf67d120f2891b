//! Local Dirichlet seminorms of polynomials at boundary points.
//!
//! At `zeta = 1` every `f` factors as `f(1) + (z - 1) g(z)` where `g` has Taylor
//! coefficients `t_j = sum_{k>j} a_k` (synthetic division), and `D_1(f)` is the
//! Hardy norm `sum_j |t_j|^2`. Other boundary points reduce to `zeta = 1` by
//! the rotation `a_k -> a_k zeta^k`.
//!
//! The same tail-sum map carries `sigma_n^a` onto the multiplier matrix:
//! `tail(sigma f) = T_c tail(f)`.

use num_complex::Complex64;

use crate::cesaro::CesaroKernel;
use crate::error::{domain, Error, Result};
use crate::hadamard::NormResult;

/// Tolerance on `|zeta| = 1`.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Taylor coefficients `a_0..a_N`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Polynomial { coeffs: coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect() }
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Highest index with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|a| *a != Complex64::new(0.0, 0.0))
    }

    /// `f(zeta z)`.
    pub fn rotated(&self, zeta: Complex64) -> Self {
        let theta = zeta.arg();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * Complex64::from_polar(1.0, theta * k as f64))
            .collect();
        Polynomial { coeffs }
    }
}

/// Tail sums `t_j = sum_{k>j} a_k`, `j = 0..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailVector {
    pub t: Vec<Complex64>,
}

impl TailVector {
    pub fn norm_sqr(&self) -> f64 {
        self.t.iter().map(Complex64::norm_sqr).sum()
    }

    /// Polynomial with this tail vector and `a_0 = 0`:
    /// `a_k = t_{k-1} - t_k` with `t_N = 0`.
    pub fn reconstruct(&self) -> Polynomial {
        let zero = Complex64::new(0.0, 0.0);
        let mut coeffs = Vec::with_capacity(self.t.len() + 1);
        coeffs.push(zero);
        for (j, &tj) in self.t.iter().enumerate() {
            let next = self.t.get(j + 1).copied().unwrap_or(zero);
            coeffs.push(tj - next);
        }
        Polynomial { coeffs }
    }
}

pub fn tail_transform(f: &Polynomial) -> TailVector {
    let a = f.coeffs();
    let len = a.len().saturating_sub(1);
    let mut t = vec![Complex64::new(0.0, 0.0); len];
    let mut acc = Complex64::new(0.0, 0.0);
    for j in (0..len).rev() {
        acc += a[j + 1];
        t[j] = acc;
    }
    TailVector { t }
}

/// `D_zeta(f)` for `|zeta| = 1`.
pub fn local_dirichlet_seminorm(f: &Polynomial, zeta: Complex64) -> Result<f64> {
    if !((zeta.norm() - 1.0).abs() <= UNIMODULAR_TOL) {
        return domain(format!("zeta must lie on the unit circle, |zeta| = {}", zeta.norm()));
    }
    if zeta == Complex64::new(1.0, 0.0) {
        return Ok(tail_transform(f).norm_sqr());
    }
    Ok(tail_transform(&f.rotated(zeta)).norm_sqr())
}

fn d1(f: &Polynomial) -> f64 {
    tail_transform(f).norm_sqr()
}

/// Coefficientwise product, truncated to the shorter operand.
pub fn hadamard_product(f: &Polynomial, g: &Polynomial) -> Polynomial {
    Polynomial { coeffs: f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b).collect() }
}

/// `D_1(sigma f) / D_1(f)` for non-constant `f`.
pub fn rayleigh_quotient(kernel: &CesaroKernel, f: &Polynomial) -> Result<f64> {
    let denom = d1(f);
    if denom == 0.0 {
        return domain("Rayleigh quotient is undefined for constant polynomials");
    }
    let image = Polynomial::new(kernel.apply(f.coeffs()));
    Ok(d1(&image) / denom)
}

/// Polynomial whose tail vector is the power-iteration witness, so its
/// Rayleigh quotient reproduces the computed `norm^2`.
pub fn extremal_candidate(kernel: &CesaroKernel, result: &NormResult) -> Result<Polynomial> {
    if result.witness.len() != kernel.n() + 1 {
        return Err(Error::Dimension { expected: kernel.n() + 1, got: result.witness.len() });
    }
    if result.witness.iter().all(|&w| w == 0.0) {
        return domain("witness vector is zero");
    }
    let tail = TailVector { t: result.witness.iter().map(|&w| Complex64::new(w, 0.0)).collect() };
    Ok(tail.reconstruct())
}

/// `n z^{n+1} - (n+1) z^n + 1`, extremal for the partial-sum operator.
pub fn partial_sum_maximizer(n: usize) -> Polynomial {
    let mut a = vec![0.0; n + 2];
    a[0] = 1.0;
    a[n] -= n as f64 + 1.0;
    a[n + 1] = n as f64;
    Polynomial::from_real(&a)
}

/// `z^{n+1} - (n+1) z + n`, extremal for the Fejer means.
pub fn fejer_maximizer(n: usize) -> Polynomial {
    let mut a = vec![0.0; n + 2];
    a[0] = n as f64;
    a[1] -= n as f64 + 1.0;
    a[n + 1] += 1.0;
    Polynomial::from_real(&a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cesaro::coefficients;
    use crate::hadamard::MultiplierOperator;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn tail_examples() {
        assert_eq!(tail_transform(&Polynomial::from_real(&[0.0, 1.0])).t, vec![re(1.0)]);
        let t = tail_transform(&Polynomial::monomial(6));
        assert_eq!(t.t, vec![re(1.0); 6]);
        assert_eq!(t.norm_sqr(), 6.0);

        let n = 5;
        let t = tail_transform(&partial_sum_maximizer(n));
        let mut want = vec![re(-1.0); n];
        want.push(re(n as f64));
        assert_eq!(t.t, want);
    }

    #[test]
    fn reconstruction_round_trip() {
        let f = Polynomial::from_real(&[0.0, 2.0, -1.0, 0.5, 3.0]);
        assert_eq!(tail_transform(&f).reconstruct(), f);
    }

    #[test]
    fn seminorm_examples() {
        let one = re(1.0);
        assert_eq!(local_dirichlet_seminorm(&Polynomial::from_real(&[4.0]), one).unwrap(), 0.0);
        assert_eq!(local_dirichlet_seminorm(&Polynomial::default(), one).unwrap(), 0.0);
        for theta in [0.0, 0.3, 2.0, -1.1, std::f64::consts::PI] {
            let z = Complex64::from_polar(1.0, theta);
            let d = local_dirichlet_seminorm(&Polynomial::monomial(7), z).unwrap();
            assert!((d - 7.0).abs() < 1e-12, "theta={theta}: {d}");
        }
        for n in [1usize, 4, 30] {
            let d = local_dirichlet_seminorm(&fejer_maximizer(n), one).unwrap();
            assert_eq!(d, (n * n + n) as f64);
        }
        assert!(local_dirichlet_seminorm(&Polynomial::monomial(2), re(0.5)).is_err());
    }

    #[test]
    fn hadamard_examples() {
        let f = Polynomial::from_real(&[2.0, 3.0, 4.0]);
        let unit = Polynomial::from_real(&[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(hadamard_product(&f, &unit), Polynomial::from_real(&[2.0, 0.0, 0.0]));

        let g = Polynomial::from_real(&[1.0, -2.0, 5.0, 7.0, 9.0]);
        let dirichlet = Polynomial::from_real(&[1.0; 3]);
        let s2 = coefficients(2, 0.0).unwrap().apply(g.coeffs());
        assert_eq!(hadamard_product(&dirichlet, &g).coeffs(), &s2[..]);

        let fejer = Polynomial::from_real(coefficients(3, 1.0).unwrap().coeffs());
        let sigma = coefficients(3, 1.0).unwrap().apply(g.coeffs());
        assert_eq!(hadamard_product(&fejer, &g).coeffs(), &sigma[..]);
    }

    #[test]
    fn maximizers_are_sharp() {
        for n in [2usize, 5, 10, 50] {
            let nf = n as f64;
            let k0 = coefficients(n, 0.0).unwrap();
            let f = partial_sum_maximizer(n);
            let image = Polynomial::new(k0.apply(f.coeffs()));
            assert_eq!(d1(&image), nf * (nf + 1.0) * (nf + 1.0));
            assert_eq!(d1(&f), nf * nf + nf);
            assert!((rayleigh_quotient(&k0, &f).unwrap() - (nf + 1.0)).abs() < 1e-12);

            let k1 = coefficients(n, 1.0).unwrap();
            let f = fejer_maximizer(n);
            let q = rayleigh_quotient(&k1, &f).unwrap();
            assert!((q - nf / (nf + 1.0)).abs() < 1e-12, "n={n}: {q}");
        }
    }

    #[test]
    fn constant_has_no_quotient() {
        let k = coefficients(3, 0.5).unwrap();
        assert!(rayleigh_quotient(&k, &Polynomial::from_real(&[2.0, 0.0])).is_err());
    }

    #[test]
    fn extremal_candidates_reach_the_norm() {
        for (n, a) in [(2usize, 0.0), (2, 1.0), (5, 0.5), (40, 0.3)] {
            let k = coefficients(n, a).unwrap();
            let r = MultiplierOperator::from_kernel(&k).operator_norm(1e-13, 100_000).unwrap();
            let f = extremal_candidate(&k, &r).unwrap();
            assert_eq!(f.coeffs()[0], re(0.0));
            let q = rayleigh_quotient(&k, &f).unwrap();
            assert!((q - r.norm_sq).abs() <= 1e-10 * r.norm_sq, "n={n} a={a}");
        }
        let zero = NormResult {
            norm: 0.0,
            norm_sq: 0.0,
            iterations: 0,
            residual: 0.0,
            converged: true,
            witness: vec![0.0; 3],
        };
        let k = coefficients(2, 0.5).unwrap();
        assert!(extremal_candidate(&k, &zero).is_err());
        let short = NormResult { witness: vec![1.0], ..zero };
        assert!(extremal_candidate(&k, &short).is_err());
    }
}
