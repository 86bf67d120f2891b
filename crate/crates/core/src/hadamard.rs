//! The upper-triangular multiplier matrix
//!
//! ```text
//!       | c1  c2-c1  c3-c2  c4-c3 ... |
//! T_c = | 0   c2     c3-c2  c4-c3 ... |
//!       | 0   0      c3     c4-c3 ... |
//! ```
//!
//! as a matrix-free operator, and its spectral norm by power iteration on
//! `T^T T`. Row `i` is `c_i` on the diagonal followed by the column differences
//! `c_j - c_{j-1}`, so both `T x` and `T^T x` reduce to one suffix or prefix
//! sum and cost O(N).

use std::ops::{Add, AddAssign, Mul};

use nalgebra::DMatrix;
use num_traits::Zero;

use crate::cesaro::CesaroKernel;
use crate::error::{domain, Error, Result};

/// Largest dimension [`MultiplierOperator::dense`] will materialize.
pub const DENSE_LIMIT: usize = 5000;

/// Scalar types the operator can act on (real or complex vectors).
pub trait Scalar: Copy + Zero + Add<Output = Self> + AddAssign + Mul<f64, Output = Self> {}

impl<T> Scalar for T where T: Copy + Zero + Add<Output = T> + AddAssign + Mul<f64, Output = T> {}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierOperator {
    /// `c_1..c_N`.
    diag: Vec<f64>,
    /// `off[j] = c_{j+1} - c_j` in zero-based column `j`; `off[0]` is unused and
    /// kept at zero because the first column has no entries above the diagonal.
    off: Vec<f64>,
}

impl MultiplierOperator {
    /// Operator of `sigma_n^a`: `c_1..c_n` followed by the explicit `c_{n+1} = 0`,
    /// so `N = n + 1`. Beyond that every entry of the infinite matrix vanishes.
    pub fn from_kernel(kernel: &CesaroKernel) -> Self {
        let n = kernel.n();
        let mut diag = Vec::with_capacity(n + 1);
        diag.extend_from_slice(&kernel.coeffs()[1..]);
        diag.push(0.0);
        let mut off = Vec::with_capacity(n + 1);
        off.push(0.0);
        off.extend(kernel.differences());
        MultiplierOperator { diag, off }
    }

    /// Operator for an arbitrary finite sequence `c_1..c_N`, everything past
    /// `c_N` taken as zero except that no extra column is added.
    pub fn from_coefficients(c: &[f64]) -> Self {
        let mut off = Vec::with_capacity(c.len());
        if !c.is_empty() {
            off.push(0.0);
        }
        off.extend(c.windows(2).map(|w| w[1] - w[0]));
        MultiplierOperator { diag: c.to_vec(), off }
    }

    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    /// `c_1..c_N`.
    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.dimension() {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.dimension(), got: len })
        }
    }

    pub fn matvec<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len())?;
        let mut y = vec![T::zero(); x.len()];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub fn matvec_adjoint<T: Scalar>(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len())?;
        let mut y = vec![T::zero(); x.len()];
        self.adjoint_into(x, &mut y);
        Ok(y)
    }

    /// `y_i = c_i x_i + sum_{j>i} (c_j - c_{j-1}) x_j`, one reverse pass.
    fn matvec_into<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        let mut suffix = T::zero();
        for i in (0..x.len()).rev() {
            y[i] = x[i] * self.diag[i] + suffix;
            suffix += x[i] * self.off[i];
        }
    }

    /// `y_j = c_j x_j + (c_j - c_{j-1}) sum_{i<j} x_i`, one forward pass.
    fn adjoint_into<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        let mut prefix = T::zero();
        for j in 0..x.len() {
            y[j] = x[j] * self.diag[j] + prefix * self.off[j];
            prefix += x[j];
        }
    }

    /// Explicit matrix, for oracles only.
    pub fn dense(&self) -> Result<DMatrix<f64>> {
        let n = self.dimension();
        if n > DENSE_LIMIT {
            return Err(Error::Resource(format!(
                "dense materialization limited to dimension {DENSE_LIMIT}, requested {n}"
            )));
        }
        Ok(DMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.diag[i],
            std::cmp::Ordering::Less => self.off[j],
            std::cmp::Ordering::Greater => 0.0,
        }))
    }

    /// `max_k |c_k|`, each `c_k` being an eigenvalue of the operator.
    pub fn coeff_lower_bound(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `||T v_k - c_k v_k||_inf` for `v_k = e_1 + ... + e_k`.
    pub fn eigen_check(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.dimension() {
            return domain(format!("eigenvector index must be in 1..={}, got {k}", self.dimension()));
        }
        let mut v = vec![0.0; self.dimension()];
        v[..k].fill(1.0);
        let tv = self.matvec(&v)?;
        let ck = self.diag[k - 1];
        Ok(tv.iter().zip(&v).map(|(t, v)| (t - ck * v).abs()).fold(0.0, f64::max))
    }

    fn is_zero(&self) -> bool {
        self.diag.iter().chain(&self.off).all(|&c| c == 0.0)
    }

    /// Largest singular value by power iteration on `x -> T^T (T x)`.
    ///
    /// Starts from the normalized all-ones vector and stops once the Rayleigh
    /// quotient `||T x||^2` changes by less than `tol` relative to itself. A
    /// second run from the alternating vector `(1, -1, 1, ...)` follows and
    /// the larger result is kept. For a Cesaro kernel the all-ones vector is
    /// `v_N`, an eigenvector for `c_{n+1} = 0`, so that second run is the one
    /// that finds the norm.
    ///
    /// `norm` is always `||T w||` for the returned unit witness `w`, hence a
    /// certified lower bound even when the iteration cap is hit; in that case
    /// the partial result travels inside [`Error::NoConvergence`].
    pub fn operator_norm(&self, tol: f64, max_iter: usize) -> Result<NormResult> {
        if !(tol > 0.0) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        if max_iter == 0 {
            return domain("max_iter must be at least 1");
        }
        let n = self.dimension();
        if n == 0 || self.is_zero() {
            let mut witness = vec![0.0; n];
            if let Some(w) = witness.first_mut() {
                *w = 1.0;
            }
            return Ok(NormResult {
                norm: 0.0,
                norm_sq: 0.0,
                iterations: 0,
                residual: 0.0,
                converged: true,
                witness,
            });
        }

        let scale = 1.0 / (n as f64).sqrt();
        let ones = vec![scale; n];
        let alternating: Vec<f64> =
            (0..n).map(|i| if i % 2 == 0 { scale } else { -scale }).collect();

        let first = self.power_iterate(ones, tol, max_iter);
        let second = self.power_iterate(alternating, tol, max_iter);
        let mut best = if second.norm_sq > first.norm_sq { second } else { first };
        best.iterations = best.iterations.max(1);
        if best.converged {
            Ok(best)
        } else {
            Err(Error::NoConvergence(Box::new(best)))
        }
    }

    fn power_iterate(&self, mut x: Vec<f64>, tol: f64, max_iter: usize) -> NormResult {
        let n = x.len();
        let mut tx = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut previous: Option<f64> = None;
        let mut residual = f64::INFINITY;
        let mut converged = false;
        let mut rq = 0.0;
        let mut iterations = 0;

        while iterations < max_iter {
            iterations += 1;
            self.matvec_into(&x, &mut tx);
            rq = dot(&tx, &tx);
            if let Some(p) = previous {
                residual = if rq > 0.0 { (rq - p).abs() / rq } else { 0.0 };
                if residual < tol {
                    converged = true;
                    break;
                }
            }
            previous = Some(rq);
            self.adjoint_into(&tx, &mut next);
            let len = dot(&next, &next).sqrt();
            if len == 0.0 {
                // x lies in the null space of T
                residual = 0.0;
                converged = true;
                break;
            }
            for (xi, ni) in x.iter_mut().zip(&next) {
                *xi = ni / len;
            }
        }
        if !converged {
            // The cap was reached after an update; evaluate the final iterate so
            // the reported norm belongs to the returned witness.
            self.matvec_into(&x, &mut tx);
            rq = dot(&tx, &tx);
        }
        NormResult { norm: rq.sqrt(), norm_sq: rq, iterations, residual, converged, witness: x }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spectral norm estimate with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct NormResult {
    pub norm: f64,
    pub norm_sq: f64,
    pub iterations: usize,
    /// Relative change of the Rayleigh quotient in the last iteration.
    pub residual: f64,
    pub converged: bool,
    /// Unit vector with `||T witness|| = norm`.
    pub witness: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cesaro::coefficients;
    use num_complex::Complex64;

    fn op(n: usize, a: f64) -> MultiplierOperator {
        MultiplierOperator::from_kernel(&coefficients(n, a).unwrap())
    }

    #[test]
    fn partial_sum_operator_layout() {
        let d = op(2, 0.0).dense().unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, -1.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0]);
        assert_eq!(d, want);
    }

    #[test]
    fn fejer_degree_one_layout() {
        let d = op(1, 1.0).dense().unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, 0.0, 0.0]);
        assert_eq!(d, want);
    }

    #[test]
    fn degree_zero_is_zero_operator() {
        let t = op(0, 0.6);
        assert_eq!(t.dimension(), 1);
        let r = t.operator_norm(1e-10, 10).unwrap();
        assert_eq!(r.norm, 0.0);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn matvec_examples() {
        let t = op(2, 0.0);
        assert_eq!(t.matvec(&[1.0, 1.0, 1.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert_eq!(t.matvec(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(matches!(t.matvec(&[1.0, 0.0]), Err(Error::Dimension { expected: 3, got: 2 })));
        assert!(t.matvec_adjoint(&[1.0; 4]).is_err());
    }

    #[test]
    fn adjoint_of_first_basis_vector_is_first_row() {
        let t = op(6, 0.4);
        let mut e1 = vec![0.0; 7];
        e1[0] = 1.0;
        let row = t.matvec_adjoint(&e1).unwrap();
        let d = t.dense().unwrap();
        for j in 0..7 {
            assert_eq!(row[j], d[(0, j)]);
        }
    }

    #[test]
    fn adjoint_matches_dense_on_fejer() {
        let t = op(2, 1.0);
        let x = [1.0, 1.0, 1.0];
        let want = t.dense().unwrap().transpose() * nalgebra::DVector::from_row_slice(&x);
        let got = t.matvec_adjoint(&x).unwrap();
        for i in 0..3 {
            assert!((got[i] - want[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn complex_vectors() {
        let t = op(4, 0.3);
        let x: Vec<Complex64> = (0..5).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let re: Vec<f64> = x.iter().map(|z| z.re).collect();
        let im: Vec<f64> = x.iter().map(|z| z.im).collect();
        let y = t.matvec(&x).unwrap();
        let (yr, yi) = (t.matvec(&re).unwrap(), t.matvec(&im).unwrap());
        for i in 0..5 {
            assert_eq!(y[i], Complex64::new(yr[i], yi[i]));
        }
    }

    #[test]
    fn exact_endpoint_norms_small() {
        let r = op(2, 0.0).operator_norm(1e-12, 10_000).unwrap();
        assert!((r.norm_sq - 3.0).abs() < 1e-9);
        let r = op(2, 1.0).operator_norm(1e-12, 10_000).unwrap();
        assert!((r.norm_sq - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn half_order_matches_dense_svd() {
        let t = op(2, 0.5);
        let svd = t.dense().unwrap().svd(false, false);
        let sigma = svd.singular_values.max();
        let r = t.operator_norm(1e-14, 10_000).unwrap();
        assert!((r.norm - sigma).abs() < 1e-9);
    }

    #[test]
    fn eigen_examples() {
        for (n, a, k) in [(5, 0.3, 1), (5, 0.3, 3), (4, 1.0, 4), (9, 0.0, 1)] {
            let t = op(n, a);
            let scale = t.diagonal()[k - 1].abs().max(1.0);
            assert!(t.eigen_check(k).unwrap() <= 1e-14 * scale);
        }
        assert!(op(3, 0.5).eigen_check(0).is_err());
        assert!(op(3, 0.5).eigen_check(5).is_err());
    }

    #[test]
    fn coefficient_lower_bound_examples() {
        for (n, a) in [(5usize, 0.3), (17, 0.75), (100, 0.5)] {
            let want = n as f64 / (n as f64 + a);
            assert!((op(n, a).coeff_lower_bound() - want).abs() < 1e-15);
        }
        assert_eq!(op(2, 0.0).coeff_lower_bound(), 1.0);
        assert!((op(3, 1.0).coeff_lower_bound() - 0.75).abs() < 1e-16);
    }

    #[test]
    fn witness_certifies_norm() {
        for (n, a) in [(10, 0.2), (33, 0.5), (64, 0.9)] {
            let t = op(n, a);
            let r = t.operator_norm(1e-12, 50_000).unwrap();
            let tw = t.matvec(&r.witness).unwrap();
            let len: f64 = tw.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(r.norm >= len - 1e-12);
            let wlen: f64 = r.witness.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((wlen - 1.0).abs() < 1e-12);
            assert!(r.norm >= t.coeff_lower_bound() - 1e-12);
        }
    }

    #[test]
    fn iteration_cap_reports_partial_result() {
        let t = op(500, 0.9);
        match t.operator_norm(1e-15, 3) {
            Err(Error::NoConvergence(partial)) => {
                assert_eq!(partial.iterations, 3);
                let tw = t.matvec(&partial.witness).unwrap();
                let len: f64 = tw.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((partial.norm - len).abs() < 1e-12);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn dense_guard() {
        let t = MultiplierOperator::from_coefficients(&vec![1.0; DENSE_LIMIT + 1]);
        assert!(matches!(t.dense(), Err(Error::Resource(_))));
    }

    #[test]
    fn invalid_solver_parameters() {
        let t = op(3, 0.5);
        assert!(t.operator_norm(0.0, 10).is_err());
        assert!(t.operator_norm(1e-8, 0).is_err());
    }
}
