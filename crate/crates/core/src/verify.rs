//! Self-verification suites run by `cesaro verify`.
//!
//! `paper` reproduces exact values and inequalities, `properties` runs the
//! oracle cross-checks and invariants on seeded random inputs, and
//! `asymptotics` runs a reduced sweep through [`sweep::trend_check`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{self, ProofRegime};
use crate::cesaro::{self, CesaroKernel};
use crate::dirichlet::{self, Polynomial};
use crate::hadamard::MultiplierOperator;
use crate::specfun;
use crate::sweep::{self, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Paper,
    Properties,
    Asymptotics,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Suite::Paper),
            "properties" => Ok(Suite::Properties),
            "asymptotics" => Ok(Suite::Asymptotics),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite {other:?} (paper|properties|asymptotics|all)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    /// Extend the asymptotic sweep from 2^14 to 2^20.
    pub deep: bool,
    pub workers: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { deep: false, workers: 1 }
    }
}

pub fn run(suite: Suite, options: VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Paper | Suite::All) {
        checks.extend(paper_checks());
    }
    if matches!(suite, Suite::Properties | Suite::All) {
        checks.extend(property_checks());
    }
    if matches!(suite, Suite::Asymptotics | Suite::All) {
        checks.extend(asymptotic_checks(options));
    }
    checks
}

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), passed, detail: detail.into() }
}

fn kernel(n: usize, a: f64) -> CesaroKernel {
    cesaro::coefficients(n, a).expect("order within [0, 1]")
}

fn norm_sq(n: usize, a: f64, tol: f64) -> Option<f64> {
    MultiplierOperator::from_kernel(&kernel(n, a)).operator_norm(tol, 200_000).ok().map(|r| r.norm_sq)
}

fn paper_checks() -> Vec<Check> {
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in [1usize, 2, 5, 10, 100, 1000] {
        let nf = n as f64;
        for (a, want) in [(0.0, nf + 1.0), (1.0, nf / (nf + 1.0))] {
            match norm_sq(n, a, 1e-13) {
                Some(got) => worst = worst.max(((got - want) / want).abs()),
                None => ok = false,
            }
        }
    }
    out.push(check("endpoint norms", ok && worst <= 1e-9, format!("max rel err {worst:.2e}")));

    let mut worst: f64 = 0.0;
    for n in [2usize, 5, 10, 50] {
        let nf = n as f64;
        let q0 = dirichlet::rayleigh_quotient(&kernel(n, 0.0), &dirichlet::partial_sum_maximizer(n));
        let q1 = dirichlet::rayleigh_quotient(&kernel(n, 1.0), &dirichlet::fejer_maximizer(n));
        worst = worst.max((q0.unwrap_or(f64::NAN) - (nf + 1.0)).abs());
        worst = worst.max((q1.unwrap_or(f64::NAN) - nf / (nf + 1.0)).abs());
    }
    out.push(check("maximizer sharpness", worst <= 1e-12, format!("max abs err {worst:.2e}")));

    let mut worst: f64 = 0.0;
    let mut below = true;
    for n in 2..=64usize {
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let op = MultiplierOperator::from_kernel(&kernel(n, a));
            for k in 1..=op.dimension() {
                let scale = op.diagonal()[k - 1].abs().max(1.0);
                worst = worst.max(op.eigen_check(k).unwrap_or(f64::NAN) / scale);
            }
            if n % 16 == 0 {
                let norm = op.operator_norm(1e-12, 200_000).map(|r| r.norm).unwrap_or(0.0);
                below &= norm >= n as f64 / (n as f64 + a) - 1e-12;
            }
        }
    }
    out.push(check(
        "eigenvalue lemma",
        worst <= 1e-14 && below,
        format!("max scaled residual {worst:.2e}, norm >= c_1: {below}"),
    ));

    let mut strict = true;
    for x in [0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4] {
        for a in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let (lo, hi) = specfun::gautschi_bounds(x, a).expect("valid grid");
            let r = (specfun::log_gamma(x + a).unwrap() - specfun::log_gamma(x + 1.0).unwrap()).exp();
            strict &= lo < r && r < hi;
        }
    }
    out.push(check("Gautschi bracket", strict, "35-point grid"));

    let half = kernel(2, 0.5);
    let want = [1.0, 0.8, 8.0 / 15.0];
    let err = half.coeffs().iter().zip(want).map(|(c, w)| (c - w).abs()).fold(0.0, f64::max);
    out.push(check("half-order coefficients", err < 1e-15, format!("max abs err {err:.2e}")));

    let eq45 = bounds::closed_form_upper(10, 0.5).unwrap_or(f64::NAN);
    let want = PI / 4.0 * 11.0 / (10.5 * 10.5) * (1.0 + (9f64.ln() + 1.0) / PI);
    out.push(check("half-order upper closed form", (eq45 - want).abs() < 1e-15, format!("{eq45:.12}")));

    let ln_half = specfun::log_gamma(0.5).unwrap_or(f64::NAN);
    let err = (ln_half - PI.sqrt().ln()).abs();
    out.push(check("ln Gamma(1/2)", err < 1e-15, format!("abs err {err:.2e}")));

    let (low, high) = sweep::theorem3_bracket(0.75).unwrap_or((f64::NAN, f64::NAN));
    out.push(check(
        "limit bracket at 3/4",
        low == 1.0 && (high - 0.75 / 0.5f64.sqrt()).abs() < 1e-15,
        format!("[{low}, {high:.6}]"),
    ));

    out
}

fn random_complex(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn max_rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let len = a.len().max(b.len());
    let zero = Complex64::new(0.0, 0.0);
    (0..len)
        .map(|i| (a.get(i).copied().unwrap_or(zero) - b.get(i).copied().unwrap_or(zero)).norm())
        .fold(0.0, f64::max)
        / scale
}

fn property_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    let mut worst: f64 = 0.0;
    for n in 0..=200 {
        for a in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let rec = kernel(n, a);
            let gam = cesaro::coefficients_gamma(n, a).expect("valid order");
            for (x, y) in rec.coeffs().iter().zip(gam.coeffs()) {
                worst = worst.max(((x - y) / y).abs());
            }
        }
    }
    out.push(check("coefficient oracle", worst <= 1e-11, format!("max rel err {worst:.2e}")));

    let mut worst_mv: f64 = 0.0;
    let mut worst_adj: f64 = 0.0;
    for n in [1usize, 7, 50, 199] {
        for a in [0.0, 0.35, 0.5, 0.8, 1.0] {
            let op = MultiplierOperator::from_kernel(&kernel(n, a));
            let dense = op.dense().expect("small");
            let dim = op.dimension();
            let x = random_complex(&mut rng, dim);
            let y = random_complex(&mut rng, dim);
            let tx = op.matvec(&x).unwrap();
            let tty = op.matvec_adjoint(&y).unwrap();
            let dense_c = dense.map(|v| Complex64::new(v, 0.0));
            let dx = &dense_c * nalgebra::DVector::from_column_slice(&x);
            let dty = dense_c.transpose() * nalgebra::DVector::from_column_slice(&y);
            worst_mv = worst_mv.max(max_rel_diff(&tx, dx.as_slice()));
            worst_mv = worst_mv.max(max_rel_diff(&tty, dty.as_slice()));
            // <Tx, y> = <x, T^T y> for the real operator (bilinear form)
            let lhs: Complex64 = tx.iter().zip(&y).map(|(a, b)| a * b).sum();
            let rhs: Complex64 = x.iter().zip(&tty).map(|(a, b)| a * b).sum();
            worst_adj = worst_adj.max((lhs - rhs).norm() / lhs.norm().max(1e-300));
        }
    }
    out.push(check(
        "matrix-free vs dense",
        worst_mv <= 1e-13 && worst_adj <= 1e-13,
        format!("matvec {worst_mv:.2e}, adjoint identity {worst_adj:.2e}"),
    ));

    let mut worst: f64 = 0.0;
    for (n, a) in [(3usize, 0.0), (10, 0.25), (32, 0.5), (60, 0.9), (17, 1.0)] {
        let k = kernel(n, a);
        let op = MultiplierOperator::from_kernel(&k);
        for _ in 0..200 {
            let deg = rng.gen_range(0..=n + 1);
            let f = Polynomial::new(random_complex(&mut rng, deg + 1));
            let lhs = dirichlet::tail_transform(&Polynomial::new(k.apply(f.coeffs()))).t;
            let mut tail = dirichlet::tail_transform(&f).t;
            tail.resize(n + 1, Complex64::new(0.0, 0.0));
            let rhs = op.matvec(&tail).unwrap();
            worst = worst.max(max_rel_diff(&lhs, &rhs));
        }
    }
    out.push(check("tail intertwining", worst <= 1e-12, format!("max rel err {worst:.2e}")));

    let mut sandwich = true;
    let mut lemmas = true;
    for n in [2usize, 3, 7, 16, 64, 256, 1024] {
        for i in 0..=8 {
            let a = i as f64 / 8.0;
            let k = kernel(n, a);
            let b = bounds::bracket(&k).unwrap();
            let r = MultiplierOperator::from_kernel(&k).operator_norm(1e-12, 200_000);
            let nsq = match r {
                Ok(r) => r.norm_sq,
                Err(_) => {
                    sandwich = false;
                    continue;
                }
            };
            sandwich &= b.lower <= nsq + 1e-9 && nsq <= b.upper + 1e-9;
            if a > 0.0 && a < 1.0 {
                let e = bounds::diff_energy(&k).unwrap();
                let m = bounds::proof_m_choice(n, a, ProofRegime::for_alpha(a));
                lemmas &= e.total <= bounds::closed_form_upper(n, a).unwrap();
                lemmas &= bounds::closed_form_lower(n, a, m).unwrap() <= e.suffix_at(m);
            }
        }
    }
    out.push(check("bound sandwich", sandwich, "best_lower <= norm^2 <= (n+1)S"));
    out.push(check("closed-form bracketing", lemmas, "S <= upper estimate, lower estimate <= S~_m"));

    let mut worst_gap: f64 = 0.0;
    let mut ok = true;
    for a in [0.05, 0.1, 0.25, 0.4, 0.45] {
        let g = specfun::c_alpha_gamma(a);
        let s = specfun::c_alpha_series(a, 1_000_000);
        let q = specfun::c_alpha_quadrature(a, 1e-7);
        match (g, s, q) {
            (Ok(g), Ok(s), Ok(q)) => {
                let tol = s.tail_bound.max(1e-6);
                let gaps = [(g - q).abs(), (g - s.value).abs(), (q - s.value).abs()];
                ok &= gaps.iter().all(|&d| d <= tol);
                worst_gap = worst_gap.max((g - q).abs());
            }
            _ => ok = false,
        }
    }
    out.push(check("C_alpha three routes", ok, format!("max gamma/quadrature gap {worst_gap:.2e}")));

    let mut worst: f64 = 0.0;
    let mut x: f64 = 0.5;
    while x <= 1e6 {
        let next = specfun::log_gamma(x + 1.0).unwrap();
        let defect = (next - specfun::log_gamma(x).unwrap() - x.ln()).abs();
        if next != 0.0 {
            worst = worst.max(defect / next.abs());
        } else if defect != 0.0 {
            worst = f64::INFINITY;
        }
        x *= 1.0137;
    }
    out.push(check("ln Gamma recursion", worst <= 1e-12, format!("max scaled defect {worst:.2e}")));

    out
}

fn asymptotic_checks(options: VerifyOptions) -> Vec<Check> {
    let max_exp = if options.deep { 20 } else { 14 };
    let config = SweepConfig {
        alphas: vec![0.0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0],
        n_values: (10..=max_exp).map(|p| 1usize << p).collect(),
        workers: options.workers.max(1),
        ..SweepConfig::default()
    };
    let records = match sweep::run_sweep(&config) {
        Ok(r) => r,
        Err(e) => return vec![check("asymptotic sweep", false, e.to_string())],
    };
    let mut out = Vec::new();
    let bad: Vec<_> = records.iter().filter(|r| !r.sandwich_holds()).map(|r| (r.n, r.alpha)).collect();
    out.push(check("sweep sandwich", bad.is_empty(), format!("{} records, violations {bad:?}", records.len())));
    let tight: Vec<_> = records.iter().filter(|r| r.tol <= sweep::TIGHT_TOL).collect();
    let eig: Vec<_> = tight
        .iter()
        .filter(|r| r.norm < r.n as f64 / (r.n as f64 + r.alpha) - 1e-9)
        .map(|r| (r.n, r.alpha))
        .collect();
    out.push(check(
        "sweep norm >= c_1",
        eig.is_empty(),
        format!("{} tight-tolerance records, violations {eig:?}", tight.len()),
    ));
    match sweep::trend_check(&records) {
        Ok(reports) => {
            for r in reports {
                out.push(check(&format!("trend alpha={} ({})", r.alpha, r.regime), r.passed, r.detail));
            }
        }
        Err(e) => out.push(check("trend check", false, e.to_string())),
    }
    out
}
