//! Command-line front end for the `cesaro` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::bounds;
use crate::cesaro;
use crate::dirichlet::{self, Polynomial};
use crate::error::{Error, Result};
use crate::hadamard::MultiplierOperator;
use crate::specfun;
use crate::sweep::{self, SweepConfig};
use crate::verify::{self, Suite, VerifyOptions};

/// Largest degree accepted on the command line.
pub const MAX_DEGREE: usize = 1 << 22;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cesaro", version, about = "Operator norms of Cesaro means on the local Dirichlet space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoeffMethod {
    Recurrence,
    Gamma,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the multiplier coefficients c_0..c_n.
    Coeffs {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_alpha)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = CoeffMethod::Recurrence)]
        method: CoeffMethod,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the operator norm by power iteration.
    Norm {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_alpha)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = sweep::DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified upper and lower bounds on the squared norm.
    Bounds {
        /// Comma-separated degrees.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',', value_parser = parse_alpha, required = true)]
        alpha: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local Dirichlet seminorm of a polynomial, optionally with a Rayleigh quotient.
    Dirichlet {
        /// Taylor coefficients `re[:im],re[:im],...` starting at a_0.
        #[arg(allow_hyphen_values = true)]
        poly: String,
        /// Boundary point exp(i theta).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        zeta_arg: f64,
        /// `n,alpha` of a kernel for the quotient D_1(sigma f) / D_1(f).
        #[arg(long)]
        kernel: Option<String>,
    },
    /// C_alpha by the Gamma closed form, the series and quadrature.
    Constants {
        #[arg(long, value_parser = parse_alpha)]
        alpha: f64,
        #[arg(long, default_value_t = 1_000_000)]
        terms: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Norms and bounds over an (alpha, n) grid.
    Sweep {
        #[arg(long, value_delimiter = ',', value_parser = parse_alpha)]
        alphas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        n_values: Option<Vec<usize>>,
        /// Fixed tolerance; default is 1e-10 up to n = 8192 and 1e-6 above.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = sweep::DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Worker threads; defaults to CESARO_WORKERS or the core count.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        /// Extend the asymptotic sweep to n = 2^20.
        #[arg(long)]
        deep: bool,
        #[arg(long)]
        workers: Option<usize>,
    },
}

/// Accepts decimals and fractions such as `1/2`.
pub fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("invalid numerator in {s:?}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("invalid denominator in {s:?}"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            p / q
        }
        None => s.parse().map_err(|_| format!("invalid number {s:?}"))?,
    };
    if !value.is_finite() {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(value)
}

/// Parses `re[:im],re[:im],...`.
pub fn parse_polynomial(s: &str) -> Result<Polynomial> {
    let mut coeffs = Vec::new();
    for term in s.split(',') {
        let term = term.trim();
        let (re, im) = term.split_once(':').unwrap_or((term, "0"));
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Usage(format!("invalid coefficient {term:?}")))
        };
        coeffs.push(Complex64::new(parse(re)?, parse(im)?));
    }
    Ok(Polynomial::new(coeffs))
}

fn parse_kernel_spec(s: &str) -> Result<(usize, f64)> {
    let (n, a) = s
        .split_once(',')
        .ok_or_else(|| Error::Usage(format!("kernel must be `n,alpha`, got {s:?}")))?;
    let n = n.trim().parse().map_err(|_| Error::Usage(format!("invalid kernel degree {n:?}")))?;
    Ok((n, parse_alpha(a).map_err(Error::Usage)?))
}

fn guard_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::Resource(format!("n = {n} exceeds the limit {MAX_DEGREE}")));
    }
    Ok(())
}

fn env_workers() -> Result<Option<usize>> {
    match std::env::var("CESARO_WORKERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(Some(w)),
            _ => Err(Error::Usage(format!("CESARO_WORKERS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn resolve_workers(flag: Option<usize>) -> Result<usize> {
    let w = match flag {
        Some(w) => w,
        None => env_workers()?
            .unwrap_or_else(|| std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)),
    };
    if w == 0 {
        return Err(Error::Usage("workers must be positive".into()));
    }
    Ok(w)
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Usage(format!("invalid output path {}", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = std::fs::write(&tmp, contents).and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => Ok(out.write_all(contents.as_bytes())?),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn opt_float(x: Option<f64>) -> String {
    x.map(sweep::fmt_float).unwrap_or_default()
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Domain(_) | Error::Dimension { .. } | Error::Resource(_) | Error::Usage(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Coeffs { n, alpha, method, format, out: path } => {
            guard_degree(n)?;
            let kernel = match method {
                CoeffMethod::Recurrence => cesaro::coefficients(n, alpha)?,
                CoeffMethod::Gamma => cesaro::coefficients_gamma(n, alpha)?,
            };
            let text = match format {
                Format::Csv => {
                    let mut s = format!("{}\nk,c_k\n", sweep::CSV_SCHEMA_LINE);
                    for (k, c) in kernel.coeffs().iter().enumerate() {
                        s.push_str(&format!("{k},{}\n", sweep::fmt_float(*c)));
                    }
                    s
                }
                Format::Json => {
                    let rows: Vec<_> =
                        kernel.coeffs().iter().enumerate().map(|(k, c)| json!({"k": k, "c_k": c})).collect();
                    to_json(&json!({"n": n, "alpha": alpha, "coefficients": rows}))
                }
            };
            emit(out, path.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Norm { n, alpha, tol, max_iter, out: path } => {
            guard_degree(n)?;
            if !(tol > 0.0) || max_iter == 0 {
                return Err(Error::Usage("tol and max-iter must be positive".into()));
            }
            let op = MultiplierOperator::from_kernel(&cesaro::coefficients(n, alpha)?);
            let (result, failure) = match op.operator_norm(tol, max_iter) {
                Ok(r) => (r, None),
                Err(Error::NoConvergence(partial)) => {
                    let msg = Error::NoConvergence(partial.clone()).to_string();
                    (*partial, Some(msg))
                }
                Err(e) => return Err(e),
            };
            let text = to_json(&json!({
                "n": n,
                "alpha": alpha,
                "norm": result.norm,
                "norm_sq": result.norm_sq,
                "iterations": result.iterations,
                "residual": result.residual,
                "coeff_lower_bound": op.coeff_lower_bound(),
            }));
            emit(out, path.as_deref(), &text)?;
            match failure {
                Some(msg) => {
                    writeln!(err, "error: {msg}")?;
                    Ok(EXIT_FAILURE)
                }
                None => Ok(EXIT_OK),
            }
        }
        Command::Bounds { n, alpha, format, out: path } => {
            let mut rows = Vec::new();
            for &a in &alpha {
                for &deg in &n {
                    guard_degree(deg)?;
                    rows.push(bounds::bracket(&cesaro::coefficients(deg, a)?)?);
                }
            }
            let text = match format {
                Format::Csv => {
                    let mut s = format!(
                        "{}\nn,alpha,S,upper,best_lower,best_m,closed_upper,closed_lower_at_proof_m\n",
                        sweep::CSV_SCHEMA_LINE
                    );
                    for b in &rows {
                        s.push_str(&format!(
                            "{},{},{},{},{},{},{},{}\n",
                            b.n,
                            sweep::fmt_float(b.alpha),
                            sweep::fmt_float(b.diff_energy),
                            sweep::fmt_float(b.upper),
                            sweep::fmt_float(b.lower),
                            b.lower_m,
                            opt_float(b.closed_upper),
                            opt_float(b.closed_lower),
                        ));
                    }
                    s
                }
                Format::Json => to_json(&rows),
            };
            emit(out, path.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Dirichlet { poly, zeta_arg, kernel } => {
            if !zeta_arg.is_finite() {
                return Err(Error::Usage("zeta-arg must be finite".into()));
            }
            let f = parse_polynomial(&poly)?;
            let zeta = Complex64::from_polar(1.0, zeta_arg);
            let seminorm = dirichlet::local_dirichlet_seminorm(&f, zeta)?;
            let mut value = json!({"zeta_arg": zeta_arg, "degree": f.degree(), "seminorm": seminorm});
            if let Some(spec) = kernel {
                let (n, a) = parse_kernel_spec(&spec)?;
                guard_degree(n)?;
                let k = cesaro::coefficients(n, a)?;
                let rotated = f.rotated(zeta);
                value["kernel"] = json!({"n": n, "alpha": a});
                value["rayleigh_quotient"] = json!(dirichlet::rayleigh_quotient(&k, &rotated)?);
            }
            out.write_all(to_json(&value).as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Constants { alpha, terms, tol } => {
            let gamma = specfun::c_alpha_gamma(alpha)?;
            let series = specfun::c_alpha_series(alpha, terms)?;
            let morris = specfun::morris_integral(alpha, tol)?;
            let quadrature = specfun::c_alpha_quadrature(alpha, tol)?;
            let gap = (gamma - quadrature)
                .abs()
                .max((gamma - series.value).abs())
                .max((quadrature - series.value).abs());
            let text = to_json(&json!({
                "alpha": alpha,
                "gamma": gamma,
                "series": series.value,
                "series_terms": terms,
                "series_tail_bound": series.tail_bound,
                "quadrature": quadrature,
                "morris_integral": morris,
                "max_pairwise_gap": gap,
            }));
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Sweep { alphas, n_values, tol, max_iter, workers, format, out: path } => {
            let defaults = SweepConfig::default();
            let config = SweepConfig {
                alphas: alphas.unwrap_or(defaults.alphas),
                n_values: n_values.unwrap_or(defaults.n_values),
                tol,
                max_iter,
                workers: resolve_workers(workers)?,
            };
            config.validate()?;
            for &n in &config.n_values {
                guard_degree(n)?;
            }
            let records = sweep::run_sweep(&config)?;
            let text = match format {
                Format::Csv => sweep::to_csv(&records),
                Format::Json => sweep::to_json(&records),
            };
            emit(out, path.as_deref(), &text)?;
            let stalled = records.iter().filter(|r| !r.converged).count();
            if stalled > 0 {
                writeln!(err, "warning: {stalled} grid point(s) stopped at the iteration cap")?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite, deep, workers } => {
            let options = VerifyOptions { deep, workers: resolve_workers(workers)? };
            let checks = verify::run(suite, options);
            let failed = checks.iter().filter(|c| !c.passed).count();
            for c in &checks {
                writeln!(out, "{c}")?;
            }
            writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
            Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}
