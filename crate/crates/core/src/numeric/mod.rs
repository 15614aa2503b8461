//! Floating-point perimeter engines and the error sweep.
//!
//! Two independent perimeter routes are provided: the arithmetic-geometric
//! mean with the `c_n²` correction sum, and direct summation of the series
//! `π (a + b) Σ binom(1/2, n)² λ^{2n}`. The normalized perimeter excess `h` is
//! computed by an AGM iteration on deviations from 1, which keeps full
//! relative precision as `λ → 0`; the sweep runs it in double-double so that
//! the `h⁶/32` error term is resolved down to `λ ≈ 0.008`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use thiserror::Error;

pub mod dd;

use dd::{DoubleDouble, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("invalid ellipse semiaxes a = {a}, b = {b} (need a >= b >= 0, a > 0)")]
    InvalidEllipse { a: f64, b: f64 },
    #[error("invalid precision config: {0}")]
    InvalidConfig(&'static str),
    #[error("{engine} did not converge in {max_iter} iterations")]
    NoConvergence {
        engine: &'static str,
        max_iter: usize,
    },
    #[error("{what} = {value} outside [{min}, {max}]")]
    Domain {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error(
        "perimeter {perimeter} is {side} the admissible range [{min}, {max}] for a + b = {sum}"
    )]
    OutOfRange {
        perimeter: f64,
        sum: f64,
        side: BracketSide,
        min: f64,
        max: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketSide {
    /// Shorter than the circle of the same `a + b`.
    Below,
    /// Longer than the flattened ellipse of the same `a + b`.
    Above,
}

impl std::fmt::Display for BracketSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BracketSide::Below => "below",
            BracketSide::Above => "above",
        })
    }
}

/// Semiaxes with `a >= b >= 0` and `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    a: f64,
    b: f64,
}

impl Ellipse {
    pub fn new(a: f64, b: f64) -> Result<Self, NumericError> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b >= 0.0 && a >= b) {
            return Err(NumericError::InvalidEllipse { a, b });
        }
        Ok(Ellipse { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionConfig {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl PrecisionConfig {
    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self, NumericError> {
        if !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(NumericError::InvalidConfig(
                "abs_tol must be positive and finite",
            ));
        }
        if max_iter == 0 {
            return Err(NumericError::InvalidConfig("max_iter must be at least 1"));
        }
        Ok(PrecisionConfig { abs_tol, max_iter })
    }

    /// Defaults for the series engine, which converges only geometrically.
    pub fn for_series() -> Self {
        PrecisionConfig {
            abs_tol: 1e-14,
            max_iter: 10_000,
        }
    }
}

impl Default for PrecisionConfig {
    /// AGM defaults: `abs_tol = 1e-14`, `max_iter = 64`.
    fn default() -> Self {
        PrecisionConfig {
            abs_tol: 1e-14,
            max_iter: 64,
        }
    }
}

/// `λ = (a - b) / (a + b)`.
pub fn lambda_of(e: &Ellipse) -> f64 {
    (e.a - e.b) / (e.a + e.b)
}

/// Perimeter by the arithmetic-geometric mean,
/// `L = 2π (a² - Σ_{n≥0} 2^{n-1} c_n²) / M(a, b)`, with `c_0² = a² - b²` and
/// `c_{n+1} = (a_n - b_n)/2`.
pub fn perimeter_agm(e: &Ellipse, cfg: &PrecisionConfig) -> Result<f64, NumericError> {
    let (a, b) = (e.a, e.b);
    if b == 0.0 {
        return Ok(4.0 * a);
    }
    let mut an = a;
    let mut bn = b;
    let mut weight = 0.5;
    let mut sum = weight * (a - b) * (a + b);
    for _ in 0..cfg.max_iter {
        let c = 0.5 * (an - bn);
        if c.abs() <= cfg.abs_tol * an {
            let m = 0.5 * (an + bn);
            return Ok(2.0 * PI * (a * a - sum) / m);
        }
        let a_next = 0.5 * (an + bn);
        bn = (an * bn).sqrt();
        an = a_next;
        weight *= 2.0;
        sum += weight * c * c;
    }
    Err(NumericError::NoConvergence {
        engine: "AGM perimeter",
        max_iter: cfg.max_iter,
    })
}

/// Perimeter by summing `π (a + b) Σ binom(1/2, n)² λ^{2n}`.
///
/// Consecutive terms shrink by more than `λ²`, so after term `t_n` the tail
/// is below `t_n λ²/(1 - λ²)`; summation stops once that bound, in length
/// units, is under `abs_tol`.
pub fn perimeter_series(e: &Ellipse, cfg: &PrecisionConfig) -> Result<f64, NumericError> {
    let scale = PI * (e.a + e.b);
    let x = lambda_of(e).powi(2);
    if x == 0.0 {
        return Ok(scale);
    }
    // Neumaier summation; all terms are positive but span many magnitudes.
    let mut sum = 1.0f64;
    let mut comp = 0.0f64;
    let mut term = 1.0f64;
    for n in 1..=cfg.max_iter {
        let r = (2.0 * n as f64 - 3.0) / (2.0 * n as f64);
        term *= r * r * x;
        let t = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
        let tail = term * x / (1.0 - x);
        if scale * tail <= cfg.abs_tol {
            return Ok(scale * (sum + comp));
        }
    }
    Err(NumericError::NoConvergence {
        engine: "series perimeter",
        max_iter: cfg.max_iter,
    })
}

/// `h(λ) = L / (π (a + b)) - 1`, by an AGM run on deviations from 1.
///
/// Scaling to `a + b = 2` gives `a_0 = 1 + λ`, `b_0 = 1 - λ`, so `a_1 = 1`,
/// `b_1 = sqrt(1 - λ²)`, `c_1 = λ`, and the first two correction terms cancel
/// against `a_0²`: `1 + h = (1 - S) / M` with `S = Σ_{n≥2} 2^{n-1} c_n²`. The
/// iteration tracks `α_n = a_n - 1`, `β_n = b_n - 1` and uses
/// `c_{n+1} = c_n² / (4 a_{n+1})`, so nothing cancels catastrophically and
/// `h = -(S + μ)/(1 + μ)` with `μ = M - 1` keeps full relative precision.
pub(crate) fn h_from_lambda<T: Real>(lambda: T, max_iter: usize) -> Result<T, NumericError> {
    let one = T::one();
    let two = T::from_f64(2.0);
    if lambda == T::zero() {
        return Ok(T::zero());
    }
    if lambda >= one {
        return Ok(T::from_f64(4.0) / T::pi() - one);
    }
    let l2 = lambda * lambda;
    let b1 = ((one - lambda) * (one + lambda)).sqrt();
    let mut alpha = T::zero();
    let mut beta = -l2 / (one + b1);
    let mut c = lambda;
    let mut weight = one;
    let mut s = T::zero();
    let tol = T::from_f64(T::EPSILON) * l2;
    for _ in 0..max_iter {
        let alpha_next = (alpha + beta) / two;
        let p = alpha + beta + alpha * beta;
        let beta_next = p / (one + (one + p).sqrt());
        c = c * c / (T::from_f64(4.0) * (one + alpha_next));
        weight = weight * two;
        let term = weight * c * c;
        s = s + term;
        alpha = alpha_next;
        beta = beta_next;
        if term <= tol && (alpha - beta).abs() <= tol {
            let mu = (alpha + beta) / two;
            return Ok(-(s + mu) / (one + mu));
        }
    }
    Err(NumericError::NoConvergence {
        engine: "AGM excess",
        max_iter,
    })
}

/// `h = L / (π (a + b)) - 1`, in `[0, 4/π - 1]`.
pub fn h_of(e: &Ellipse, cfg: &PrecisionConfig) -> Result<f64, NumericError> {
    h_from_lambda(lambda_of(e), cfg.max_iter)
}

/// `4h - 3h² / (2 + sqrt(1 - 3h))`, radicand clamped at zero.
pub(crate) fn closed_form<T: Real>(h: T) -> T {
    let one = T::one();
    let three = T::from_f64(3.0);
    let mut radicand = one - three * h;
    if radicand < T::zero() {
        radicand = T::zero();
    }
    T::from_f64(4.0) * h - three * h * h / (T::from_f64(2.0) + radicand.sqrt())
}

/// The closed-form approximation to `λ²`, defined for `0 <= h <= 1/3`.
pub fn ramanujan_lambda_sq(h: f64) -> Result<f64, NumericError> {
    if !(0.0..=1.0 / 3.0).contains(&h) {
        return Err(NumericError::Domain {
            what: "h",
            value: h,
            min: 0.0,
            max: 1.0 / 3.0,
        });
    }
    Ok(closed_form(h))
}

/// One row of the error sweep. `diff = lambda_sq_true - lambda_sq_approx` and
/// `normalized = 32 diff / h⁶` are computed in double-double before rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub lambda: f64,
    pub h: f64,
    pub lambda_sq_true: f64,
    pub lambda_sq_approx: f64,
    pub diff: f64,
    pub normalized: f64,
}

/// Bound on the double-double rounding error of `diff`, in units of `λ²`.
const DIFF_NOISE_ULPS: f64 = 64.0;

impl ErrorRow {
    /// Whether `diff` is large enough, relative to double-double rounding, for
    /// `normalized` to carry three or more correct digits. False below
    /// `λ ≈ 0.008`, where `h⁶/32` approaches the working precision of `λ²`.
    pub fn is_resolved(&self) -> bool {
        if self.lambda == 0.0 {
            return true;
        }
        let noise = DIFF_NOISE_ULPS * DoubleDouble::EPSILON * self.lambda_sq_true;
        let signal = self.h.powi(6) / 32.0;
        noise <= 1e-3 * signal
    }
}

/// Error rows for each `λ` in `[0, 1)`, in input order. `λ²` is exact on the
/// grid; `h` comes from the AGM.
pub fn error_sweep(
    lambda_grid: &[f64],
    cfg: &PrecisionConfig,
) -> Result<Vec<ErrorRow>, NumericError> {
    lambda_grid.iter().map(|&l| error_row(l, cfg)).collect()
}

fn error_row(lambda: f64, cfg: &PrecisionConfig) -> Result<ErrorRow, NumericError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(NumericError::Domain {
            what: "lambda",
            value: lambda,
            min: 0.0,
            max: 1.0,
        });
    }
    let l = DoubleDouble::from(lambda);
    let h = h_from_lambda(l, cfg.max_iter)?;
    let l2 = DoubleDouble::from_prod(lambda, lambda);
    let approx = closed_form(h);
    let diff = l2 - approx;
    let normalized = if lambda == 0.0 {
        // Limit as h -> 0.
        -1.0
    } else {
        (diff * DoubleDouble::from(32.0) / h.powi(6)).to_f64()
    };
    Ok(ErrorRow {
        lambda,
        h: h.to_f64(),
        lambda_sq_true: l2.to_f64(),
        lambda_sq_approx: approx.to_f64(),
        diff: diff.to_f64(),
        normalized,
    })
}

/// `steps + 1` evenly spaced points from `min` to `max` inclusive.
pub fn uniform_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    let width = max - min;
    (0..=steps)
        .map(|i| {
            if i == steps {
                max
            } else {
                min + width * i as f64 / steps as f64
            }
        })
        .collect()
}

/// `|normalized + 1|` bound for `0 < λ <= 0.2`.
pub const LAW_TOL_LAMBDA_02: f64 = 0.15;
/// `|normalized + 1|` bound for `0 < λ <= 0.05`.
pub const LAW_TOL_LAMBDA_005: f64 = 0.02;

/// Rows that break the small-`h` law `normalized ≈ -1`. Only resolved rows
/// with `λ <= 0.2` are checked; the bound tightens to
/// [`LAW_TOL_LAMBDA_005`] for `λ <= 0.05`.
pub fn asymptotic_law_violations(rows: &[ErrorRow]) -> Vec<ErrorRow> {
    rows.iter()
        .filter(|r| r.lambda <= 0.2 && r.is_resolved())
        .filter(|r| {
            let tol = if r.lambda <= 0.05 {
                LAW_TOL_LAMBDA_005
            } else {
                LAW_TOL_LAMBDA_02
            };
            (r.normalized + 1.0).abs() > tol
        })
        .copied()
        .collect()
}

pub const SWEEP_TSV_HEADER: &str = "lambda\th\tlambda_sq_true\tlambda_sq_approx\tdiff\tnormalized";

/// 17 significant digits, which round-trips every `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sweep_tsv(rows: &[ErrorRow]) -> String {
    let mut out = String::from(SWEEP_TSV_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.lambda,
            r.h,
            r.lambda_sq_true,
            r.lambda_sq_approx,
            r.diff,
            r.normalized,
        ];
        let line: Vec<String> = fields.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(out, "{}", line.join("\t")).unwrap();
    }
    out
}

/// Result of recovering semiaxes from a perimeter and `a + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub ellipse: Ellipse,
    pub lambda: f64,
    pub h: f64,
    /// The closed form gave `λ > 1` (it overestimates near the flat end) and
    /// `λ` was clamped to 1.
    pub clamped: bool,
}

/// Semiaxes from the perimeter `L` and `s = a + b`, through the closed form.
///
/// Requires `π s <= L <= 4 s`, the circle and the flattened ellipse.
pub fn invert_from_measurements(perimeter: f64, sum: f64) -> Result<Inversion, NumericError> {
    if !(sum.is_finite() && sum > 0.0) {
        return Err(NumericError::Domain {
            what: "a + b",
            value: sum,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    let min = PI * sum;
    let max = 4.0 * sum;
    let out_of_range = |side| NumericError::OutOfRange {
        perimeter,
        sum,
        side,
        min,
        max,
    };
    if perimeter.is_nan() || perimeter < min {
        return Err(out_of_range(BracketSide::Below));
    }
    if perimeter > max {
        return Err(out_of_range(BracketSide::Above));
    }
    let h = (perimeter / min - 1.0).max(0.0);
    let lambda_raw = closed_form(h).sqrt();
    let clamped = lambda_raw > 1.0;
    let lambda = lambda_raw.min(1.0);
    let ellipse = Ellipse::new(0.5 * sum * (1.0 + lambda), 0.5 * sum * (1.0 - lambda))?;
    Ok(Inversion {
        ellipse,
        lambda,
        h,
        clamped,
    })
}
