//! Univariate transformations represented by their derivatives at zero.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{binomial, double_factorial_f64, factorial};

pub const DEFAULT_MAX_ORDER: usize = 64;

/// Relative term-magnitude stopping threshold shared by every series sum.
pub const SERIES_RTOL: f64 = 1e-14;

/// Hard cap on the odd index `k` in the `F_k` / `G_k` sums.
pub const MAX_ODD_INDEX: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
    General,
}

impl Parity {
    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
            Parity::General => "general",
        }
    }
}

/// Built-in transformations with known derivative sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Sin,
    Sinh,
    Cube,
    /// `x^(2l+1) / (2l+1)!`; `OddMonomial(0)` is the identity.
    OddMonomial(u32),
}

impl Builtin {
    pub fn parse(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "sin" => Ok(Builtin::Sin),
            "sinh" => Ok(Builtin::Sinh),
            "cube" => Ok(Builtin::Cube),
            "identity" | "id" => Ok(Builtin::OddMonomial(0)),
            other => other
                .strip_prefix("odd-monomial:")
                .or_else(|| other.strip_prefix("odd_monomial:"))
                .and_then(|l| l.parse::<u32>().ok())
                .map(Builtin::OddMonomial)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("unknown built-in function '{name}'"))
                }),
        }
    }

    pub fn name(self) -> String {
        match self {
            Builtin::Sin => "sin".into(),
            Builtin::Sinh => "sinh".into(),
            Builtin::Cube => "cube".into(),
            Builtin::OddMonomial(0) => "identity".into(),
            Builtin::OddMonomial(l) => format!("odd-monomial:{l}"),
        }
    }

    /// The exact function, not its truncated series.
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Builtin::Sin => x.sin(),
            Builtin::Sinh => x.sinh(),
            Builtin::Cube => x * x * x,
            Builtin::OddMonomial(l) => {
                let n = 2 * l + 1;
                x.powi(n as i32) / factorial(n)
            }
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Scalar map applied coordinatewise to Gaussian samples.
pub trait ScalarMap: Sync {
    fn apply(&self, x: f64) -> f64;
}

impl ScalarMap for Builtin {
    fn apply(&self, x: f64) -> f64 {
        self.eval(x)
    }
}

impl ScalarMap for DerivativeSeries {
    fn apply(&self, x: f64) -> f64 {
        self.taylor_eval(x)
    }
}

/// Derivatives `f^(k)(0)` for `k = 0..=max_order`, stored unnormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesFile", into = "SeriesFile")]
pub struct DerivativeSeries {
    name: Option<String>,
    derivs: Vec<f64>,
    parity: Parity,
    growth_bound: Option<f64>,
}

/// On-disk JSON form of a [`DerivativeSeries`].
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeriesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    parity: Parity,
    derivs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    growth_bound: Option<f64>,
}

impl TryFrom<SeriesFile> for DerivativeSeries {
    type Error = Error;

    fn try_from(file: SeriesFile) -> Result<Self> {
        let mut series = DerivativeSeries::new(file.derivs, file.parity)?;
        if let Some(bound) = file.growth_bound {
            series = series.with_growth_bound(bound)?;
        }
        series.name = file.name;
        Ok(series)
    }
}

impl From<DerivativeSeries> for SeriesFile {
    fn from(s: DerivativeSeries) -> Self {
        SeriesFile {
            name: s.name,
            parity: s.parity,
            derivs: s.derivs,
            growth_bound: s.growth_bound,
        }
    }
}

impl DerivativeSeries {
    pub fn new(derivs: Vec<f64>, parity: Parity) -> Result<Self> {
        if derivs.len() < 3 {
            return Err(Error::InvalidSeries(format!(
                "need derivatives through order 2 at least, got {} entries",
                derivs.len()
            )));
        }
        if let Some(k) = derivs.iter().position(|d| !d.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "derivative {k} is not finite"
            )));
        }
        if derivs[0] != 0.0 {
            return Err(Error::InvalidSeries(format!(
                "f(0) must be 0, got {}",
                derivs[0]
            )));
        }
        let violation = match parity {
            Parity::Odd => derivs
                .iter()
                .enumerate()
                .position(|(k, d)| k % 2 == 0 && *d != 0.0),
            Parity::Even => derivs
                .iter()
                .enumerate()
                .position(|(k, d)| k % 2 == 1 && *d != 0.0),
            Parity::General => None,
        };
        if let Some(k) = violation {
            return Err(Error::InvalidSeries(format!(
                "{} parity declared but derivative {k} is {}",
                parity.as_str(),
                derivs[k]
            )));
        }
        Ok(Self {
            name: None,
            derivs,
            parity,
            growth_bound: None,
        })
    }

    /// Attaches a uniform bound `N >= |f^(k)(0)|`; rejected if any stored derivative exceeds it.
    pub fn with_growth_bound(mut self, bound: f64) -> Result<Self> {
        if bound.is_nan() || bound < 0.0 {
            return Err(Error::InvalidSeries(format!(
                "growth bound {bound} must be >= 0"
            )));
        }
        if let Some(k) = self.derivs.iter().position(|d| d.abs() > bound) {
            return Err(Error::InvalidSeries(format!(
                "derivative {k} = {} exceeds growth bound {bound}",
                self.derivs[k]
            )));
        }
        self.growth_bound = Some(bound);
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn derivs(&self) -> &[f64] {
        &self.derivs
    }

    /// `f^(k)(0)`, zero beyond the truncation order.
    pub fn deriv(&self, k: usize) -> f64 {
        self.derivs.get(k).copied().unwrap_or(0.0)
    }

    pub fn max_order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn growth_bound(&self) -> Option<f64> {
        self.growth_bound
    }

    pub fn is_odd(&self) -> bool {
        self.parity == Parity::Odd
    }

    pub(crate) fn require_odd(&self) -> Result<()> {
        if self.is_odd() {
            Ok(())
        } else {
            Err(Error::NotOdd(self.parity.as_str()))
        }
    }

    /// Truncated Taylor polynomial `sum_k f^(k)(0) x^k / k!`.
    pub fn taylor_eval(&self, x: f64) -> f64 {
        // Horner on the normalized coefficients.
        (0..=self.max_order())
            .rev()
            .fold(0.0, |acc, k| acc * x + self.derivs[k] / factorial(k as u32))
    }
}

/// Exact derivative sequence at zero of a built-in.
pub fn make_builtin(builtin: Builtin, max_order: usize) -> Result<DerivativeSeries> {
    if max_order < 3 {
        return Err(Error::InvalidSeries(format!(
            "max_order must be at least 3, got {max_order}"
        )));
    }
    let mut derivs = vec![0.0; max_order + 1];
    let bound = match builtin {
        Builtin::Sin => {
            for (k, d) in derivs.iter_mut().enumerate().skip(1).step_by(2) {
                *d = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            }
            1.0
        }
        Builtin::Sinh => {
            for d in derivs.iter_mut().skip(1).step_by(2) {
                *d = 1.0;
            }
            1.0
        }
        Builtin::Cube => {
            derivs[3] = 6.0;
            6.0
        }
        Builtin::OddMonomial(l) => {
            let n = 2 * l as usize + 1;
            if n > max_order {
                return Err(Error::InvalidSeries(format!(
                    "max_order {max_order} cannot hold x^{n}"
                )));
            }
            derivs[n] = 1.0;
            1.0
        }
    };
    Ok(DerivativeSeries::new(derivs, Parity::Odd)?
        .with_growth_bound(bound)?
        .with_name(builtin.name()))
}

/// Derivatives of `g = f^2` at zero via the Leibniz rule, truncated at `f.max_order()`.
pub fn square_series(f: &DerivativeSeries) -> DerivativeSeries {
    square_series_to(f, f.max_order())
}

/// As [`square_series`] but kept up to `order`. At `2 * f.max_order()` this is
/// the exact square of the stored Taylor polynomial, which the variance needs.
pub(crate) fn square_series_to(f: &DerivativeSeries, order: usize) -> DerivativeSeries {
    let derivs: Vec<f64> = (0..=order)
        .map(|n| {
            (0..=n)
                .map(|p| binomial(n as u32, p as u32) * f.deriv(p) * f.deriv(n - p))
                .sum()
        })
        .collect();
    let parity = match f.parity {
        Parity::Odd | Parity::Even => Parity::Even,
        Parity::General => Parity::General,
    };
    DerivativeSeries {
        name: f.name.as_ref().map(|n| format!("({n})^2")),
        derivs,
        parity,
        growth_bound: None,
    }
}

/// `f^2` to the full degree of the stored polynomial; feeds the `b_n` coefficients.
pub(crate) fn variance_series(f: &DerivativeSeries) -> DerivativeSeries {
    square_series_to(f, 2 * f.max_order())
}

/// Accumulates a series under the shared term-magnitude rule. Exactly-zero
/// terms never terminate the sum, so sparse derivative sequences are safe.
pub(crate) fn sum_series(terms: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    for term in terms {
        sum += term;
        if term != 0.0 && term.abs() < SERIES_RTOL * (1.0 + sum.abs()) {
            break;
        }
    }
    sum
}

fn check_odd_index(k: i64) -> Result<usize> {
    if k < 1 || k % 2 == 0 {
        Err(Error::InvalidOrder(k))
    } else {
        Ok(k as usize)
    }
}

/// `F_k(x) = sum_u f^(2u+k)(0) x^u / u!`.
pub fn eval_f(f: &DerivativeSeries, k: i64, x: f64) -> Result<f64> {
    let k = check_odd_index(k)?;
    Ok(f_series(f, k, x))
}

pub(crate) fn f_series(f: &DerivativeSeries, k: usize, x: f64) -> f64 {
    if k > f.max_order() {
        return 0.0;
    }
    let n_terms = (f.max_order() - k) / 2 + 1;
    let mut power = 1.0;
    sum_series((0..n_terms).map(|u| {
        if u > 0 {
            power *= x / u as f64;
        }
        f.deriv(2 * u + k) * power
    }))
}

/// `G_k(x) = F_k(var_i x) F_k(var_j x)`.
pub fn eval_g(f: &DerivativeSeries, k: i64, var_i: f64, var_j: f64, x: f64) -> Result<f64> {
    let k = check_odd_index(k)?;
    if !(var_i > 0.0 && var_j > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "variances must be positive (got {var_i}, {var_j})"
        )));
    }
    Ok(g_series(f, k, var_i, var_j, x))
}

pub(crate) fn g_series(f: &DerivativeSeries, k: usize, var_i: f64, var_j: f64, x: f64) -> f64 {
    f_series(f, k, var_i * x) * f_series(f, k, var_j * x)
}

/// Mean-series coefficients `a_k` and variance-series coefficients `b_n`, even indices only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    /// `(k, a_k)` for even `k`.
    pub a: Vec<(usize, f64)>,
    /// `(n, b_n)` for even `n`.
    pub b: Vec<(usize, f64)>,
}

pub fn coefficient_table(f: &DerivativeSeries) -> CoefficientTable {
    let g = variance_series(f);
    // (k-1)!!/k! == 1/k!! for even k
    let a = (0..=f.max_order())
        .step_by(2)
        .map(|k| (k, f.deriv(k) / double_factorial_f64(k as i64)))
        .collect();
    let b = (0..=g.max_order())
        .step_by(2)
        .map(|n| (n, g.deriv(n) / double_factorial_f64(n as i64)))
        .collect();
    CoefficientTable { a, b }
}

/// Unit-variance coefficient of the linear covariance term, `F_1(1/2)^2`.
pub fn linear_coefficient(f: &DerivativeSeries) -> Result<f64> {
    f.require_odd()?;
    Ok(g_series(f, 1, 1.0, 1.0, 0.5))
}
