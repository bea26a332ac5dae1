//! Exact covariance of `Y = f(X)` for `X ~ N(0, Sigma)` and odd `f`.
//!
//! Off-diagonal entries use the closed form
//!
//! ```text
//! tau_ij = sum_{odd k} F_k(var_i / 2) F_k(var_j / 2) cov^k / k!
//! ```
//!
//! and diagonal entries use the `b_n` series of `g = f^2`. An independent
//! double series built directly on the Isserlis moments checks both.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::SymMatrix;
use crate::moments::{factorial, isserlis_bivariate, BivariateMomentQuery};
use crate::series::{
    coefficient_table, g_series, sum_series, variance_series, DerivativeSeries, MAX_ODD_INDEX,
};

/// Largest truncation order accepted by [`double_series_oracle`].
pub const ORACLE_MAX_ORDER: usize = 30;

fn check_variances(var_i: f64, var_j: f64) -> Result<()> {
    if var_i > 0.0 && var_j > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "variances must be positive (got {var_i}, {var_j})"
        )))
    }
}

/// Transformed off-diagonal covariance `tau_ij` for odd `f`.
pub fn transformed_offdiag(f: &DerivativeSeries, var_i: f64, var_j: f64, cov: f64) -> Result<f64> {
    f.require_odd()?;
    check_variances(var_i, var_j)?;
    if cov * cov > var_i * var_j * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "covariance {cov} violates Cauchy-Schwarz for variances {var_i}, {var_j}"
        )));
    }
    Ok(offdiag_unchecked(f, var_i, var_j, cov))
}

fn offdiag_unchecked(f: &DerivativeSeries, var_i: f64, var_j: f64, cov: f64) -> f64 {
    if cov == 0.0 {
        return 0.0;
    }
    let k_max = MAX_ODD_INDEX.min(f.max_order());
    sum_series(
        (1..=k_max)
            .step_by(2)
            .map(|k| g_series(f, k, var_i, var_j, 0.5) * cov.powi(k as i32) / factorial(k as u32)),
    )
}

/// Transformed variance `tau_ii = sum_{even n >= 2} b_n var^(n/2)`.
pub fn transformed_diag(f: &DerivativeSeries, var_i: f64) -> Result<f64> {
    check_variances(var_i, var_i)?;
    Ok(diag_unchecked(&variance_series(f), var_i))
}

fn diag_unchecked(g: &DerivativeSeries, var_i: f64) -> f64 {
    let table = coefficient_table_of_square(g);
    sum_series(
        table
            .iter()
            .filter(|(n, _)| *n >= 2)
            .map(|&(n, b)| b * var_i.powi((n / 2) as i32)),
    )
}

// b_n from an already squared series: (n-1)!! g^(n)(0) / n! == g^(n)(0) / n!!.
fn coefficient_table_of_square(g: &DerivativeSeries) -> Vec<(usize, f64)> {
    (0..=g.max_order())
        .step_by(2)
        .map(|n| {
            (
                n,
                g.deriv(n) / crate::moments::double_factorial_f64(n as i64),
            )
        })
        .collect()
}

/// Mean `E[f(X_i)] = sum_{even k} a_k var^(k/2)`; zero for odd `f`.
pub fn transformed_mean(f: &DerivativeSeries, var_i: f64) -> Result<f64> {
    check_variances(var_i, var_i)?;
    let table = coefficient_table(f);
    Ok(sum_series(
        table.a.iter().map(|&(k, a)| a * var_i.powi((k / 2) as i32)),
    ))
}

/// A validated input to [`transform_covariance`].
#[derive(Debug, Clone)]
pub struct TransformRequest {
    sigma: SymMatrix,
    f: DerivativeSeries,
}

impl TransformRequest {
    pub fn new(sigma: SymMatrix, f: DerivativeSeries) -> Result<Self> {
        sigma.cholesky()?;
        Ok(Self { sigma, f })
    }

    pub fn sigma(&self) -> &SymMatrix {
        &self.sigma
    }

    pub fn function(&self) -> &DerivativeSeries {
        &self.f
    }
}

/// Covariance of `f(X)`, assembled entrywise over the upper triangle.
pub fn transform_covariance(req: &TransformRequest) -> Result<SymMatrix> {
    transform_covariance_with(req, Execution::default())
}

pub fn transform_covariance_with(req: &TransformRequest, exec: Execution) -> Result<SymMatrix> {
    req.f.require_odd()?;
    let sigma = &req.sigma;
    let d = sigma.dim();
    let g = variance_series(&req.f);
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let values = exec.map_indexed(pairs.len(), |idx| {
        let (i, j) = pairs[idx];
        if i == j {
            diag_unchecked(&g, sigma.get(i, i))
        } else {
            offdiag_unchecked(&req.f, sigma.get(i, i), sigma.get(j, j), sigma.get(i, j))
        }
    });
    Ok(SymMatrix::from_upper_values(d, &values))
}

/// Truncated double series over the Isserlis moments, independent of the
/// closed form. The diagonal case is `var_i == var_j == cov`.
pub fn double_series_oracle(
    f: &DerivativeSeries,
    var_i: f64,
    var_j: f64,
    cov: f64,
    order: usize,
) -> Result<f64> {
    if order % 2 == 1 || order > ORACLE_MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "oracle order must be even and <= {ORACLE_MAX_ORDER} (got {order})"
        )));
    }
    let mut total = 0.0;
    for n in (2..=order).step_by(2) {
        for p in 0..=n {
            let coeff = f.deriv(p) * f.deriv(n - p);
            if coeff == 0.0 {
                continue;
            }
            let q = BivariateMomentQuery::new(p as u32, (n - p) as u32, var_i, var_j, cov)?;
            total +=
                coeff / (factorial(p as u32) * factorial((n - p) as u32)) * isserlis_bivariate(&q);
        }
    }
    Ok(total)
}

/// Advisory check of the bounded-derivative convergence hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// Largest marginal standard deviation.
    pub bound_m: f64,
    /// True when the series carries a uniform derivative bound.
    pub ok: bool,
}

pub fn convergence_check(f: &DerivativeSeries, sigma: &SymMatrix) -> ConvergenceReport {
    let bound_m = sigma
        .diagonal()
        .into_iter()
        .fold(0.0f64, |m, v| m.max(v.max(0.0).sqrt()));
    ConvergenceReport {
        bound_m,
        ok: f.growth_bound().is_some(),
    }
}
