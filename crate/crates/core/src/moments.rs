//! Moments of mean-zero Gaussians.
//!
//! All moments are parameterized by variances and covariances (the diagonal
//! and off-diagonal entries of the covariance matrix), never by standard
//! deviations.

use crate::error::{Error, Result};

/// Largest argument for which the integer combinatorics are carried out
/// exactly in 128-bit arithmetic before conversion to `f64`.
pub const EXACT_COMBINATORICS_LIMIT: u32 = 33;

/// Largest total order `p + q` accepted by [`isserlis_oracle`].
pub const ORACLE_MAX_ORDER: u32 = 16;

/// `k!!`, with the conventions `(-1)!! = 0!! = 1`.
pub fn double_factorial(k: i64) -> Result<u128> {
    if k < -1 {
        return Err(Error::InvalidArgument(format!(
            "double factorial undefined for {k}"
        )));
    }
    let mut acc: u128 = 1;
    let mut m = k;
    while m > 1 {
        acc = acc
            .checked_mul(m as u128)
            .ok_or_else(|| Error::InvalidArgument(format!("{k}!! overflows 128-bit arithmetic")))?;
        m -= 2;
    }
    Ok(acc)
}

pub(crate) fn factorial_exact(n: u32) -> u128 {
    debug_assert!(n <= EXACT_COMBINATORICS_LIMIT);
    (1..=n as u128).product()
}

pub(crate) fn binomial_exact(n: u32, k: u32) -> u128 {
    debug_assert!(k <= n && n <= EXACT_COMBINATORICS_LIMIT);
    let k = k.min(n - k) as u128;
    let n = n as u128;
    // Each partial product is itself a binomial coefficient, so the division is exact.
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// `n!` as a float; exact integer arithmetic up to the combinatorics limit.
pub fn factorial(n: u32) -> f64 {
    if n <= EXACT_COMBINATORICS_LIMIT {
        factorial_exact(n) as f64
    } else {
        let head = factorial_exact(EXACT_COMBINATORICS_LIMIT) as f64;
        (EXACT_COMBINATORICS_LIMIT + 1..=n).fold(head, |acc, m| acc * m as f64)
    }
}

/// `k!!` as a float, same conventions as [`double_factorial`].
pub fn double_factorial_f64(k: i64) -> f64 {
    if k <= EXACT_COMBINATORICS_LIMIT as i64 {
        return double_factorial(k).map(|v| v as f64).unwrap_or(f64::NAN);
    }
    let mut acc = 1.0;
    let mut m = k;
    while m > 1 {
        acc *= m as f64;
        m -= 2;
    }
    acc
}

/// `C(n, k)` as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= EXACT_COMBINATORICS_LIMIT {
        return binomial_exact(n, k) as f64;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `E[X^k]` for `X ~ N(0, variance)`.
pub fn univariate_moment(k: u32, variance: f64) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    variance.powi((k / 2) as i32) * double_factorial_f64(k as i64 - 1)
}

/// A query for `E[X_i^p X_j^q]` with `(X_i, X_j)` jointly Gaussian and mean-zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateMomentQuery {
    pub p: u32,
    pub q: u32,
    pub var_i: f64,
    pub var_j: f64,
    pub cov: f64,
}

impl BivariateMomentQuery {
    pub fn new(p: u32, q: u32, var_i: f64, var_j: f64, cov: f64) -> Result<Self> {
        if !(var_i > 0.0 && var_j > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "variances must be positive (got {var_i}, {var_j})"
            )));
        }
        if !cov.is_finite() || cov * cov > var_i * var_j * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "covariance {cov} violates Cauchy-Schwarz for variances {var_i}, {var_j}"
            )));
        }
        Ok(Self {
            p,
            q,
            var_i,
            var_j,
            cov,
        })
    }

    pub fn order(&self) -> u32 {
        self.p + self.q
    }
}

/// Integer coefficient of the `cov^k` term in the Isserlis expansion.
fn isserlis_coefficient(p: u32, q: u32, k: u32) -> f64 {
    if p + q <= EXACT_COMBINATORICS_LIMIT {
        let c = double_factorial((p - k) as i64 - 1).expect("in range")
            * binomial_exact(p, k)
            * binomial_exact(q, k)
            * factorial_exact(k)
            * double_factorial((q - k) as i64 - 1).expect("in range");
        c as f64
    } else {
        double_factorial_f64((p - k) as i64 - 1)
            * binomial(p, k)
            * binomial(q, k)
            * factorial(k)
            * double_factorial_f64((q - k) as i64 - 1)
    }
}

/// Closed-form bivariate Gaussian product moment.
///
/// Sums over the number `k` of cross pairings, descending in steps of two
/// from `min(p, q)`:
///
/// ```text
/// sum_k (p-k-1)!! C(p,k) C(q,k) k! (q-k-1)!! var_i^((p-k)/2) cov^k var_j^((q-k)/2)
/// ```
pub fn isserlis_bivariate(query: &BivariateMomentQuery) -> f64 {
    let BivariateMomentQuery {
        p,
        q,
        var_i,
        var_j,
        cov,
    } = *query;
    if (p + q) % 2 == 1 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut k = p.min(q) as i64;
    while k >= 0 {
        let ku = k as u32;
        let term = isserlis_coefficient(p, q, ku)
            * var_i.powi(((p - ku) / 2) as i32)
            * cov.powi(k as i32)
            * var_j.powi(((q - ku) / 2) as i32);
        sum += term;
        k -= 2;
    }
    sum
}

/// Brute-force Isserlis moment: sums the covariance products over every
/// perfect pairing of `p` copies of `X_i` and `q` copies of `X_j`.
pub fn isserlis_oracle(query: &BivariateMomentQuery) -> Result<f64> {
    let n = query.order();
    if n > ORACLE_MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "pairing enumeration limited to p + q <= {ORACLE_MAX_ORDER} (got {n})"
        )));
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let mut labels: Vec<bool> = std::iter::repeat_n(false, query.p as usize)
        .chain(std::iter::repeat_n(true, query.q as usize))
        .collect();
    Ok(sum_pairings(&mut labels, query))
}

fn pair_weight(a: bool, b: bool, q: &BivariateMomentQuery) -> f64 {
    match (a, b) {
        (false, false) => q.var_i,
        (true, true) => q.var_j,
        _ => q.cov,
    }
}

// Pairs the first remaining label with each of the others in turn and recurses.
fn sum_pairings(labels: &mut [bool], q: &BivariateMomentQuery) -> f64 {
    if labels.is_empty() {
        return 1.0;
    }
    let first = labels[0];
    let mut total = 0.0;
    for partner in 1..labels.len() {
        labels.swap(1, partner);
        let weight = pair_weight(first, labels[1], q);
        total += weight * sum_pairings(&mut labels[2..], q);
        labels.swap(1, partner);
    }
    total
}
