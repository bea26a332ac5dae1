//! Monte Carlo estimate of the transformed covariance.
//!
//! Samples are split into fixed-size chunks. Chunk `c` draws from its own
//! ChaCha8 stream (`seed`, stream `c`), accumulates privately, and the chunk
//! sums are reduced in chunk order. The estimate therefore depends only on
//! `(sigma, f, seed, chunk)` and not on how many workers ran.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::{Cholesky, SymMatrix};
use crate::series::ScalarMap;

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_CHUNK: usize = 4096;
pub const DEFAULT_SE_MULTIPLIER: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub chunk: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            n_samples: DEFAULT_SAMPLES,
            seed: 0,
            chunk: DEFAULT_CHUNK,
        }
    }
}

impl SampleConfig {
    pub fn new(n_samples: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            n_samples,
            seed,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 samples, got {}",
                self.n_samples
            )));
        }
        if self.chunk == 0 {
            return Err(Error::InvalidArgument("chunk size must be positive".into()));
        }
        Ok(())
    }

    fn n_chunks(&self) -> usize {
        self.n_samples.div_ceil(self.chunk)
    }
}

/// First and second raw moment sums over one chunk; `outer` holds the upper triangle.
struct ChunkSums {
    sum: Vec<f64>,
    outer: Vec<f64>,
}

fn sample_chunk(chol: &Cholesky, f: &dyn ScalarMap, cfg: &SampleConfig, index: usize) -> ChunkSums {
    let d = chol.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let start = index * cfg.chunk;
    let count = cfg.chunk.min(cfg.n_samples - start);

    let mut z = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut sums = ChunkSums {
        sum: vec![0.0; d],
        outer: vec![0.0; d * (d + 1) / 2],
    };
    for _ in 0..count {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        chol.mul_lower(&z, &mut x);
        for xi in x.iter_mut() {
            *xi = f.apply(*xi);
        }
        let mut idx = 0;
        for i in 0..d {
            sums.sum[i] += x[i];
            for j in i..d {
                sums.outer[idx] += x[i] * x[j];
                idx += 1;
            }
        }
    }
    sums
}

/// Empirical covariance of `f(X)`, `X ~ N(0, sigma)`, with `1/n` normalization
/// and the empirical mean removed.
pub fn sample_transformed_covariance(
    sigma: &SymMatrix,
    f: &dyn ScalarMap,
    cfg: &SampleConfig,
) -> Result<SymMatrix> {
    sample_transformed_covariance_with(sigma, f, cfg, Execution::default())
}

pub fn sample_transformed_covariance_with(
    sigma: &SymMatrix,
    f: &dyn ScalarMap,
    cfg: &SampleConfig,
    exec: Execution,
) -> Result<SymMatrix> {
    cfg.validate()?;
    let chol = sigma.cholesky()?;
    let d = sigma.dim();
    let chunks = exec.map_indexed(cfg.n_chunks(), |c| sample_chunk(&chol, f, cfg, c));

    let mut sum = vec![0.0; d];
    let mut outer = vec![0.0; d * (d + 1) / 2];
    for chunk in &chunks {
        sum.iter_mut().zip(&chunk.sum).for_each(|(a, b)| *a += b);
        outer
            .iter_mut()
            .zip(&chunk.outer)
            .for_each(|(a, b)| *a += b);
    }
    let n = cfg.n_samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let mut idx = 0;
    let mut cov = Vec::with_capacity(outer.len());
    for i in 0..d {
        for j in i..d {
            cov.push(outer[idx] / n - mean[i] * mean[j]);
            idx += 1;
        }
    }
    Ok(SymMatrix::from_upper_values(d, &cov))
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalComparison {
    pub empirical: SymMatrix,
    pub analytic: SymMatrix,
    pub n_samples: usize,
    pub max_abs_dev: f64,
    /// `sqrt((tau_ii tau_jj + tau_ij^2) / n)` per entry.
    pub standard_errors: SymMatrix,
    pub se_multiplier: f64,
    /// Upper-triangle entries deviating by more than `se_multiplier` standard errors.
    pub flagged: Vec<(usize, usize)>,
}

impl EmpiricalComparison {
    pub fn passed(&self) -> bool {
        self.flagged.is_empty()
    }
}

pub fn compare(
    empirical: &SymMatrix,
    analytic: &SymMatrix,
    n: usize,
    se_multiplier: f64,
) -> Result<EmpiricalComparison> {
    empirical.check_same_dim(analytic)?;
    if n == 0 {
        return Err(Error::InvalidArgument(
            "sample count must be positive".into(),
        ));
    }
    let d = analytic.dim();
    let standard_errors = SymMatrix::from_upper_fn(d, |i, j| {
        let t = analytic.get(i, j);
        ((analytic.get(i, i) * analytic.get(j, j) + t * t) / n as f64).sqrt()
    });
    let mut flagged = Vec::new();
    for i in 0..d {
        for j in i..d {
            let dev = (empirical.get(i, j) - analytic.get(i, j)).abs();
            if dev > se_multiplier * standard_errors.get(i, j) {
                flagged.push((i, j));
            }
        }
    }
    Ok(EmpiricalComparison {
        empirical: empirical.clone(),
        analytic: analytic.clone(),
        n_samples: n,
        max_abs_dev: empirical.max_abs_diff(analytic)?,
        standard_errors,
        se_multiplier,
        flagged,
    })
}
