//! Precision matrices for the chain (cycle), star and grid test graphs.
//!
//! All generated precisions have unit diagonal and a uniform weight on every
//! edge. Grid nodes are ordered row-major.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Chain,
    Star,
    Grid,
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chain" => Ok(GraphKind::Chain),
            "star" => Ok(GraphKind::Star),
            "grid" => Ok(GraphKind::Grid),
            other => Err(Error::InvalidArgument(format!(
                "unknown graph kind '{other}'"
            ))),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Chain => "chain",
            GraphKind::Star => "star",
            GraphKind::Grid => "grid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub kind: GraphKind,
    /// Number of nodes for chain and star; side length for grid.
    pub dim_param: usize,
    pub weight: f64,
}

impl GraphSpec {
    pub fn chain(d: usize, weight: f64) -> Self {
        Self {
            kind: GraphKind::Chain,
            dim_param: d,
            weight,
        }
    }

    pub fn star(d: usize, weight: f64) -> Self {
        Self {
            kind: GraphKind::Star,
            dim_param: d,
            weight,
        }
    }

    pub fn grid(side: usize, weight: f64) -> Self {
        Self {
            kind: GraphKind::Grid,
            dim_param: side,
            weight,
        }
    }

    pub fn with_weight(self, weight: f64) -> Self {
        Self { weight, ..self }
    }

    /// Matrix dimension `d`.
    pub fn dim(&self) -> usize {
        match self.kind {
            GraphKind::Chain | GraphKind::Star => self.dim_param,
            GraphKind::Grid => self.dim_param * self.dim_param,
        }
    }

    /// Weight at which the declared parameter range ends.
    pub fn critical_weight(&self) -> f64 {
        match self.kind {
            GraphKind::Chain => 0.5,
            GraphKind::Star => 1.0 / ((self.dim_param.max(2) - 1) as f64).sqrt(),
            GraphKind::Grid => 0.25,
        }
    }

    /// Edge list `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        match self.kind {
            GraphKind::Chain => {
                let d = self.dim_param;
                for i in 0..d {
                    let j = (i + 1) % d;
                    if i != j {
                        edges.push((i.min(j), i.max(j)));
                    }
                }
            }
            GraphKind::Star => edges.extend((1..self.dim_param).map(|j| (0, j))),
            GraphKind::Grid => {
                let m = self.dim_param;
                for r in 0..m {
                    for c in 0..m {
                        let i = r * m + c;
                        if c + 1 < m {
                            edges.push((i, i + 1));
                        }
                        if r + 1 < m {
                            edges.push((i, i + m));
                        }
                    }
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    fn validate(&self) -> Result<()> {
        let w = self.weight;
        if !w.is_finite() {
            return Err(Error::InvalidGraph(format!("weight {w} is not finite")));
        }
        let d = self.dim_param;
        match self.kind {
            GraphKind::Chain if d < 3 => {
                Err(Error::InvalidGraph(format!("chain needs d >= 3, got {d}")))
            }
            GraphKind::Chain if w.abs() >= 0.5 => Err(Error::InvalidGraph(format!(
                "chain weight must satisfy |w| < 1/2, got {w}"
            ))),
            GraphKind::Star if d < 2 => {
                Err(Error::InvalidGraph(format!("star needs d >= 2, got {d}")))
            }
            GraphKind::Star if (d - 1) as f64 * w * w >= 1.0 => Err(Error::InvalidGraph(format!(
                "star weight must satisfy (d-1) w^2 < 1, got {w}"
            ))),
            GraphKind::Grid if d < 2 => Err(Error::InvalidGraph(format!(
                "grid needs side >= 2, got {d}"
            ))),
            GraphKind::Grid if w.abs() >= 0.25 => Err(Error::InvalidGraph(format!(
                "grid weight must satisfy |w| < 1/4, got {w}"
            ))),
            _ => Ok(()),
        }
    }
}

/// Unit diagonal plus `weight` on every edge, without any range check.
pub fn assemble(spec: &GraphSpec) -> SymMatrix {
    let mut m = SymMatrix::identity(spec.dim());
    for (i, j) in spec.edges() {
        m.set(i, j, spec.weight);
    }
    m
}

/// Validated precision matrix for `spec`.
pub fn build_precision(spec: &GraphSpec) -> Result<SymMatrix> {
    spec.validate()?;
    let m = assemble(spec);
    if !check_positive_definite(&m) {
        return Err(Error::InvalidGraph(format!(
            "{spec:?} is not positive-definite"
        )));
    }
    Ok(m)
}

/// Cholesky certification with every pivot above `1e-12`.
pub fn check_positive_definite(m: &SymMatrix) -> bool {
    m.is_positive_definite()
}

/// `(1 / (1 - |b|^2)) [[1, -b^T], [-b, (1 - |b|^2) I + b b^T]]` with `b = w 1`.
pub fn star_inverse_closed_form(spec: &GraphSpec) -> Result<SymMatrix> {
    if spec.kind != GraphKind::Star {
        return Err(Error::InvalidGraph(format!(
            "star closed form requested for a {} graph",
            spec.kind
        )));
    }
    spec.validate()?;
    let w = spec.weight;
    let norm_sq = (spec.dim_param - 1) as f64 * w * w;
    let s = 1.0 / (1.0 - norm_sq);
    Ok(SymMatrix::from_upper_fn(spec.dim(), |i, j| match (i, j) {
        (0, 0) => s,
        (0, _) => -w * s,
        (i, j) if i == j => s * ((1.0 - norm_sq) + w * w),
        _ => s * w * w,
    }))
}

/// Block formula for the covariance of the 3 x 3 grid.
///
/// With `C = tridiag(1, 1/w, 1)` and `D = (2I - C^2)^{-1}` the covariance is
/// `(1/w) [[C^{-1}(I - D), D, -C^{-1} D], [D, -C D, D], [-C^{-1} D, D, C^{-1}(I - D)]]`.
pub fn grid_covariance_closed_form(spec: &GraphSpec) -> Result<SymMatrix> {
    if spec.kind != GraphKind::Grid {
        return Err(Error::InvalidGraph(format!(
            "grid closed form requested for a {} graph",
            spec.kind
        )));
    }
    if spec.dim_param != 3 {
        return Err(Error::InvalidGraph(format!(
            "grid closed form exists only for side 3, got {}",
            spec.dim_param
        )));
    }
    spec.validate()?;
    if spec.weight == 0.0 {
        return Ok(SymMatrix::identity(9));
    }
    let a = spec.weight;
    let c = Matrix3::new(1.0 / a, 1.0, 0.0, 1.0, 1.0 / a, 1.0, 0.0, 1.0, 1.0 / a);
    let eye = Matrix3::identity();
    let singular = || Error::InvalidGraph("grid block formula is singular".into());
    let c_inv = c.try_inverse().ok_or_else(singular)?;
    let d = (eye * 2.0 - c * c).try_inverse().ok_or_else(singular)?;
    let corner = c_inv * (eye - d);
    let outer = -(c_inv * d);
    let center = -(c * d);
    let blocks = [[corner, d, outer], [d, center, d], [outer, d, corner]];
    let mut data = vec![0.0; 81];
    for (bi, block_row) in blocks.iter().enumerate() {
        for (bj, block) in block_row.iter().enumerate() {
            for r in 0..3 {
                for s in 0..3 {
                    data[(3 * bi + r) * 9 + 3 * bj + s] = block[(r, s)] / a;
                }
            }
        }
    }
    Ok(SymMatrix::symmetrize(9, &data))
}
