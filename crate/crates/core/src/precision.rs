//! Near-identity precision analysis.
//!
//! For `Gamma = I + B` with zero-diagonal `B` and `|B| = delta < 1`, an odd
//! diagonal transformation yields a covariance `kappa I - lambda B + E'` with
//! `|E'| = O(eps^2)`, `eps = delta / (1 - delta)`, and hence a precision
//! `(1/kappa) I + (lambda/kappa^2) B + E''/kappa`.

use serde::Serialize;

use crate::covariance::{transform_covariance_with, TransformRequest};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{build_precision, GraphSpec};
use crate::matrix::SymMatrix;
use crate::moments::factorial;
use crate::series::{f_series, linear_coefficient, sum_series, DerivativeSeries, MAX_ODD_INDEX};

/// Off-diagonal magnitude separating edges from near-zeros in the transformed precision.
pub const DEFAULT_SPARSITY_THRESHOLD: f64 = 0.01;

/// Tolerance on the unit-diagonal requirement.
pub const UNIT_DIAGONAL_TOL: f64 = 1e-12;

pub fn operator_norm(m: &SymMatrix) -> f64 {
    m.operator_norm()
}

pub fn hs_norm(m: &SymMatrix) -> f64 {
    m.hs_norm()
}

#[derive(Debug, Clone, Serialize)]
pub struct NeumannInverse {
    pub inverse: SymMatrix,
    /// `I - B`.
    pub first_order: SymMatrix,
    /// `delta^2 / (1 - delta)`, a bound on `|inverse - first_order|`.
    pub tail_bound: f64,
}

/// Inverse of `A = I + B` alongside its first-order Neumann truncation.
pub fn neumann_inverse(a: &SymMatrix) -> Result<NeumannInverse> {
    let eye = SymMatrix::identity(a.dim());
    let b = a - &eye;
    let delta = b.operator_norm();
    if delta >= 1.0 {
        return Err(Error::NotNearIdentity(format!(
            "|A - I| = {delta} >= 1, Neumann series diverges"
        )));
    }
    let inverse = a.inverse_spd()?;
    Ok(NeumannInverse {
        inverse,
        first_order: &eye - &b,
        tail_bound: delta * delta / (1.0 - delta),
    })
}

/// A precision of the form `I + B` with `B_ii = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct NearIdentityPrecision {
    pub gamma: SymMatrix,
    pub b_matrix: SymMatrix,
    pub delta: f64,
    pub epsilon: f64,
}

pub fn analyze_near_identity(gamma: &SymMatrix) -> Result<NearIdentityPrecision> {
    for (i, g) in gamma.diagonal().into_iter().enumerate() {
        if (g - 1.0).abs() > UNIT_DIAGONAL_TOL {
            return Err(Error::NotNearIdentity(format!(
                "diagonal entry {i} is {g}, expected 1"
            )));
        }
    }
    let b_matrix = gamma.off_diagonal_part();
    let delta = b_matrix.operator_norm();
    if delta >= 1.0 {
        return Err(Error::NotNearIdentity(format!("|B| = {delta} >= 1")));
    }
    Ok(NearIdentityPrecision {
        gamma: gamma.clone(),
        b_matrix,
        delta,
        epsilon: delta / (1.0 - delta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisConstants {
    /// `sum_{odd k} F_k(1/2)^2 / k!`, the unit-variance scale.
    pub kappa: f64,
    /// `F_1(1/2)^2`, the linear covariance response.
    pub lambda: f64,
    pub inv_kappa: f64,
    pub lambda_over_kappa_sq: f64,
}

pub fn constants_for(f: &DerivativeSeries) -> Result<AnalysisConstants> {
    f.require_odd()?;
    let k_max = MAX_ODD_INDEX.min(f.max_order());
    let kappa = sum_series((1..=k_max).step_by(2).map(|k| {
        let fk = f_series(f, k, 0.5);
        fk * fk / factorial(k as u32)
    }));
    let lambda = linear_coefficient(f)?;
    Ok(AnalysisConstants {
        kappa,
        lambda,
        inv_kappa: 1.0 / kappa,
        lambda_over_kappa_sq: lambda / (kappa * kappa),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SparsityReport {
    pub threshold: f64,
    /// Off-diagonal pairs `(i, j)`, `i < j`, with `|Gamma_pi[i][j]| > threshold`.
    pub structural_edges: Vec<(usize, usize)>,
    pub near_zero: Vec<(usize, usize)>,
    /// Classified as edges but absent from the original precision.
    pub false_positives: Vec<(usize, usize)>,
    /// Present in the original precision but classified near-zero.
    pub false_negatives: Vec<(usize, usize)>,
    /// Largest magnitude among original non-edges.
    pub max_non_edge: f64,
    /// Smallest magnitude among original edges.
    pub min_edge: f64,
}

impl SparsityReport {
    pub fn recovers_graph(&self) -> bool {
        self.false_positives.is_empty() && self.false_negatives.is_empty()
    }
}

/// Classifies the off-diagonals of `gamma_pi` against the support of `b`.
pub fn classify_sparsity(gamma_pi: &SymMatrix, b: &SymMatrix, threshold: f64) -> SparsityReport {
    let d = gamma_pi.dim();
    let mut report = SparsityReport {
        threshold,
        structural_edges: Vec::new(),
        near_zero: Vec::new(),
        false_positives: Vec::new(),
        false_negatives: Vec::new(),
        max_non_edge: 0.0,
        min_edge: f64::INFINITY,
    };
    for i in 0..d {
        for j in (i + 1)..d {
            let mag = gamma_pi.get(i, j).abs();
            let original_edge = b.get(i, j) != 0.0;
            let is_edge = mag > threshold;
            if is_edge {
                report.structural_edges.push((i, j));
            } else {
                report.near_zero.push((i, j));
            }
            if original_edge {
                report.min_edge = report.min_edge.min(mag);
            } else {
                report.max_non_edge = report.max_non_edge.max(mag);
            }
            match (is_edge, original_edge) {
                (true, false) => report.false_positives.push((i, j)),
                (false, true) => report.false_negatives.push((i, j)),
                _ => {}
            }
        }
    }
    report
}

/// Predicted versus exact covariance and precision after the transformation.
#[derive(Debug, Clone, Serialize)]
pub struct TransformReport {
    pub delta: f64,
    pub epsilon: f64,
    pub constants: AnalysisConstants,
    pub gamma_rho: SymMatrix,
    pub sigma_rho: SymMatrix,
    pub sigma_pi: SymMatrix,
    /// `kappa I - lambda B`.
    pub predicted_sigma: SymMatrix,
    /// `E' = Sigma_pi - kappa I + lambda B`.
    pub e_prime: SymMatrix,
    pub e_prime_opnorm: f64,
    /// Diagonal part of `E'`.
    pub e1_opnorm: f64,
    /// Off-diagonal part of `E'`.
    pub e2_opnorm: f64,
    pub e2_hs_norm: f64,
    pub gamma_pi: SymMatrix,
    /// `(1/kappa) I + (lambda/kappa^2) B`.
    pub predicted_gamma: SymMatrix,
    /// `Gamma_pi - predicted_gamma`, i.e. `E''/kappa`.
    pub e_double_prime: SymMatrix,
    pub sparsity: SparsityReport,
}

pub fn predict_and_compare(
    prec: &NearIdentityPrecision,
    f: &DerivativeSeries,
    threshold: f64,
) -> Result<TransformReport> {
    predict_and_compare_with(prec, f, threshold, Execution::default())
}

pub fn predict_and_compare_with(
    prec: &NearIdentityPrecision,
    f: &DerivativeSeries,
    threshold: f64,
    exec: Execution,
) -> Result<TransformReport> {
    let constants = constants_for(f)?;
    let d = prec.gamma.dim();
    let eye = SymMatrix::identity(d);
    let b = &prec.b_matrix;

    let sigma_rho = prec.gamma.inverse_spd()?;
    let request = TransformRequest::new(sigma_rho.clone(), f.clone())?;
    let sigma_pi = transform_covariance_with(&request, exec)?;

    let predicted_sigma = &eye.scale(constants.kappa) - &b.scale(constants.lambda);
    let e_prime = &sigma_pi - &predicted_sigma;
    let gamma_pi = sigma_pi.inverse_spd()?;
    let predicted_gamma =
        &eye.scale(constants.inv_kappa) + &b.scale(constants.lambda_over_kappa_sq);
    let e_double_prime = &gamma_pi - &predicted_gamma;
    let e2 = e_prime.off_diagonal_part();
    let sparsity = classify_sparsity(&gamma_pi, b, threshold);

    Ok(TransformReport {
        delta: prec.delta,
        epsilon: prec.epsilon,
        constants,
        gamma_rho: prec.gamma.clone(),
        sigma_rho,
        sigma_pi,
        predicted_sigma,
        e_prime_opnorm: e_prime.operator_norm(),
        e1_opnorm: e_prime.diagonal_part().operator_norm(),
        e2_opnorm: e2.operator_norm(),
        e2_hs_norm: e2.hs_norm(),
        e_prime,
        gamma_pi,
        predicted_gamma,
        e_double_prime,
        sparsity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub weight: f64,
    pub epsilon: f64,
    pub e_prime_norm: f64,
    /// `|E'| / eps^2`; `None` when `eps = 0`.
    pub ratio: Option<f64>,
}

/// Tabulates `|E'|` against `eps^2` over a sweep of edge weights.
pub fn error_scaling_probe(
    f: &DerivativeSeries,
    graph: &GraphSpec,
    weights: &[f64],
) -> Result<Vec<ScalingRow>> {
    error_scaling_probe_with(f, graph, weights, Execution::default())
}

pub fn error_scaling_probe_with(
    f: &DerivativeSeries,
    graph: &GraphSpec,
    weights: &[f64],
    exec: Execution,
) -> Result<Vec<ScalingRow>> {
    f.require_odd()?;
    let rows = exec.map_indexed(weights.len(), |idx| -> Result<ScalingRow> {
        let spec = graph.with_weight(weights[idx]);
        let prec = analyze_near_identity(&build_precision(&spec)?)?;
        // each row is already one task; keep the inner transform sequential
        let report =
            predict_and_compare_with(&prec, f, DEFAULT_SPARSITY_THRESHOLD, Execution::Sequential)?;
        let eps2 = prec.epsilon * prec.epsilon;
        Ok(ScalingRow {
            weight: spec.weight,
            epsilon: prec.epsilon,
            e_prime_norm: report.e_prime_opnorm,
            ratio: (eps2 > 0.0).then(|| report.e_prime_opnorm / eps2),
        })
    });
    rows.into_iter().collect()
}
