//! The gauge map `u -> v = Phi(u)`, the unique solution of
//! `Delta_g v + (m1^2 + q^2 u^2) v = q u^2`.
//!
//! On a finite grid the restricted weak formulation is just the linear
//! system, and the discrete maximum principle gives `0 <= v <= 1/q`
//! directly. The truncation construction (`u_L = min(|u|, L)`) and the
//! H1 continuity estimate are exposed as procedures so they can be checked.

use serde::{Deserialize, Serialize};

use crate::elliptic::{assemble, dirichlet_energy};
use crate::error::{KgmpError, Result};
use crate::model::{inner, Field, Params, RadialGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeResult {
    pub v: Field,
    pub min_v: f64,
    pub max_v: f64,
    /// `max(0, -min_v, max_v - 1/q)`.
    pub bound_violation: f64,
}

pub fn solve_gauge(grid: &RadialGrid, params: &Params, u: &Field) -> Result<GaugeResult> {
    grid.check(u)?;
    if !u.is_finite() {
        return Err(KgmpError::Domain("gauge input is not finite".into()));
    }
    let v = gauge_potential(grid, params, u)?;
    let (min_v, max_v) = (v.min(), v.max());
    let bound_violation = 0.0f64.max(-min_v).max(max_v - 1.0 / params.q);
    Ok(GaugeResult {
        v,
        min_v,
        max_v,
        bound_violation,
    })
}

/// `Phi(u)` without the bookkeeping; `u` is only used through `u^2`.
pub(crate) fn gauge_potential(grid: &RadialGrid, params: &Params, u: &[f64]) -> Result<Field> {
    let (m1sq, q) = (params.m1 * params.m1, params.q);
    let potential = Field::new(u.iter().map(|x| m1sq + q * q * (x * x)).collect());
    let mut rhs = Field::new(u.iter().map(|x| q * (x * x)).collect());
    if grid.geometry.is_dirichlet() {
        let last = grid.len() - 1;
        rhs[last] = 0.0;
    }
    assemble(grid, &potential)?.solve(&rhs)
}

/// Discrete `H1` norm squared: Dirichlet energy plus weighted `L2`.
pub fn h1_norm_sq(grid: &RadialGrid, f: &Field) -> Result<f64> {
    Ok(dirichlet_energy(grid, f)? + inner(grid, f, f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationStep {
    pub lambda: f64,
    pub phi: Field,
    /// `H1` distance from `Phi_lambda(u)` to `Phi(u)`.
    pub h1_delta_to_final: f64,
}

/// Solves `Delta Phi_L + (m1^2 + q^2 u_L^2) Phi_L = q u_L^2` with
/// `u_L = min(|u|, L)` for each truncation level.
pub fn truncation_sequence(
    grid: &RadialGrid,
    params: &Params,
    u: &Field,
    lambdas: &[f64],
) -> Result<Vec<TruncationStep>> {
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(KgmpError::Domain("truncation levels must be positive".into()));
    }
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(KgmpError::Domain("truncation levels must increase".into()));
    }
    let full = solve_gauge(grid, params, u)?.v;
    lambdas
        .iter()
        .map(|&lambda| {
            let truncated = u.map(|x| x.abs().min(lambda));
            let phi = gauge_potential(grid, params, &truncated)?;
            let diff = phi.axpy(-1.0, &full);
            Ok(TruncationStep {
                lambda,
                h1_delta_to_final: h1_norm_sq(grid, &diff)?.sqrt(),
                phi,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCheck {
    /// `||Phi(u1) - Phi(u2)||_{H1}^2`.
    pub lhs: f64,
    /// `C ||u1 + u2||_{L2} ||u1 - u2||_{L2}` with `C = 1 / min(1, m1^2)`.
    pub rhs: f64,
}

impl ContinuityCheck {
    pub fn holds(&self, rtol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rtol)
    }
}

pub fn continuity_check(
    grid: &RadialGrid,
    params: &Params,
    u1: &Field,
    u2: &Field,
) -> Result<ContinuityCheck> {
    grid.check(u1)?;
    grid.check(u2)?;
    let phi1 = solve_gauge(grid, params, u1)?.v;
    let phi2 = solve_gauge(grid, params, u2)?.v;
    let lhs = h1_norm_sq(grid, &phi1.axpy(-1.0, &phi2))?;
    let sum = u1.axpy(1.0, u2);
    let diff = u1.axpy(-1.0, u2);
    let c = 1.0 / (params.m1 * params.m1).min(1.0);
    let rhs = c * inner(grid, &sum, &sum).sqrt() * inner(grid, &diff, &diff).sqrt();
    Ok(ContinuityCheck { lhs, rhs })
}
