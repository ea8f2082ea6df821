//! The mountain-pass functional
//!
//! `I(u) = 1/2 int |grad u|^2 + m0^2/2 int u^2 - 1/p int (u^+)^p - omega^2 Psi(u)`,
//!
//! with `Psi(u) = 1/2 int (1 - q Phi(u)) u^2`. Everything is evaluated with
//! the grid's cell weights, so the discrete `Psi` is differentiated exactly:
//! its W-gradient is `(1 - q Phi(u))^2 u`, just as in the continuum.
//!
//! Also here: the sharp Sobolev constant `K_n`, the compactness threshold
//! `1/(n K_n^n)`, and Aubin's truncated bubbles with their quotient.

use serde::{Deserialize, Serialize};

use crate::elliptic::{assemble, dirichlet_energy};
use crate::error::{KgmpError, Result};
use crate::gauge::gauge_potential;
use crate::model::{critical_exponent, sphere_area, weighted_sum, Field, Params, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub dirichlet: f64,
    pub mass: f64,
    pub nonlinear: f64,
    pub gauge_coupling: f64,
    pub total: f64,
}

fn check_finite(grid: &RadialGrid, u: &Field) -> Result<()> {
    grid.check(u)?;
    if !u.is_finite() {
        return Err(KgmpError::Domain("field is not finite".into()));
    }
    Ok(())
}

fn psi_from(grid: &RadialGrid, q: f64, u: &[f64], v: &[f64]) -> f64 {
    let f: Vec<f64> = u.iter().zip(v).map(|(x, y)| (1.0 - q * y) * x * x).collect();
    0.5 * weighted_sum(grid, &f)
}

/// `Psi(u) = 1/2 sum W_i (1 - q v_i) u_i^2` with `v = Phi(u)`.
pub fn aux_psi(grid: &RadialGrid, params: &Params, u: &Field) -> Result<f64> {
    check_finite(grid, u)?;
    let v = gauge_potential(grid, params, u)?;
    Ok(psi_from(grid, params.q, u, &v))
}

/// W-gradient of [`aux_psi`]: `g_i = (1 - q v_i)^2 u_i`.
pub fn grad_psi(grid: &RadialGrid, params: &Params, u: &Field) -> Result<Field> {
    check_finite(grid, u)?;
    let v = gauge_potential(grid, params, u)?;
    Ok(Field::new(
        u.iter()
            .zip(v.iter())
            .map(|(x, y)| (1.0 - params.q * y).powi(2) * x)
            .collect(),
    ))
}

pub fn energy(grid: &RadialGrid, params: &Params, u: &Field) -> Result<EnergyBreakdown> {
    check_finite(grid, u)?;
    let v = gauge_potential(grid, params, u)?;
    Ok(energy_with_gauge(grid, params, u, &v))
}

pub(crate) fn energy_with_gauge(
    grid: &RadialGrid,
    params: &Params,
    u: &Field,
    v: &[f64],
) -> EnergyBreakdown {
    let p = params.p;
    let dirichlet = 0.5 * dirichlet_energy(grid, u).expect("field checked against grid");
    let u2: Vec<f64> = u.iter().map(|x| x * x).collect();
    let mass = 0.5 * params.m0 * params.m0 * weighted_sum(grid, &u2);
    let up: Vec<f64> = u.iter().map(|x| x.max(0.0).powf(p)).collect();
    let nonlinear = weighted_sum(grid, &up) / p;
    let gauge_coupling = params.omega * params.omega * psi_from(grid, params.q, u, v);
    EnergyBreakdown {
        dirichlet,
        mass,
        nonlinear,
        gauge_coupling,
        total: dirichlet + mass - nonlinear - gauge_coupling,
    }
}

/// W-gradient of the total energy,
/// `L u + m0^2 u - (u^+)^{p-1} - omega^2 (1 - q v)^2 u`.
///
/// On the ball the last entry is the Dirichlet constraint `u_N`.
pub fn grad_energy(grid: &RadialGrid, params: &Params, u: &Field) -> Result<Field> {
    check_finite(grid, u)?;
    let v = gauge_potential(grid, params, u)?;
    grad_energy_with_gauge(grid, params, u, &v)
}

pub(crate) fn grad_energy_with_gauge(
    grid: &RadialGrid,
    params: &Params,
    u: &Field,
    v: &[f64],
) -> Result<Field> {
    let m0_sq = params.m0 * params.m0;
    let om2 = params.omega * params.omega;
    let mut g = assemble(grid, &Field::constant(grid, m0_sq))?.apply(u)?;
    let dirichlet = grid.geometry.is_dirichlet();
    let last = grid.len() - 1;
    for i in 0..grid.len() {
        if dirichlet && i == last {
            continue;
        }
        let phase = om2 * (1.0 - params.q * v[i]).powi(2);
        g[i] -= u[i].max(0.0).powf(params.p - 1.0) + phase * u[i];
    }
    Ok(g)
}

/// Sharp constant of `||u||_{2*} <= K_n ||grad u||_2` on `R^n`.
pub fn sobolev_kn(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(KgmpError::Domain(format!("K_n needs n >= 3, got {n}")));
    }
    let nf = n as f64;
    let omega_n = sphere_area(n)?;
    Ok(2.0 / (nf * (nf - 2.0) * omega_n.powf(2.0 / nf)).sqrt())
}

/// Compactness threshold `1/(n K_n^n)` for mountain-pass levels.
pub fn mp_threshold(n: usize) -> Result<f64> {
    Ok(1.0 / (n as f64 * sobolev_kn(n)?.powi(n as i32)))
}

/// `(eps/(eps^2 + r^2))^{(n-2)/2} - (eps/(eps^2 + rho0^2))^{(n-2)/2}` on `r <= rho0`, zero beyond.
pub fn aubin_test_function(grid: &RadialGrid, eps: f64, rho0: f64) -> Result<Field> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(KgmpError::Domain(format!("eps = {eps} must be positive")));
    }
    if !(rho0 > 0.0 && rho0 < grid.geometry.r_max) {
        return Err(KgmpError::Domain(format!(
            "rho0 = {rho0} must lie in (0, {})",
            grid.geometry.r_max
        )));
    }
    let half = 0.5 * (grid.dim() as f64 - 2.0);
    let profile = |r: f64| (eps / (eps * eps + r * r)).powf(half);
    let floor = profile(rho0);
    Ok(Field::from_fn(grid, |r| {
        if r <= rho0 {
            profile(r) - floor
        } else {
            0.0
        }
    }))
}

/// `(int |grad u|^2 + lambda int u^2) / (int |u|^{2*})^{2/2*}`.
pub fn aubin_quotient(grid: &RadialGrid, lambda: f64, u: &Field) -> Result<f64> {
    check_finite(grid, u)?;
    let crit = critical_exponent(grid.dim());
    let u2: Vec<f64> = u.iter().map(|x| x * x).collect();
    let uc: Vec<f64> = u.iter().map(|x| x.abs().powf(crit)).collect();
    let denom = weighted_sum(grid, &uc);
    if denom <= 0.0 {
        return Err(KgmpError::Domain("Aubin quotient of the zero field".into()));
    }
    let numer = dirichlet_energy(grid, u)? + lambda * weighted_sum(grid, &u2);
    Ok(numer / denom.powf(2.0 / crit))
}
