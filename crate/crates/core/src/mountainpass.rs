//! Mountain-pass search and Newton refinement of the coupled system.
//!
//! The search minimizes `max_t I(t u)` over directions `u`, starting from
//! the highest point of the straight path `0 -> T seed`. Each step moves
//! the ray maximizer along the `H1` (Sobolev) gradient `(L + 1)^{-1} g`
//! with an Armijo backtrack and re-maximizes along the new ray. Damped
//! Newton on the interleaved `(u, v)` unknowns then polishes the candidate.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{bubble, BubbleSpec};
use crate::banded::BandMatrix;
use crate::elliptic::{assemble, DiscreteOperator};
use crate::energy::{energy_with_gauge, grad_energy_with_gauge};
use crate::error::{KgmpError, Result};
use crate::gauge::{gauge_potential, h1_norm_sq};
use crate::model::{inner, Field, Params, RadialGrid};

/// Residual gate for accepting a solution.
pub const ACCEPT_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MPConfig {
    /// Sample count on the initial straight path.
    pub path_points: usize,
    pub max_outer_iters: usize,
    /// Initial step on the Sobolev gradient; adapted by backtracking.
    pub descent_step: f64,
    /// Stopping tolerance on `||grad I||_W` at the top node.
    pub grad_tol: f64,
    pub endpoint_scale_max: f64,
    /// Newton stops once both max-norm residuals are below this.
    pub newton_tol: f64,
    pub newton_max_iters: usize,
}

impl Default for MPConfig {
    fn default() -> Self {
        MPConfig {
            path_points: 40,
            max_outer_iters: 20_000,
            descent_step: 0.5,
            grad_tol: 1e-6,
            endpoint_scale_max: 1e6,
            newton_tol: 1e-12,
            newton_max_iters: 50,
        }
    }
}

impl MPConfig {
    pub fn validate(&self) -> Result<()> {
        if self.path_points < 3 {
            return Err(KgmpError::InvalidParams(format!(
                "path_points = {} < 3",
                self.path_points
            )));
        }
        let positive = [
            ("descent_step", self.descent_step),
            ("grad_tol", self.grad_tol),
            ("endpoint_scale_max", self.endpoint_scale_max),
            ("newton_tol", self.newton_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(KgmpError::InvalidParams(format!("{name} = {value} must be positive")));
            }
        }
        if self.max_outer_iters == 0 || self.newton_max_iters == 0 {
            return Err(KgmpError::InvalidParams("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub u: Field,
    pub v: Field,
    pub level_c: f64,
    pub grad_norm: f64,
    pub residual1: f64,
    pub residual2: f64,
    pub newton_iters: usize,
    pub min_u: f64,
    /// Max-norm residual before each Newton step and after the last.
    pub residual_history: Vec<f64>,
    pub path_iters: usize,
    /// Energy of the top path node when the path phase stopped.
    pub path_level: f64,
    pub endpoint_scale: f64,
}

impl SolveReport {
    pub fn residual(&self) -> f64 {
        self.residual1.max(self.residual2)
    }

    pub fn is_accepted(&self) -> bool {
        self.residual() <= ACCEPT_RESIDUAL && self.min_u > 0.0
    }
}

/// Default seed: the bubble `B_{0.2}` centred at the pole.
pub fn default_seed(grid: &RadialGrid) -> Result<Field> {
    Ok(bubble(grid, &BubbleSpec::new(0.2, grid.dim())?))
}

/// Doubles `T` from 1 until `I(T seed) < 0`.
pub fn find_endpoint(
    grid: &RadialGrid,
    params: &Params,
    seed: &Field,
    scale_max: f64,
) -> Result<(Field, f64)> {
    grid.check(seed)?;
    if !seed.is_finite() || seed.iter().all(|&x| x <= 0.0) {
        return Err(KgmpError::Domain("seed needs a nonzero positive part".into()));
    }
    let mut t = 1.0;
    while t <= scale_max {
        let candidate = seed.scaled(t);
        let v = gauge_potential(grid, params, &candidate)?;
        if energy_with_gauge(grid, params, &candidate, &v).total < 0.0 {
            return Ok((candidate, t));
        }
        t *= 2.0;
    }
    Err(KgmpError::NoNegativeEndpoint { scale_max })
}

/// Refuses phases outside `|omega| < m0`.
pub fn check_hypotheses(params: &Params) -> Result<()> {
    params.validate()?;
    if !params.phase_admissible() {
        return Err(KgmpError::HypothesisViolated(format!(
            "|omega| = {} must be below m0 = {}",
            params.omega.abs(),
            params.m0
        )));
    }
    Ok(())
}

struct Landscape<'a> {
    grid: &'a RadialGrid,
    params: &'a Params,
    riesz: DiscreteOperator<'a>,
}

struct Probe {
    energy: f64,
    grad: Field,
    /// Riesz representer of the gradient in the `H1` inner product.
    sobolev: Field,
}

impl<'a> Landscape<'a> {
    fn energy(&self, u: &Field) -> Result<f64> {
        let v = gauge_potential(self.grid, self.params, u)?;
        Ok(energy_with_gauge(self.grid, self.params, u, &v).total)
    }

    fn gradient(&self, u: &Field) -> Result<Field> {
        let v = gauge_potential(self.grid, self.params, u)?;
        grad_energy_with_gauge(self.grid, self.params, u, &v)
    }

    fn probe(&self, u: &Field) -> Result<Probe> {
        let v = gauge_potential(self.grid, self.params, u)?;
        let energy = energy_with_gauge(self.grid, self.params, u, &v).total;
        let grad = grad_energy_with_gauge(self.grid, self.params, u, &v)?;
        let sobolev = self.riesz.solve(&grad)?;
        Ok(Probe {
            energy,
            grad,
            sobolev,
        })
    }

    fn h1_norm(&self, u: &Field) -> Result<f64> {
        Ok(h1_norm_sq(self.grid, u)?.sqrt())
    }

    /// `d/dt I(t dir)`.
    fn slope(&self, dir: &Field, t: f64) -> Result<f64> {
        Ok(inner(self.grid, &self.gradient(&dir.scaled(t))?, dir))
    }

    /// Local maximizer of `t -> I(t dir)` near `guess`, by regula falsi
    /// (Illinois variant) on the slope.
    fn ray_max(&self, dir: &Field, guess: f64) -> Result<f64> {
        let (mut lo, mut hi) = (guess, guess);
        let mut s_lo = self.slope(dir, lo)?;
        let mut s_hi = s_lo;
        let mut k = 0;
        while s_lo <= 0.0 {
            hi = lo;
            s_hi = s_lo;
            lo *= 0.5;
            s_lo = self.slope(dir, lo)?;
            k += 1;
            if k > 200 {
                return Err(KgmpError::Domain("energy does not increase along the ray".into()));
            }
        }
        while s_hi >= 0.0 {
            lo = hi;
            s_lo = s_hi;
            hi *= 2.0;
            s_hi = self.slope(dir, hi)?;
            k += 1;
            if k > 400 {
                return Err(KgmpError::NoNegativeEndpoint { scale_max: hi });
            }
        }
        let mut side = 0;
        for _ in 0..200 {
            if hi - lo <= 1e-14 * hi {
                break;
            }
            let t = (lo * s_hi - hi * s_lo) / (s_hi - s_lo);
            let t = if t > lo && t < hi { t } else { 0.5 * (lo + hi) };
            let st = self.slope(dir, t)?;
            if st == 0.0 {
                return Ok(t);
            }
            if st > 0.0 {
                lo = t;
                s_lo = st;
                if side == 1 {
                    s_hi *= 0.5;
                }
                side = 1;
            } else {
                hi = t;
                s_hi = st;
                if side == -1 {
                    s_lo *= 0.5;
                }
                side = -1;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Minimax search `inf_dir max_t I(t dir)` started from the straight path
/// `0 -> T seed`, followed by Newton refinement.
pub fn mountain_pass(
    grid: &RadialGrid,
    params: &Params,
    seed: &Field,
    cfg: &MPConfig,
) -> Result<SolveReport> {
    check_hypotheses(params)?;
    cfg.validate()?;
    let mut seed = seed.clone();
    if grid.geometry.is_dirichlet() {
        let last = grid.len() - 1;
        seed[last] = 0.0;
    }
    let (endpoint, scale) = find_endpoint(grid, params, &seed, cfg.endpoint_scale_max)?;
    let land = Landscape {
        grid,
        params,
        riesz: assemble(grid, &Field::constant(grid, 1.0))?,
    };

    // Highest node of the straight path seeds the first ray maximization.
    let length = land.h1_norm(&endpoint)?;
    let mut dir = endpoint.scaled(1.0 / length);
    let m = cfg.path_points;
    let mut best = (f64::NEG_INFINITY, 1);
    for k in 1..m {
        let e = land.energy(&endpoint.scaled(k as f64 / m as f64))?;
        if e > best.0 {
            best = (e, k);
        }
    }
    let mut t = land.ray_max(&dir, length * best.1 as f64 / m as f64)?;

    let mut history = Vec::new();
    let mut step = cfg.descent_step;
    let mut converged = None;
    let mut last_grad = f64::INFINITY;
    for iter in 0..cfg.max_outer_iters {
        let top = dir.scaled(t);
        let probe = land.probe(&top)?;
        history.push(probe.energy);
        last_grad = inner(grid, &probe.grad, &probe.grad).sqrt();
        if last_grad <= cfg.grad_tol {
            converged = Some((iter, top, probe.energy));
            break;
        }
        // At the ray maximum the Sobolev gradient is orthogonal to the ray.
        let decrease = inner(grid, &probe.grad, &probe.sobolev);
        let mut moved = false;
        for _ in 0..60 {
            let trial = top.axpy(-step, &probe.sobolev);
            let norm = land.h1_norm(&trial)?;
            if !(norm > 0.0) || trial.iter().all(|&x| x <= 0.0) {
                step *= 0.5;
                continue;
            }
            let trial_dir = trial.scaled(1.0 / norm);
            let Ok(trial_t) = land.ray_max(&trial_dir, norm) else {
                step *= 0.5;
                continue;
            };
            let e = land.energy(&trial_dir.scaled(trial_t))?;
            if e <= probe.energy - 1e-4 * step * decrease {
                dir = trial_dir;
                t = trial_t;
                step = (step * 1.5).min(4.0 * cfg.descent_step);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }

    let (path_iters, candidate, path_level) = match converged {
        Some(found) => found,
        None => {
            let tail = history.len().saturating_sub(100);
            return Err(KgmpError::NoConvergence {
                iterations: history.len(),
                grad_norm: last_grad,
                level_history: history[tail..].to_vec(),
            });
        }
    };
    let v0 = gauge_potential(grid, params, &candidate)?;
    let mut report = newton_refine_with(grid, params, &candidate, &v0, cfg)?;
    report.path_iters = path_iters;
    report.path_level = path_level;
    report.endpoint_scale = scale;
    if !report.is_accepted() {
        return Err(KgmpError::Rejected(format!(
            "refined residual {:e}, min u {:e}",
            report.residual(),
            report.min_u
        )));
    }
    Ok(report)
}

/// Residuals `F1 = L u + m0^2 u - (u^+)^{p-1} - omega^2 (1-qv)^2 u` and
/// `F2 = L v + (m1^2 + q^2 u^2) v - q u^2`.
pub fn coupled_residual(
    grid: &RadialGrid,
    params: &Params,
    u: &Field,
    v: &Field,
) -> Result<(Field, Field)> {
    grid.check(u)?;
    grid.check(v)?;
    let lap = assemble(grid, &Field::zeros(grid))?;
    let mut f1 = lap.apply(u)?;
    let mut f2 = lap.apply(v)?;
    let (m0sq, m1sq, q) = (params.m0 * params.m0, params.m1 * params.m1, params.q);
    let om2 = params.omega * params.omega;
    let last = grid.len() - 1;
    for i in 0..grid.len() {
        if grid.geometry.is_dirichlet() && i == last {
            continue;
        }
        let gap = 1.0 - q * v[i];
        f1[i] += m0sq * u[i] - u[i].max(0.0).powf(params.p - 1.0) - om2 * gap * gap * u[i];
        f2[i] += (m1sq + q * q * u[i] * u[i]) * v[i] - q * u[i] * u[i];
    }
    Ok((f1, f2))
}

fn jacobian(grid: &RadialGrid, params: &Params, u: &Field, v: &Field) -> Result<BandMatrix> {
    let lap = assemble(grid, &Field::zeros(grid))?;
    let (sub, sup, diag) = (lap.sub(), lap.sup(), lap.diag());
    let n = grid.len();
    let last = n - 1;
    let mut jac = BandMatrix::zeros(2 * n, 2, 2);
    let (m0sq, m1sq, q, p) = (params.m0 * params.m0, params.m1 * params.m1, params.q, params.p);
    let om2 = params.omega * params.omega;
    for i in 0..n {
        let (ru, rv) = (2 * i, 2 * i + 1);
        if grid.geometry.is_dirichlet() && i == last {
            jac.add(ru, ru, 1.0);
            jac.add(rv, rv, 1.0);
            continue;
        }
        if i > 0 {
            jac.add(ru, ru - 2, sub[i - 1]);
            jac.add(rv, rv - 2, sub[i - 1]);
        }
        if i < last {
            jac.add(ru, ru + 2, sup[i]);
            jac.add(rv, rv + 2, sup[i]);
        }
        let gap = 1.0 - q * v[i];
        let up = u[i].max(0.0);
        let dnl = if up > 0.0 { (p - 1.0) * up.powf(p - 2.0) } else { 0.0 };
        jac.add(ru, ru, diag[i] + m0sq - dnl - om2 * gap * gap);
        jac.add(ru, rv, 2.0 * q * om2 * gap * u[i]);
        jac.add(rv, ru, -2.0 * q * u[i] * gap);
        jac.add(rv, rv, diag[i] + m1sq + q * q * u[i] * u[i]);
    }
    Ok(jac)
}

fn max_abs2(a: &Field, b: &Field) -> (f64, f64) {
    (a.max_abs(), b.max_abs())
}

/// Damped Newton on the coupled system with default tolerances.
pub fn newton_refine(grid: &RadialGrid, params: &Params, u0: &Field, v0: &Field) -> Result<SolveReport> {
    newton_refine_with(grid, params, u0, v0, &MPConfig::default())
}

pub fn newton_refine_with(
    grid: &RadialGrid,
    params: &Params,
    u0: &Field,
    v0: &Field,
    cfg: &MPConfig,
) -> Result<SolveReport> {
    grid.check(u0)?;
    grid.check(v0)?;
    if !u0.is_finite() || !v0.is_finite() {
        return Err(KgmpError::Domain("Newton initial guess is not finite".into()));
    }
    let n = grid.len();
    let mut u = u0.clone();
    let mut v = v0.clone();
    let (mut f1, mut f2) = coupled_residual(grid, params, &u, &v)?;
    let mut history = Vec::new();
    let merit = |a: &Field, b: &Field| a.iter().chain(b.iter()).map(|x| x * x).sum::<f64>().sqrt();
    let mut iters = 0;
    loop {
        let (r1, r2) = max_abs2(&f1, &f2);
        history.push(r1.max(r2));
        if r1.max(r2) <= cfg.newton_tol {
            break;
        }
        if iters == cfg.newton_max_iters {
            if r1.max(r2) <= ACCEPT_RESIDUAL {
                break;
            }
            return Err(KgmpError::NewtonDiverged {
                iterations: iters,
                residual: r1.max(r2),
            });
        }
        let jac = jacobian(grid, params, &u, &v)?;
        let rhs: Vec<f64> = (0..n).flat_map(|i| [-f1[i], -f2[i]]).collect();
        let delta = jac.solve(&rhs)?;
        let du = Field::new((0..n).map(|i| delta[2 * i]).collect());
        let dv = Field::new((0..n).map(|i| delta[2 * i + 1]).collect());
        let current = merit(&f1, &f2);
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..20 {
            let (tu, tv) = (u.axpy(lambda, &du), v.axpy(lambda, &dv));
            let (g1, g2) = coupled_residual(grid, params, &tu, &tv)?;
            let m = merit(&g1, &g2);
            if m.is_finite() && m < (1.0 - 1e-4 * lambda) * current {
                accepted = Some((tu, tv, g1, g2));
                break;
            }
            lambda *= 0.5;
        }
        iters += 1;
        match accepted {
            Some((tu, tv, g1, g2)) => {
                u = tu;
                v = tv;
                f1 = g1;
                f2 = g2;
            }
            // Rounding floor: no further decrease is possible.
            None if r1.max(r2) <= ACCEPT_RESIDUAL => break,
            None => {
                return Err(KgmpError::NewtonDiverged {
                    iterations: iters,
                    residual: r1.max(r2),
                })
            }
        }
    }
    let (residual1, residual2) = max_abs2(&f1, &f2);
    let phi = gauge_potential(grid, params, &u)?;
    let level_c = energy_with_gauge(grid, params, &u, &phi).total;
    let grad = grad_energy_with_gauge(grid, params, &u, &phi)?;
    let min_u = if grid.geometry.is_dirichlet() {
        u[..n - 1].iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        u.min()
    };
    Ok(SolveReport {
        grad_norm: inner(grid, &grad, &grad).sqrt(),
        u,
        v,
        level_c,
        residual1,
        residual2,
        newton_iters: iters,
        min_u,
        residual_history: history,
        path_iters: 0,
        path_level: level_c,
        endpoint_scale: 0.0,
    })
}

/// Positive constant solution `(c, V(c))` of the coupled system, from the
/// scalar equation `m0^2 = c^{p-2} + omega^2 (1 - q V(c))^2` with
/// `V(c) = q c^2 / (m1^2 + q^2 c^2)`.
pub fn constant_solution(params: &Params) -> Option<(f64, f64)> {
    let (m0sq, m1sq, q, p) = (params.m0 * params.m0, params.m1 * params.m1, params.q, params.p);
    let om2 = params.omega * params.omega;
    let gauge = |c: f64| q * c * c / (m1sq + q * q * c * c);
    if om2 == 0.0 {
        let c = m0sq.powf(1.0 / (p - 2.0));
        return Some((c, gauge(c)));
    }
    let f = |c: f64| {
        let gap = m1sq / (m1sq + q * q * c * c);
        c.powf(p - 2.0) + om2 * gap * gap - m0sq
    };
    // Logarithmic scan for the first sign change, then bisection.
    let mut lo = 1e-8;
    let mut flo = f(lo);
    let mut bracket = None;
    for k in 1..=280 {
        let hi = 1e-8 * 10f64.powf(k as f64 / 20.0);
        let fhi = f(hi);
        if flo == 0.0 {
            bracket = Some((lo, lo));
            break;
        }
        if flo.signum() != fhi.signum() {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        flo = fhi;
    }
    let (mut a, mut b) = bracket?;
    let fa_sign = f(a).signum();
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if f(mid).signum() == fa_sign {
            a = mid;
        } else {
            b = mid;
        }
    }
    let c = if f(a).abs() <= f(b).abs() { a } else { b };
    (f(c).abs() <= 1e-12 * m0sq.max(1.0)).then(|| (c, gauge(c)))
}
