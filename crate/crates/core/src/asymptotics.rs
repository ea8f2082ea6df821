//! Concentration diagnostics: bubbles, the explicit blow-up family on the
//! sphere, the phase-compensation ratio, rescaled gauge profiles, the
//! terms of the Riemannian Pohozaev identity, and the threshold potential
//! `h(u) = phi(sqrt((n-2)/n)|u|^{n/(n-2)} - |u'|)` used to show that the
//! curvature condition cannot be dropped for solution-dependent potentials.

use serde::{Deserialize, Serialize};

use crate::elliptic::assemble;
use crate::error::{KgmpError, Result};
use crate::gauge::gauge_potential;
use crate::model::{
    build_grid, composite_gauss_legendre, gamma_half_integer, gauss_legendre5,
    sphere_area_unchecked, weighted_sum, Field, Geometry, GeometryKind, Params, RadialGrid,
};

/// Grid size used by the ratio and profile experiments when none is given.
pub const DEFAULT_RATIO_INTERVALS: usize = 4000;
/// Nodes required inside `r < mu` before a bubble counts as resolved.
pub const MIN_CORE_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleSpec {
    pub mu: f64,
    pub n: usize,
}

impl BubbleSpec {
    pub fn new(mu: f64, n: usize) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(KgmpError::Domain(format!("bubble weight mu = {mu} must be positive")));
        }
        if n < 3 {
            return Err(KgmpError::Domain(format!("bubble dimension n = {n} < 3")));
        }
        Ok(BubbleSpec { mu, n })
    }

    pub fn value(&self, r: f64) -> f64 {
        let nf = self.n as f64;
        let base = self.mu / (self.mu * self.mu + r * r / (nf * (nf - 2.0)));
        base.powf(0.5 * (nf - 2.0))
    }
}

/// `B_mu(r) = (mu / (mu^2 + r^2/(n(n-2))))^{(n-2)/2}` at the grid nodes.
pub fn bubble(grid: &RadialGrid, spec: &BubbleSpec) -> Field {
    Field::from_fn(grid, |r| spec.value(r))
}

/// Limit profile `u0(x) = (1 + |x|^2/(n(n-2)))^{-(n-2)/2}` on `R^n`.
pub fn limit_profile(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    (1.0 + x * x / (nf * (nf - 2.0))).powf(-0.5 * (nf - 2.0))
}

fn require_sphere(grid: &RadialGrid, what: &str) -> Result<()> {
    if grid.geometry.kind != GeometryKind::SphereN {
        return Err(KgmpError::Domain(format!("{what} needs a sphere grid")));
    }
    Ok(())
}

/// Explicit positive solution of `Delta u + n(n-2)/4 u = u^{2*-1}` on the
/// round sphere, concentrating at the pole as `beta -> 1`.
pub fn sphere_solution(grid: &RadialGrid, beta: f64) -> Result<Field> {
    require_sphere(grid, "sphere_solution")?;
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(KgmpError::Domain(format!("beta = {beta} must exceed 1")));
    }
    let nf = grid.dim() as f64;
    let amp = (0.25 * nf * (nf - 2.0) * (beta * beta - 1.0)).powf(0.25 * (nf - 2.0));
    Ok(Field::from_fn(grid, |r| {
        amp * (beta - r.cos()).powf(-0.5 * (nf - 2.0))
    }))
}

/// Concentration scale `mu = u(0)^{-2/(n-2)}` of the sphere solution.
pub fn sphere_solution_mu(n: usize, beta: f64) -> f64 {
    let a = 0.25 * (n * (n - 2)) as f64;
    ((beta - 1.0) / (a * (beta + 1.0))).sqrt()
}

/// Inverse of [`sphere_solution_mu`].
pub fn beta_for_mu(n: usize, mu: f64) -> Result<f64> {
    let a = 0.25 * (n * (n - 2)) as f64;
    let t = a * mu * mu;
    if !(mu > 0.0 && t < 1.0) {
        return Err(KgmpError::Domain(format!("no sphere solution with mu = {mu}")));
    }
    Ok((1.0 + t) / (1.0 - t))
}

/// Max-norm residual of `L u + m0^2 u - (u^+)^{p-1}` on the grid.
pub fn scalar_residual(grid: &RadialGrid, m0_sq: f64, p: f64, u: &Field) -> Result<f64> {
    let lu = assemble(grid, &Field::constant(grid, m0_sq))?.apply(u)?;
    Ok(lu
        .iter()
        .zip(u.iter())
        .map(|(l, x)| (l - x.max(0.0).powf(p - 1.0)).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRatioReport {
    pub n: usize,
    pub mu: f64,
    pub intervals: usize,
    pub ratio: f64,
    /// Nodes with `r < mu`.
    pub core_nodes: usize,
    pub warning: Option<String>,
}

/// `int Phi(B_mu) B_mu^2 / int B_mu^2` on a sphere grid graded with `gamma = 2`.
pub fn phase_ratio(params: &Params, mu: f64, intervals: usize) -> Result<PhaseRatioReport> {
    let spec = BubbleSpec::new(mu, params.n)?;
    let grid = build_grid(Geometry::sphere(params.n)?, intervals, 2.0)?;
    let b = bubble(&grid, &spec);
    let v = gauge_potential(&grid, params, &b)?;
    let b2: Vec<f64> = b.iter().map(|x| x * x).collect();
    let vb2: Vec<f64> = b2.iter().zip(v.iter()).map(|(x, y)| x * y).collect();
    let ratio = weighted_sum(&grid, &vb2) / weighted_sum(&grid, &b2);
    let core_nodes = grid.nodes.iter().filter(|&&r| r < mu).count();
    let warning = (core_nodes < MIN_CORE_NODES).then(|| {
        format!("under-resolved bubble: {core_nodes} nodes inside r < {mu}, need {MIN_CORE_NODES}")
    });
    Ok(PhaseRatioReport {
        n: params.n,
        mu,
        intervals,
        ratio,
        core_nodes,
        warning,
    })
}

/// `Phi(B_mu)` sampled at `r = mu * x` by linear interpolation.
pub fn rescaled_gauge_profile(
    params: &Params,
    mu: f64,
    sample_points: &[f64],
    intervals: usize,
) -> Result<Vec<f64>> {
    let spec = BubbleSpec::new(mu, params.n)?;
    let grid = build_grid(Geometry::sphere(params.n)?, intervals, 2.0)?;
    let v = gauge_potential(&grid, params, &bubble(&grid, &spec))?;
    sample_points
        .iter()
        .map(|&x| interpolate(&grid, &v, mu * x))
        .collect()
}

/// Piecewise linear interpolation of a field.
pub fn interpolate(grid: &RadialGrid, f: &Field, r: f64) -> Result<f64> {
    let nodes = &grid.nodes;
    if !(r >= 0.0 && r <= grid.geometry.r_max) {
        return Err(KgmpError::Domain(format!("r = {r} outside [0, {}]", grid.geometry.r_max)));
    }
    let j = nodes.partition_point(|&x| x <= r).clamp(1, nodes.len() - 1);
    let t = (r - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
    Ok((1.0 - t) * f[j - 1] + t * f[j])
}

/// Second-order radial derivative at interior nodes; zero at the pole
/// (radial symmetry) and one-sided at the outer end.
fn radial_derivative(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let r = &grid.nodes;
    let last = r.len() - 1;
    (0..=last)
        .map(|i| {
            if i == 0 {
                0.0
            } else if i == last {
                (u[i] - u[i - 1]) / (r[i] - r[i - 1])
            } else {
                weighted_slope(r, u, i)
            }
        })
        .collect()
}

fn weighted_slope(r: &[f64], u: &[f64], i: usize) -> f64 {
    let (hm, hp) = (r[i] - r[i - 1], r[i + 1] - r[i]);
    let (sm, sp) = ((u[i] - u[i - 1]) / hm, (u[i + 1] - u[i]) / hp);
    (hm * sp + hp * sm) / (hm + hp)
}

/// The radial vector field `X = a(r) d_r` and its divergence.
#[derive(Debug, Clone, Copy)]
pub struct PohozaevField {
    n: usize,
    kind: GeometryKind,
}

impl PohozaevField {
    pub fn new(geometry: &Geometry) -> Self {
        PohozaevField {
            n: geometry.n,
            kind: geometry.kind,
        }
    }

    pub fn a(&self, r: f64) -> f64 {
        match self.kind {
            GeometryKind::SphereN => r * (1.0 - r * r / 6.0),
            GeometryKind::EuclideanBall => r,
        }
    }

    pub fn a_prime(&self, r: f64) -> f64 {
        match self.kind {
            GeometryKind::SphereN => 1.0 - 0.5 * r * r,
            GeometryKind::EuclideanBall => 1.0,
        }
    }

    /// `a' + (n-1) (w'/w) a`, continued by its limit `n` at the pole.
    pub fn div(&self, r: f64) -> f64 {
        let k = (self.n - 1) as f64;
        match self.kind {
            GeometryKind::EuclideanBall => self.n as f64,
            GeometryKind::SphereN if r < 1e-4 => {
                // Series n - n r^2 / 2, exact to O(r^4).
                self.n as f64 * (1.0 - 0.5 * r * r)
            }
            GeometryKind::SphereN => {
                let (s, c) = r.sin_cos();
                if s < 1e-12 {
                    return f64::NAN;
                }
                self.a_prime(r) + k * c / s * self.a(r)
            }
        }
    }

    pub fn div_prime(&self, r: f64) -> f64 {
        let k = (self.n - 1) as f64;
        match self.kind {
            GeometryKind::EuclideanBall => 0.0,
            GeometryKind::SphereN if r < 1e-4 => -(1.0 + k) * r,
            GeometryKind::SphereN => {
                let (s, c) = r.sin_cos();
                -r + k * (-(self.a(r)) / (s * s) + c / s * self.a_prime(r))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    /// Radius actually used (nearest node to the request).
    pub r0: f64,
    pub lhs_mass: f64,
    pub lhs_curv: f64,
    pub r_tilde: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    /// `(c - 1/p) int div X (u^+)^p`; vanishes at the critical exponent.
    pub nonlinear_defect: f64,
    pub balance_residual: f64,
    pub note: Option<String>,
}

/// Terms of the Pohozaev identity for `X = a(r) d_r` on the geodesic ball
/// `B(r0)` around the pole:
///
/// `m0^2 int Psi + (n-2)/(4n) int u^2 Delta(div X) = omega^2 R + Q1 - Q2 + Q3`,
///
/// with `Psi = u X(grad u) + (n-2)/(2n) div X u^2`.
pub fn pohozaev_terms(
    grid: &RadialGrid,
    params: &Params,
    u: &Field,
    v: &Field,
    r0: f64,
) -> Result<PohozaevReport> {
    grid.check(u)?;
    grid.check(v)?;
    let geometry = grid.geometry;
    if !(r0 > 0.0 && r0 < geometry.r_max) {
        return Err(KgmpError::Domain(format!(
            "r0 = {r0} must lie in (0, {})",
            geometry.r_max
        )));
    }
    let k = grid.nearest_node(r0);
    if k == 0 || k + 1 >= grid.len() {
        return Err(KgmpError::Domain(format!("r0 = {r0} too close to the grid ends")));
    }
    let rk = grid.nodes[k];
    let note = (rk != r0).then(|| format!("r0 = {r0} snapped to node {k} at r = {rk}"));

    let nf = params.n as f64;
    let c = (nf - 2.0) / (2.0 * nf);
    let field = PohozaevField::new(&geometry);
    let nodes = &grid.nodes;

    // Weights of B(r0): full dual cells below node k, half cell at node k.
    let area = sphere_area_unchecked(geometry.n - 1);
    let mut weights = grid.cell_weights[..k].to_vec();
    weights.push(area * gauss_legendre5(|r| geometry.density(r), grid.face_position(k - 1), rk));

    let du = radial_derivative(grid, u);
    let div: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let d = field.div(r);
            if d.is_finite() {
                d
            } else {
                field.div(nodes[i - 1])
            }
        })
        .collect();
    let lap_div = assemble(grid, &Field::zeros(grid))?.apply(&Field::new(div.clone()))?;

    let mut lhs_mass = 0.0;
    let mut lhs_curv = 0.0;
    let mut r_tilde = 0.0;
    let mut q2 = 0.0;
    let mut defect = 0.0;
    for i in 0..=k {
        let (r, w) = (nodes[i], weights[i]);
        let psi = u[i] * field.a(r) * du[i] + c * div[i] * u[i] * u[i];
        let gap = params.q * v[i] - 1.0;
        lhs_mass += w * psi;
        lhs_curv += w * lap_div[i] * u[i] * u[i];
        r_tilde += w * gap * gap * psi;
        q2 += w * (field.a_prime(r) - div[i] / nf) * du[i] * du[i];
        defect += w * div[i] * u[i].max(0.0).powf(params.p);
    }
    lhs_curv *= (nf - 2.0) / (4.0 * nf);
    defect *= c - 1.0 / params.p;

    let shell = geometry.shell_area(rk);
    let (uk, dk, ak) = (u[k], du[k], field.a(rk));
    let q1 = shell * (c * div[k] * dk * uk + 0.5 * ak * dk * dk);
    let q3 = shell
        * (ak * uk.max(0.0).powf(params.p) / params.p
            - (nf - 2.0) / (4.0 * nf) * field.div_prime(rk) * uk * uk);

    let m0_sq = params.m0 * params.m0;
    let omega_sq = params.omega * params.omega;
    let lhs = m0_sq * lhs_mass + lhs_curv;
    let rhs = omega_sq * r_tilde + q1 - q2 + q3 + defect;
    Ok(PohozaevReport {
        r0: rk,
        lhs_mass,
        lhs_curv,
        r_tilde,
        q1,
        q2,
        q3,
        nonlinear_defect: defect,
        balance_residual: (lhs - rhs).abs(),
        note,
    })
}

/// `C_n = int_{R^n} u0^2 dx`, finite for `n >= 5`.
pub fn profile_mass(n: usize) -> Result<f64> {
    if n < 5 {
        return Err(KgmpError::Domain(format!("u0 is not square integrable for n = {n}")));
    }
    // Beta-function form of the radial integral after r = sqrt(n(n-2)) y.
    let nf = n as f64;
    let beta = gamma_half_integer(n) * gamma_half_integer(n - 4) / gamma_half_integer(2 * n - 4);
    Ok(sphere_area_unchecked(n - 1) * (nf * (nf - 2.0)).powf(0.5 * nf) * 0.5 * beta)
}

/// `int_{|x| < sqrt(n(n-2))} ((n-2)/2 u0^2 + x.grad u0 u0) dx`.
pub fn core_pohozaev_mass(n: usize) -> f64 {
    let nf = n as f64;
    let a = nf * (nf - 2.0);
    let integrand = |r: f64| {
        let u0 = limit_profile(n, r);
        let du0 = -(nf - 2.0) * (r / a) * (1.0 + r * r / a).powf(-0.5 * nf);
        r.powi(n as i32 - 1) * ((nf - 2.0) / 2.0 * u0 * u0 + r * du0 * u0)
    };
    sphere_area_unchecked(n - 1) * composite_gauss_legendre(integrand, 0.0, a.sqrt(), 400)
}

/// Default threshold constant: the larger of the two lower bounds imposed
/// on `K` (one through `min S_g`, one through `max S_g`), plus 10%.
pub fn k_tilde_default(geometry: &Geometry) -> Result<f64> {
    let n = geometry.n;
    if n < 5 {
        return Err(KgmpError::Domain(format!("threshold potential needs n >= 5, got {n}")));
    }
    let yamabe = (n - 2) as f64 / (4.0 * (n - 1) as f64);
    let s = geometry.scalar_curvature();
    let via_min = profile_mass(n)? / core_pohozaev_mass(n) * (-yamabe * s);
    let bound = via_min.max(yamabe * s);
    if !(bound > 0.0) {
        return Err(KgmpError::Domain(
            "flat geometry leaves the threshold constant unconstrained".into(),
        ));
    }
    Ok(1.1 * bound)
}

/// Quintic smoothstep ramp: 0 for `s <= -1`, `k` for `s >= 0`.
pub fn ramp(s: f64, k: f64) -> f64 {
    let t = (s + 1.0).clamp(0.0, 1.0);
    k * t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Node-wise `phi(sqrt((n-2)/n)|u|^{n/(n-2)} - |u'|)`.
pub fn hcheck_potential(grid: &RadialGrid, u: &Field, k_tilde: f64) -> Result<Field> {
    grid.check(u)?;
    if !(k_tilde > 0.0) {
        return Err(KgmpError::Domain(format!("K = {k_tilde} must be positive")));
    }
    let nf = grid.dim() as f64;
    let scale = ((nf - 2.0) / nf).sqrt();
    let expo = nf / (nf - 2.0);
    let r = &grid.nodes;
    let last = r.len() - 1;
    let values = (0..=last)
        .map(|i| {
            let slope = if i == 0 {
                (u[1] - u[0]) / (r[1] - r[0])
            } else if i == last {
                (u[i] - u[i - 1]) / (r[i] - r[i - 1])
            } else {
                weighted_slope(r, u, i)
            };
            ramp(scale * u[i].abs().powf(expo) - slope.abs(), k_tilde)
        })
        .collect();
    Ok(Field::new(values))
}

/// `(K^{(n-2)/4}, q K^{(n-2)/2} / (m1^2 + q^2 K^{(n-2)/2}))`.
pub fn hcheck_constant_pair(params: &Params, k_tilde: f64) -> (f64, f64) {
    let nf = params.n as f64;
    let u = k_tilde.powf(0.25 * (nf - 2.0));
    let u2 = k_tilde.powf(0.5 * (nf - 2.0));
    let v = params.q * u2 / (params.m1 * params.m1 + params.q * params.q * u2);
    (u, v)
}

/// Max-norm residuals of the modified critical system
/// `Delta u + (h(u) + omega^2(1-qv)^2) u = u^{2*-1} + omega^2(1-qv)^2 u`,
/// `Delta v + (m1^2 + q^2 u^2) v = q u^2`.
pub fn hcheck_residual(
    grid: &RadialGrid,
    params: &Params,
    u: &Field,
    v: &Field,
    k_tilde: f64,
) -> Result<(f64, f64)> {
    grid.check(u)?;
    grid.check(v)?;
    let h = hcheck_potential(grid, u, k_tilde)?;
    let crit = params.critical_exponent();
    let om2 = params.omega * params.omega;
    let lap = assemble(grid, &Field::zeros(grid))?;
    let lu = lap.apply(u)?;
    let lv = lap.apply(v)?;
    let mut r1: f64 = 0.0;
    let mut r2: f64 = 0.0;
    for i in 0..grid.len() {
        let phase = om2 * (1.0 - params.q * v[i]).powi(2);
        let f1 = lu[i] + (h[i] + phase) * u[i] - u[i].max(0.0).powf(crit - 1.0) - phase * u[i];
        let pot = params.m1 * params.m1 + params.q * params.q * u[i] * u[i];
        let f2 = lv[i] + pot * v[i] - params.q * u[i] * u[i];
        r1 = r1.max(f1.abs());
        r2 = r2.max(f2.abs());
    }
    Ok((r1, r2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn s(n: usize, intervals: usize, grading: f64) -> RadialGrid {
        build_grid(Geometry::sphere(n).unwrap(), intervals, grading).unwrap()
    }

    #[test]
    fn bubble_peak_and_rescaling() {
        let g = s(5, 200, 2.0);
        for mu in [0.3, 0.05, 1e-3] {
            let spec = BubbleSpec::new(mu, 5).unwrap();
            let b = bubble(&g, &spec);
            assert!((b[0] - mu.powf(-1.5)).abs() <= 1e-12 * b[0]);
            assert!(b.windows(2).all(|w| w[1] < w[0]));
            for &r in g.nodes.iter().take(50) {
                let x = r / mu;
                let lhs = mu.powf(1.5) * spec.value(mu * x);
                assert!((lhs - limit_profile(5, x)).abs() <= 1e-12);
            }
        }
        assert!(BubbleSpec::new(0.0, 5).is_err());
        assert!(BubbleSpec::new(-1.0, 5).is_err());
    }

    #[test]
    fn sphere_solution_peak_and_mu() {
        let g = s(5, 64, 1.0);
        let beta = 1.5;
        let u = sphere_solution(&g, beta).unwrap();
        let expect = (3.75 * (beta * beta - 1.0)).powf(0.75) * (beta - 1.0).powf(-1.5);
        assert!((u[0] - expect).abs() < 1e-12 * expect);
        let mu = sphere_solution_mu(5, beta);
        assert!((mu - u[0].powf(-2.0 / 3.0)).abs() < 1e-12);
        assert!((beta_for_mu(5, mu).unwrap() - beta).abs() < 1e-12);
        assert!(sphere_solution(&g, 1.0).is_err());
        let ball = build_grid(Geometry::ball(5, 1.0).unwrap(), 16, 1.0).unwrap();
        assert!(sphere_solution(&ball, 1.5).is_err());
    }

    #[test]
    fn sphere_solution_residual_is_second_order() {
        let res = |intervals| {
            let g = s(5, intervals, 1.0);
            let u = sphere_solution(&g, 1.5).unwrap();
            scalar_residual(&g, 3.75, 10.0 / 3.0, &u).unwrap()
        };
        let (a, b, c) = (res(200), res(400), res(800));
        for ratio in [a / b, b / c] {
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn critical_norm_is_conformally_invariant() {
        // Oracle: fine composite Gauss-Legendre quadrature of the closed form.
        let exact = |beta: f64| {
            let amp = (3.75 * (beta * beta - 1.0)).powf(0.75);
            let f = |r: f64| {
                let u = amp * (beta - r.cos()).powf(-1.5);
                u.powf(10.0 / 3.0) * r.sin().powi(4)
            };
            sphere_area_unchecked(4) * composite_gauss_legendre(f, 0.0, PI, 4000)
        };
        let (e15, e12) = (exact(1.5), exact(1.2));
        assert!((e15 - e12).abs() < 1e-9 * e15);
        let g = s(5, 1000, 2.0);
        for (beta, e) in [(1.5, e15), (1.2, e12)] {
            let u = sphere_solution(&g, beta).unwrap();
            let d = weighted_sum(&g, &u.map(|x| x.powf(10.0 / 3.0)));
            assert!((d - e).abs() < 1e-2 * e);
        }
    }

    #[test]
    fn divergence_near_pole() {
        let f = PohozaevField::new(&Geometry::sphere(5).unwrap());
        for r in [1e-5, 1e-3, 1e-2, 0.1] {
            assert!((f.div(r) - 5.0).abs() <= 3.0 * r * r);
        }
        // Series and closed form agree across the switch.
        let (lo, hi) = (f.div(0.99999e-4), f.div(1.00001e-4));
        assert!((lo - hi).abs() < 1e-10);
        // Derivative against a central difference.
        for r in [0.3, 1.0, 2.0] {
            let fd = (f.div(r + 1e-6) - f.div(r - 1e-6)) / 2e-6;
            assert!((fd - f.div_prime(r)).abs() < 1e-7);
        }
    }

    #[test]
    fn profile_mass_matches_quadrature() {
        for n in [5usize, 6, 7] {
            // Oracle: tan substitution maps [0, inf) onto [0, pi/2).
            let f = |t: f64| {
                let r = t.tan();
                let u0 = limit_profile(n, r);
                r.powi(n as i32 - 1) * u0 * u0 / (t.cos() * t.cos())
            };
            let quad = sphere_area_unchecked(n - 1)
                * composite_gauss_legendre(f, 0.0, 0.5 * PI - 1e-9, 20000);
            let closed = profile_mass(n).unwrap();
            let tail = if n == 5 { 1e-3 } else { 1e-5 };
            assert!((quad - closed).abs() < tail * closed, "n={n}: {quad} vs {closed}");
        }
        let c5 = profile_mass(5).unwrap();
        let expect = sphere_area_unchecked(4) * 15f64.powf(2.5) * 3.0 * PI / 16.0;
        assert!((c5 - expect).abs() < 1e-10 * expect);
        assert!(profile_mass(4).is_err());
        assert!(core_pohozaev_mass(5) > 0.0);
    }

    #[test]
    fn threshold_constant_default() {
        let k = k_tilde_default(&Geometry::sphere(5).unwrap()).unwrap();
        assert!((k - 1.1 * 3.75).abs() < 1e-12);
        assert!(k_tilde_default(&Geometry::ball(5, 1.0).unwrap()).is_err());
        assert!(k_tilde_default(&Geometry::sphere(3).unwrap()).is_err());
    }

    #[test]
    fn ramp_shape() {
        assert_eq!(ramp(-1.5, 2.0), 0.0);
        assert_eq!(ramp(-1.0, 2.0), 0.0);
        assert_eq!(ramp(0.0, 2.0), 2.0);
        assert_eq!(ramp(3.0, 2.0), 2.0);
        assert!((ramp(-0.5, 2.0) - 1.0).abs() < 1e-15);
        let xs: Vec<f64> = (0..=100).map(|i| -1.0 + i as f64 / 100.0).collect();
        assert!(xs.windows(2).all(|w| ramp(w[1], 1.0) >= ramp(w[0], 1.0)));
    }

    #[test]
    fn hcheck_constant_solution() {
        let g = s(5, 64, 1.0);
        let params = Params::critical(5, 1.0, 1.0, 1.0, 0.3).unwrap();
        let k = k_tilde_default(&g.geometry).unwrap();
        let (c, v) = hcheck_constant_pair(&params, k);
        let u = Field::constant(&g, c);
        let h = hcheck_potential(&g, &u, k).unwrap();
        assert!(h.iter().all(|&x| x == k));
        let (r1, r2) = hcheck_residual(&g, &params, &u, &Field::constant(&g, v), k).unwrap();
        assert!(r1 <= 1e-10 && r2 <= 1e-10, "{r1} {r2}");
        // A bump with a critical point at the pole attains the maximum there.
        let bump = Field::from_fn(&g, |r| 0.2 + 0.1 * r.cos());
        let h = hcheck_potential(&g, &bump, k).unwrap();
        assert!(h.iter().all(|&x| (0.0..=k).contains(&x)));
        assert!(hcheck_potential(&g, &bump, 0.0).is_err());
    }

    #[test]
    fn pohozaev_balance_on_sphere_solution() {
        let params = Params::critical(5, 3.75f64.sqrt(), 1.0, 1.0, 0.0).unwrap();
        let balance = |intervals| {
            let g = s(5, intervals, 2.0);
            let u = sphere_solution(&g, 1.05).unwrap();
            let v = gauge_potential(&g, &params, &u).unwrap();
            let rep = pohozaev_terms(&g, &params, &u, &v, 1.0).unwrap();
            assert!(rep.nonlinear_defect.abs() < 1e-9 * rep.q3.abs().max(1.0));
            (rep.balance_residual, rep.lhs_curv.abs())
        };
        let ((a, _), (b, scale)) = (balance(400), balance(800));
        assert!(a / b >= 3.0, "{a} {b}");
        assert!(b < 2e-4 * scale);
    }

    #[test]
    fn pohozaev_snaps_and_rejects() {
        let g = s(5, 64, 1.0);
        let params = Params::critical(5, 1.0, 1.0, 1.0, 0.0).unwrap();
        let u = Field::constant(&g, 1.0);
        let rep = pohozaev_terms(&g, &params, &u, &u, 1.0).unwrap();
        assert!(rep.note.is_some());
        assert_eq!(rep.r0, g.nodes[g.nearest_node(1.0)]);
        assert!(pohozaev_terms(&g, &params, &u, &u, PI).is_err());
        assert!(pohozaev_terms(&g, &params, &u, &u, 0.0).is_err());
    }

    #[test]
    fn interpolation_and_profile_bounds() {
        let g = s(3, 32, 1.0);
        let f = Field::from_fn(&g, |r| 2.0 * r + 1.0);
        assert!((interpolate(&g, &f, 0.123).unwrap() - 1.246).abs() < 1e-12);
        assert!(interpolate(&g, &f, 4.0).is_err());
        let params = Params::new(3, 4.0, 1.0, 1.0, 2.0, 0.0).unwrap();
        let vals = rescaled_gauge_profile(&params, 0.1, &[0.0, 1.0, 2.0], 400).unwrap();
        assert!(vals.iter().all(|&x| (0.0..=0.5).contains(&x)));
        assert!(rescaled_gauge_profile(&params, 0.1, &[100.0], 400).is_err());
    }

    #[test]
    fn phase_ratio_report_fields() {
        let params = Params::critical(5, 1.0, 1.0, 1.0, 0.0).unwrap();
        let rep = phase_ratio(&params, 1e-3, 64).unwrap();
        assert!(rep.warning.is_some());
        assert!((0.0..=1.0).contains(&rep.ratio));
        let rep = phase_ratio(&params, 0.1, 400).unwrap();
        assert!(rep.warning.is_none());
        assert!(rep.core_nodes >= MIN_CORE_NODES);
    }
}
