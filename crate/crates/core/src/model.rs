//! Physical parameters, rotationally symmetric model geometries and the
//! geodesic-polar grids every other module works on.
//!
//! A radial function on the model manifold is sampled at nodes
//! `0 = r_0 < r_1 < ... < r_N = r_max`. Node `i` owns the dual cell
//! `[r_{i-1/2}, r_{i+1/2}]` (midpoints, clipped to `[0, r_max]`), and its
//! quadrature weight is the metric volume of the corresponding shell,
//! `|S^{n-1}| * int w(r) dr` with `w = sin^{n-1}` on the sphere and
//! `w = r^{n-1}` on the ball.

use std::f64::consts::PI;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{KgmpError, Result};

/// Physical constants of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub p: f64,
    pub m0: f64,
    pub m1: f64,
    pub q: f64,
    pub omega: f64,
}

impl Params {
    pub fn new(n: usize, p: f64, m0: f64, m1: f64, q: f64, omega: f64) -> Result<Self> {
        let params = Params {
            n,
            p,
            m0,
            m1,
            q,
            omega,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters with the Sobolev-critical exponent `p = 2n/(n-2)`.
    pub fn critical(n: usize, m0: f64, m1: f64, q: f64, omega: f64) -> Result<Self> {
        if n < 3 {
            return Err(KgmpError::InvalidParams(format!("dimension n = {n} < 3")));
        }
        Self::new(n, critical_exponent(n), m0, m1, q, omega)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(KgmpError::InvalidParams(format!(
                "dimension n = {} < 3",
                self.n
            )));
        }
        let crit = critical_exponent(self.n);
        if !(self.p > 2.0 && self.p <= crit * (1.0 + 1e-14)) {
            return Err(KgmpError::InvalidParams(format!(
                "exponent p = {} outside (2, {}]",
                self.p, crit
            )));
        }
        for (name, value) in [("m0", self.m0), ("m1", self.m1), ("q", self.q)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(KgmpError::InvalidParams(format!(
                    "{name} = {value} must be positive"
                )));
            }
        }
        if !self.omega.is_finite() {
            return Err(KgmpError::InvalidParams("omega is not finite".into()));
        }
        Ok(())
    }

    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.n)
    }

    pub fn is_critical(&self) -> bool {
        (self.p - self.critical_exponent()).abs() <= 1e-12 * self.p
    }

    /// `|omega| < m0`, the phase range both existence results concern.
    pub fn phase_admissible(&self) -> bool {
        self.omega.abs() < self.m0
    }
}

/// `2* = 2n/(n-2)`.
pub fn critical_exponent(n: usize) -> f64 {
    let n = n as f64;
    2.0 * n / (n - 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometryKind {
    /// Round unit sphere, `r` is the geodesic distance to a pole.
    SphereN,
    /// Flat ball with homogeneous Dirichlet data at `r_max`.
    EuclideanBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub kind: GeometryKind,
    pub n: usize,
    pub r_max: f64,
}

impl Geometry {
    pub fn sphere(n: usize) -> Result<Self> {
        Self::new(GeometryKind::SphereN, n, PI)
    }

    pub fn ball(n: usize, r_max: f64) -> Result<Self> {
        Self::new(GeometryKind::EuclideanBall, n, r_max)
    }

    pub fn new(kind: GeometryKind, n: usize, r_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(KgmpError::Domain(format!("dimension n = {n} < 2")));
        }
        let ok = match kind {
            GeometryKind::SphereN => r_max > 0.0 && r_max <= PI,
            GeometryKind::EuclideanBall => r_max > 0.0 && r_max.is_finite(),
        };
        if !ok {
            return Err(KgmpError::Domain(format!(
                "r_max = {r_max} invalid for {kind:?}"
            )));
        }
        Ok(Geometry { kind, n, r_max })
    }

    /// Radial density of the volume form, without the `|S^{n-1}|` factor.
    pub fn density(&self, r: f64) -> f64 {
        let k = (self.n - 1) as i32;
        match self.kind {
            GeometryKind::SphereN => r.sin().powi(k),
            GeometryKind::EuclideanBall => r.powi(k),
        }
    }

    /// Area of the geodesic sphere of radius `r`.
    pub fn shell_area(&self, r: f64) -> f64 {
        sphere_area_unchecked(self.n - 1) * self.density(r)
    }

    pub fn volume(&self) -> f64 {
        match self.kind {
            GeometryKind::SphereN if self.r_max == PI => sphere_area_unchecked(self.n),
            _ => {
                let density = |r: f64| self.shell_area(r);
                composite_gauss_legendre(density, 0.0, self.r_max, 256)
            }
        }
    }

    pub fn scalar_curvature(&self) -> f64 {
        match self.kind {
            GeometryKind::SphereN => (self.n * (self.n - 1)) as f64,
            GeometryKind::EuclideanBall => 0.0,
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self.kind, GeometryKind::EuclideanBall)
    }
}

/// `k`-dimensional volume of the unit sphere `S^k` in `R^{k+1}`.
pub fn sphere_area(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(KgmpError::Domain(format!("sphere_area needs k >= 1, got {k}")));
    }
    Ok(sphere_area_unchecked(k))
}

pub(crate) fn sphere_area_unchecked(k: usize) -> f64 {
    let half = (k + 1) as f64 / 2.0;
    2.0 * PI.powf(half) / gamma_half_integer(k + 1)
}

/// `Gamma(m/2)` for a positive integer `m`.
pub(crate) fn gamma_half_integer(m: usize) -> f64 {
    assert!(m >= 1);
    if m % 2 == 0 {
        // (m/2 - 1)!
        (1..m / 2).map(|j| j as f64).product()
    } else {
        // Gamma(1/2) * prod_{j=0}^{(m-3)/2} (j + 1/2)
        let mut acc = PI.sqrt();
        let mut x = 0.5;
        while x + 1e-9 < m as f64 / 2.0 {
            acc *= x;
            x += 1.0;
        }
        acc
    }
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite five-point Gauss-Legendre rule with `panels` equal panels.
pub fn composite_gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| gauss_legendre5(&f, a + k as f64 * h, a + (k + 1) as f64 * h))
        .sum()
}

/// Geodesic-polar mesh with metric quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub geometry: Geometry,
    pub nodes: Vec<f64>,
    /// Metric volume of each node's dual cell.
    pub cell_weights: Vec<f64>,
    /// Shell area at each interior face `r_{i+1/2}`, `i = 0..N-1`.
    pub face_weights: Vec<f64>,
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of intervals `N`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.geometry.n
    }

    pub fn face_position(&self, i: usize) -> f64 {
        0.5 * (self.nodes[i] + self.nodes[i + 1])
    }

    pub fn spacing(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn total_weight(&self) -> f64 {
        self.cell_weights.iter().sum()
    }

    /// Index of the node closest to `r`.
    pub fn nearest_node(&self, r: f64) -> usize {
        let pos = self.nodes.partition_point(|&x| x < r);
        if pos == 0 {
            0
        } else if pos >= self.nodes.len() {
            self.nodes.len() - 1
        } else if (self.nodes[pos] - r).abs() < (r - self.nodes[pos - 1]).abs() {
            pos
        } else {
            pos - 1
        }
    }

    pub fn check(&self, f: &Field) -> Result<()> {
        if f.len() != self.len() {
            return Err(KgmpError::GridMismatch {
                expected: self.len(),
                found: f.len(),
            });
        }
        Ok(())
    }
}

/// Nodes `r_i = r_max (i/N)^grading`; weights by five-point Gauss-Legendre
/// on every dual cell.
pub fn build_grid(geometry: Geometry, intervals: usize, grading: f64) -> Result<RadialGrid> {
    if intervals < 8 {
        return Err(KgmpError::Domain(format!(
            "grid needs at least 8 intervals, got {intervals}"
        )));
    }
    if !(grading >= 1.0 && grading.is_finite()) {
        return Err(KgmpError::Domain(format!("grading {grading} < 1")));
    }
    let nf = intervals as f64;
    let mut nodes: Vec<f64> = (0..=intervals)
        .map(|i| geometry.r_max * (i as f64 / nf).powf(grading))
        .collect();
    nodes[0] = 0.0;
    nodes[intervals] = geometry.r_max;

    let area = sphere_area_unchecked(geometry.n - 1);
    let faces: Vec<f64> = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let face_weights = faces.iter().map(|&r| area * geometry.density(r)).collect();
    let cell_weights = (0..=intervals)
        .map(|i| {
            let lo = if i == 0 { 0.0 } else { faces[i - 1] };
            let hi = if i == intervals { geometry.r_max } else { faces[i] };
            area * gauss_legendre5(|r| geometry.density(r), lo, hi)
        })
        .collect();

    Ok(RadialGrid {
        geometry,
        nodes,
        cell_weights,
        face_weights,
    })
}

/// `sum_i W_i f_i`.
pub fn integrate(grid: &RadialGrid, f: &Field) -> Result<f64> {
    grid.check(f)?;
    Ok(weighted_sum(grid, f))
}

pub(crate) fn weighted_sum(grid: &RadialGrid, f: &[f64]) -> f64 {
    compensated_sum(grid.cell_weights.iter().zip(f.iter()).map(|(w, v)| w * v))
}

/// Neumaier summation; keeps finite-difference quotients of integrals clean.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for x in terms {
        let t = sum + x;
        carry += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + carry
}

/// A radial function sampled at the nodes of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(values: Vec<f64>) -> Self {
        Field { values }
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &RadialGrid, c: f64) -> Self {
        Field {
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &RadialGrid, f: F) -> Self {
        Field {
            values: grid.nodes.iter().map(|&r| f(r)).collect(),
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Field {
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|x| c * x)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Field) -> Self {
        Field {
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }
}

impl Deref for Field {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

/// Weighted inner product `<a, b>_W = sum_i W_i a_i b_i`.
pub fn inner(grid: &RadialGrid, a: &[f64], b: &[f64]) -> f64 {
    grid.cell_weights
        .iter()
        .zip(a.iter().zip(b.iter()))
        .map(|(w, (x, y))| w * x * y)
        .sum()
}

pub fn norm_l2(grid: &RadialGrid, a: &[f64]) -> f64 {
    inner(grid, a, a).sqrt()
}
