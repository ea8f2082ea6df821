//! Divergence-form finite-volume realization of `Delta_g + V` on a radial grid.
//!
//! With face conductances `k_{i+1/2} = A_{i+1/2} / (r_{i+1} - r_i)` the operator is
//!
//! ```text
//! (L u)_i = (F_{i-1/2} - F_{i+1/2}) / W_i + V_i u_i,   F_{i+1/2} = k_{i+1/2} (u_{i+1} - u_i)
//! ```
//!
//! with zero flux through `r = 0` (and through `r = pi` on the sphere). The
//! matrix `W L` is symmetric, so `L` is self-adjoint for `<a, b>_W`. On the
//! ball the last node carries homogeneous Dirichlet data: its row is the
//! identity and the neighbouring row sees a zero boundary value.

use crate::error::{KgmpError, Result};
use crate::model::{Field, RadialGrid};

const PIVOT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DiscreteOperator<'g> {
    grid: &'g RadialGrid,
    conductance: Vec<f64>,
    potential: Field,
}

/// Face conductances `A_{i+1/2} / h_{i+1/2}`.
pub(crate) fn conductances(grid: &RadialGrid) -> Vec<f64> {
    grid.face_weights
        .iter()
        .enumerate()
        .map(|(i, a)| a / grid.spacing(i))
        .collect()
}

pub fn assemble<'g>(grid: &'g RadialGrid, potential: &Field) -> Result<DiscreteOperator<'g>> {
    grid.check(potential)?;
    Ok(DiscreteOperator {
        grid,
        conductance: conductances(grid),
        potential: potential.clone(),
    })
}

pub fn apply(op: &DiscreteOperator<'_>, u: &Field) -> Result<Field> {
    op.apply(u)
}

pub fn solve(op: &DiscreteOperator<'_>, rhs: &Field) -> Result<Field> {
    op.solve(rhs)
}

/// `sum_faces A (u_{i+1} - u_i)^2 / h`, i.e. `<L u, u>_W` for zero potential.
pub fn dirichlet_energy(grid: &RadialGrid, u: &Field) -> Result<f64> {
    grid.check(u)?;
    Ok(dirichlet_form(grid, &conductances(grid), u, u))
}

/// Bilinear form `sum_faces k (a_{i+1} - a_i)(b_{i+1} - b_i)` with the
/// boundary value on the ball taken as zero.
pub(crate) fn dirichlet_form(grid: &RadialGrid, kappa: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let last = grid.intervals();
    let dirichlet = grid.geometry.is_dirichlet();
    kappa
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let (a1, b1) = if dirichlet && i + 1 == last {
                (0.0, 0.0)
            } else {
                (a[i + 1], b[i + 1])
            };
            k * (a1 - a[i]) * (b1 - b[i])
        })
        .sum()
}

impl<'g> DiscreteOperator<'g> {
    pub fn grid(&self) -> &'g RadialGrid {
        self.grid
    }

    pub fn potential(&self) -> &Field {
        &self.potential
    }

    pub fn conductance(&self) -> &[f64] {
        &self.conductance
    }

    fn dirichlet(&self) -> bool {
        self.grid.geometry.is_dirichlet()
    }

    /// Sub-diagonal of `L` (entry `(i, i-1)`, index `i-1`).
    pub fn sub(&self) -> Vec<f64> {
        let w = &self.grid.cell_weights;
        let last = self.grid.intervals();
        (0..last)
            .map(|i| {
                if self.dirichlet() && i + 1 == last {
                    0.0
                } else {
                    -self.conductance[i] / w[i + 1]
                }
            })
            .collect()
    }

    /// Super-diagonal of `L` (entry `(i, i+1)`, index `i`).
    pub fn sup(&self) -> Vec<f64> {
        let w = &self.grid.cell_weights;
        let last = self.grid.intervals();
        (0..last)
            .map(|i| {
                if self.dirichlet() && i + 1 == last {
                    0.0
                } else {
                    -self.conductance[i] / w[i]
                }
            })
            .collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        let (d, _) = self.symmetric_bands();
        let w = &self.grid.cell_weights;
        let last = self.grid.intervals();
        d.iter()
            .enumerate()
            .map(|(i, s)| {
                if self.dirichlet() && i == last {
                    1.0
                } else {
                    s / w[i]
                }
            })
            .collect()
    }

    /// Diagonal and off-diagonal of the symmetric matrix `W L` (the
    /// Dirichlet row is excluded from the coupling and left as is).
    pub fn symmetric_bands(&self) -> (Vec<f64>, Vec<f64>) {
        let w = &self.grid.cell_weights;
        let k = &self.conductance;
        let last = self.grid.intervals();
        let mut diag: Vec<f64> = (0..=last)
            .map(|i| {
                let left = if i > 0 { k[i - 1] } else { 0.0 };
                let right = if i < last { k[i] } else { 0.0 };
                left + right + w[i] * self.potential[i]
            })
            .collect();
        let mut off: Vec<f64> = k.iter().map(|x| -x).collect();
        if self.dirichlet() {
            off[last - 1] = 0.0;
            diag[last] = w[last];
        }
        (diag, off)
    }

    pub fn apply(&self, u: &Field) -> Result<Field> {
        self.grid.check(u)?;
        let w = &self.grid.cell_weights;
        let last = self.grid.intervals();
        let dirichlet = self.dirichlet();
        let flux: Vec<f64> = self
            .conductance
            .iter()
            .enumerate()
            .map(|(i, k)| {
                let right = if dirichlet && i + 1 == last {
                    0.0
                } else {
                    u[i + 1]
                };
                k * (right - u[i])
            })
            .collect();
        let values = (0..=last)
            .map(|i| {
                if dirichlet && i == last {
                    return u[i];
                }
                let left = if i > 0 { flux[i - 1] } else { 0.0 };
                let right = if i < last { flux[i] } else { 0.0 };
                (left - right) / w[i] + self.potential[i] * u[i]
            })
            .collect();
        Ok(Field::new(values))
    }

    /// Direct tridiagonal elimination on the symmetric system `W L x = W rhs`.
    pub fn solve(&self, rhs: &Field) -> Result<Field> {
        self.grid.check(rhs)?;
        let w = &self.grid.cell_weights;
        let (diag, off) = self.symmetric_bands();
        let b: Vec<f64> = rhs.iter().zip(w.iter()).map(|(r, wi)| r * wi).collect();
        thomas_symmetric(&diag, &off, &b).map(Field::new)
    }
}

/// Thomas elimination for a symmetric tridiagonal system that is expected
/// to be positive definite. Non-positive or tiny pivots are reported.
pub(crate) fn thomas_symmetric(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    check_pivot(0, pivot, diag[0])?;
    if n > 1 {
        c[0] = off[0] / pivot;
    }
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - off[i - 1] * c[i - 1];
        check_pivot(i, pivot, diag[i])?;
        if i + 1 < n {
            c[i] = off[i] / pivot;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

fn check_pivot(row: usize, pivot: f64, scale: f64) -> Result<()> {
    if !(pivot > PIVOT_RTOL * scale.abs()) || !pivot.is_finite() {
        return Err(KgmpError::NotInvertible { row, pivot });
    }
    Ok(())
}
