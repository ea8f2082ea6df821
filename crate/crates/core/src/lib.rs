//! Numerical laboratory for the electrostatic Klein-Gordon-Maxwell-Proca
//! system
//!
//! ```text
//! Delta_g u + m0^2 u = u^{p-1} + omega^2 (1 - q v)^2 u
//! Delta_g v + (m1^2 + q^2 u^2) v = q u^2
//! ```
//!
//! on rotationally symmetric model manifolds (round spheres and flat balls),
//! with `Delta_g = -div_g grad` the nonnegative Laplace-Beltrami operator.
//! Everything is radial about a pole, so each PDE becomes a tridiagonal
//! two-point problem on a [`model::RadialGrid`].

pub mod asymptotics;
pub mod banded;
pub mod elliptic;
pub mod energy;
pub mod error;
pub mod gauge;
pub mod model;
pub mod mountainpass;

pub use error::{KgmpError, Result};
pub use model::{build_grid, integrate, sphere_area, Field, Geometry, GeometryKind, Params, RadialGrid};
