//! Double-double arithmetic (about 106 significant bits) and an extended
//! precision re-implementation of the discrete `Psi` and energy on sphere
//! grids. Finite-difference quotients computed with it are free of the
//! rounding noise that limits an `f64` oracle at small steps.
#![allow(dead_code)]

use std::ops::{Add, Div, Mul, Neg, Sub};

use kgmp::{GeometryKind, Params, RadialGrid};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        DD { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn max0(self) -> Self {
        if self.hi > 0.0 || (self.hi == 0.0 && self.lo > 0.0) {
            self
        } else {
            DD::ZERO
        }
    }

    pub fn powi(self, k: u32) -> Self {
        (0..k).fold(DD::new(1.0), |acc, _| acc * self)
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> Self {
        DD::new(x)
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, o: DD) -> DD {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DD { hi, lo }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, o: DD) -> DD {
        self + (-o)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, o: DD) -> DD {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, o: DD) -> DD {
        let q1 = self.hi / o.hi;
        let r = self - o * DD::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DD::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DD { hi, lo } + DD::new(q3)
    }
}

fn conductances(grid: &RadialGrid) -> Vec<f64> {
    assert_eq!(grid.geometry.kind, GeometryKind::SphereN, "oracle covers sphere grids");
    grid.face_weights
        .iter()
        .zip(grid.nodes.windows(2))
        .map(|(a, w)| a / (w[1] - w[0]))
        .collect()
}

fn weighted(grid: &RadialGrid, f: &[DD]) -> DD {
    grid.cell_weights
        .iter()
        .zip(f)
        .fold(DD::ZERO, |acc, (w, x)| acc + DD::new(*w) * *x)
}

/// Gauge potential: Thomas elimination on `W (L + m1^2 + q^2 u^2) v = W q u^2`.
pub fn gauge(grid: &RadialGrid, params: &Params, u: &[DD]) -> Vec<DD> {
    let k = conductances(grid);
    let w = &grid.cell_weights;
    let n = u.len();
    let (m1sq, q) = (DD::new(params.m1 * params.m1), DD::new(params.q));
    let diag: Vec<DD> = (0..n)
        .map(|i| {
            let left = if i > 0 { k[i - 1] } else { 0.0 };
            let right = if i + 1 < n { k[i] } else { 0.0 };
            DD::new(left) + DD::new(right) + DD::new(w[i]) * (m1sq + q * q * u[i] * u[i])
        })
        .collect();
    let rhs: Vec<DD> = (0..n).map(|i| DD::new(w[i]) * q * u[i] * u[i]).collect();
    let mut c = vec![DD::ZERO; n];
    let mut d = vec![DD::ZERO; n];
    c[0] = DD::new(-k[0]) / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let off = DD::new(-k[i - 1]);
        let pivot = diag[i] - off * c[i - 1];
        if i + 1 < n {
            c[i] = DD::new(-k[i]) / pivot;
        }
        d[i] = (rhs[i] - off * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    d
}

pub fn psi(grid: &RadialGrid, params: &Params, u: &[DD]) -> DD {
    let v = gauge(grid, params, u);
    let q = DD::new(params.q);
    let f: Vec<DD> = u
        .iter()
        .zip(&v)
        .map(|(x, y)| (DD::new(1.0) - q * *y) * *x * *x)
        .collect();
    DD::new(0.5) * weighted(grid, &f)
}

/// Total energy; the exponent must be an integer.
pub fn energy(grid: &RadialGrid, params: &Params, u: &[DD]) -> DD {
    let p = params.p.round();
    assert!((params.p - p).abs() < 1e-14, "oracle needs an integer exponent");
    let k = conductances(grid);
    let dir = k
        .iter()
        .enumerate()
        .fold(DD::ZERO, |acc, (i, ki)| {
            let d = u[i + 1] - u[i];
            acc + DD::new(*ki) * d * d
        });
    let u2: Vec<DD> = u.iter().map(|x| *x * *x).collect();
    let up: Vec<DD> = u.iter().map(|x| x.max0().powi(p as u32)).collect();
    let half = DD::new(0.5);
    half * dir + half * DD::new(params.m0 * params.m0) * weighted(grid, &u2)
        - weighted(grid, &up) / DD::new(p)
        - DD::new(params.omega * params.omega) * psi(grid, params, u)
}

/// Richardson-extrapolated central difference of `f` at `u` along `phi`,
/// steps `1e-3` and `1e-4`, evaluated in double-double.
pub fn richardson_derivative<F>(f: F, u: &[f64], phi: &[f64]) -> f64
where
    F: Fn(&[DD]) -> DD,
{
    let central = |t: f64| {
        let td = DD::new(t);
        let plus: Vec<DD> = u.iter().zip(phi).map(|(a, b)| DD::new(*a) + td * DD::new(*b)).collect();
        let minus: Vec<DD> = u.iter().zip(phi).map(|(a, b)| DD::new(*a) - td * DD::new(*b)).collect();
        (f(&plus) - f(&minus)) / (DD::new(2.0) * td)
    };
    let (d1, d2) = (central(1e-3), central(1e-4));
    ((DD::new(100.0) * d2 - d1) / DD::new(99.0)).to_f64()
}
