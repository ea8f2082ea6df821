//! Banded LU factorization with partial pivoting, for the coupled Newton
//! systems. Storage follows the usual band layout with `kl` extra upper
//! diagonals reserved for pivoting fill-in.

use crate::error::{KgmpError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row `i` holds columns `i - kl ..= i + ku + kl`.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        BandMatrix {
            n,
            kl,
            ku,
            data: vec![0.0; n * (2 * kl + ku + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.ku + self.kl {
            return None;
        }
        Some(i * self.width() + (j + self.kl - i))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `value` at `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside band"
        );
        let s = self.slot(i, j).expect("index in range");
        self.data[s] += value;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + self.kl).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b` by Gaussian elimination with row pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut a = self.clone();
        let mut x = b.to_vec();
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = scale * 1e-300_f64.max(f64::EPSILON * 1e-4);
        let upper = self.ku + self.kl;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let p = (k..=last_row)
                .max_by(|&r, &s| a.get(r, k).abs().total_cmp(&a.get(s, k).abs()))
                .unwrap_or(k);
            let pivot = a.get(p, k);
            if !(pivot.abs() > tiny) {
                return Err(KgmpError::NotInvertible { row: k, pivot });
            }
            let last_col = (k + upper).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (sk, sp) = (a.slot(k, j), a.slot(p, j));
                    let vk = sk.map_or(0.0, |s| a.data[s]);
                    let vp = sp.map_or(0.0, |s| a.data[s]);
                    if let Some(s) = sk {
                        a.data[s] = vp;
                    }
                    if let Some(s) = sp {
                        a.data[s] = vk;
                    }
                }
                x.swap(k, p);
            }
            for r in k + 1..=last_row {
                let factor = a.get(r, k) / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k..=last_col {
                    let akj = a.get(k, j);
                    if let Some(s) = a.slot(r, j) {
                        a.data[s] -= factor * akj;
                    }
                }
                x[r] -= factor * x[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + upper).min(n - 1);
            let tail: f64 = (k + 1..=last_col).map(|j| a.get(k, j) * x[j]).sum();
            x[k] = (x[k] - tail) / a.get(k, k);
        }
        Ok(x)
    }
}
