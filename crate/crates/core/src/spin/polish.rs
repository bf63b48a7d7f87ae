//! Double-double refinement of tridiagonal eigenpairs.
//!
//! Eigenvectors coming out of a dense double-precision solve are accurate to
//! about `eps·‖H‖/gap`. Zeros of the Majorana polynomial near a coincidence
//! react to coefficient errors like `δ^{1/m}`, so the sector eigenvectors are
//! refined by Rayleigh-quotient iteration carried out in double-double
//! arithmetic and then rounded back.

use twofloat::TwoFloat;

use super::{ModelParams, Parity};
use crate::dd::div;

/// Symmetric tridiagonal matrix held in double-double.
#[derive(Clone, Debug)]
pub(crate) struct Tridiagonal {
    pub diag: Vec<TwoFloat>,
    pub off: Vec<TwoFloat>,
}

impl Tridiagonal {
    /// The parity block of the LMG matrix with elements evaluated in
    /// double-double from the double couplings.
    pub fn lmg_sector(params: &ModelParams, parity: Parity) -> Self {
        let j = params.j() as i64;
        let start = if parity == Parity::Odd { 1 } else { 0 };
        let ks: Vec<i64> = (start..=2 * j).step_by(2).collect();
        let eps = TwoFloat::from(params.epsilon());
        let gamma = TwoFloat::from(params.gamma());
        let half_lambda = TwoFloat::from(params.lambda()) / 2.0;
        let diag = ks
            .iter()
            .map(|&k| {
                let m = k - j;
                eps * (m as f64) + gamma * ((j * (j + 1) - m * m) as f64)
            })
            .collect();
        let off = ks
            .windows(2)
            .map(|w| {
                let m = w[0] - j;
                let ladder = (j - m) * (j + m + 1) * (j - m - 1) * (j + m + 2);
                half_lambda * TwoFloat::from(ladder as f64).sqrt()
            })
            .collect();
        Self { diag, off }
    }

    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[TwoFloat]) -> Vec<TwoFloat> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Solves `(T - σ) x = rhs` by Gaussian elimination with partial pivoting.
    /// Exactly singular pivots are nudged so that inverse iteration at an
    /// eigenvalue still returns the eigenvector direction.
    fn shifted_solve(&self, sigma: TwoFloat, rhs: &[TwoFloat]) -> Vec<TwoFloat> {
        let n = self.dim();
        let zero = TwoFloat::from(0.0);
        let tiny = TwoFloat::from(1e-300);
        // rows stored as (d0, d1, d2): entries at columns i, i+1, i+2
        let mut rows: Vec<[TwoFloat; 3]> = (0..n)
            .map(|i| {
                [
                    self.diag[i] - sigma,
                    if i + 1 < n { self.off[i] } else { zero },
                    zero,
                ]
            })
            .collect();
        let mut sub: Vec<TwoFloat> = (0..n.saturating_sub(1)).map(|i| self.off[i]).collect();
        let mut b = rhs.to_vec();
        for i in 0..n {
            if i + 1 < n && sub[i].abs() > rows[i][0].abs() {
                // swap row i with row i+1; row i+1 has (sub, diag, off) at cols i, i+1, i+2
                let next = [sub[i], rows[i + 1][0], rows[i + 1][1]];
                let cur = rows[i];
                rows[i] = next;
                sub[i] = cur[0];
                rows[i + 1] = [cur[1], cur[2], zero];
                b.swap(i, i + 1);
            }
            if rows[i][0] == zero {
                rows[i][0] = tiny;
            }
            if i + 1 < n {
                let f = div(sub[i], rows[i][0]);
                let [_, r1, r2] = rows[i];
                rows[i + 1][0] -= f * r1;
                rows[i + 1][1] -= f * r2;
                let bi = b[i];
                b[i + 1] -= f * bi;
            }
        }
        let mut x = vec![zero; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= rows[i][1] * x[i + 1];
            }
            if i + 2 < n {
                s -= rows[i][2] * x[i + 2];
            }
            x[i] = div(s, rows[i][0]);
        }
        x
    }
}

fn dot(a: &[TwoFloat], b: &[TwoFloat]) -> TwoFloat {
    a.iter().zip(b).fold(TwoFloat::from(0.0), |s, (x, y)| s + *x * *y)
}

fn normalize(x: &mut [TwoFloat]) -> bool {
    let n = dot(x, x).sqrt();
    if !(n.hi().is_finite() && n.hi() > 0.0) {
        return false;
    }
    for v in x.iter_mut() {
        *v = div(*v, n);
    }
    true
}

/// Result of a refinement: eigenvalue, eigenvector and the relative residual
/// `‖Tx - μx‖/scale`, all rounded to double.
#[derive(Clone, Debug)]
pub(crate) struct Polished {
    pub value: f64,
    pub vector: Vec<f64>,
    /// The refined vector before rounding.
    pub extended: Vec<TwoFloat>,
    pub residual: f64,
}

/// Refines `(value, vector)` in place of the double solution. Falls back to
/// the input when the iteration wanders to another eigenpair.
pub(crate) fn polish(t: &Tridiagonal, value: f64, vector: &[f64], scale: f64) -> Polished {
    let n = t.dim();
    let start: Vec<TwoFloat> = vector.iter().map(|&v| TwoFloat::from(v)).collect();
    let mut x = start.clone();
    let fallback = || Polished {
        value,
        vector: vector.to_vec(),
        extended: start.clone(),
        residual: residual(t, &start, TwoFloat::from(value), scale),
    };
    if n == 1 {
        let v = 1.0f64.copysign(vector[0]);
        return Polished {
            value: t.diag[0].hi(),
            vector: vec![v],
            extended: vec![TwoFloat::from(v)],
            residual: 0.0,
        };
    }
    if !normalize(&mut x) {
        return fallback();
    }
    let mut mu = dot(&x, &t.apply(&x));
    for _ in 0..4 {
        let mut y = t.shifted_solve(mu, &x);
        if !normalize(&mut y) {
            break;
        }
        if dot(&y, &x).hi() < 0.0 {
            for v in y.iter_mut() {
                *v = -*v;
            }
        }
        x = y;
        mu = dot(&x, &t.apply(&x));
        if residual(t, &x, mu, scale) < 1e-30 {
            break;
        }
    }
    let overlap = dot(&x, &start).hi().abs();
    let res = residual(t, &x, mu, scale);
    if !(overlap > 0.999 && res.is_finite()) {
        return fallback();
    }
    Polished {
        value: mu.hi() + mu.lo(),
        vector: x.iter().map(|v| v.hi() + v.lo()).collect(),
        extended: x,
        residual: res,
    }
}

fn residual(t: &Tridiagonal, x: &[TwoFloat], mu: TwoFloat, scale: f64) -> f64 {
    let tx = t.apply(x);
    let r: TwoFloat = tx.iter().zip(x).fold(TwoFloat::from(0.0), |s, (a, b)| {
        let d = *a - mu * *b;
        s + d * d
    });
    r.sqrt().hi() / scale.max(f64::MIN_POSITIVE)
}
