use std::f64::consts::TAU;

use num_complex::Complex64;
use twofloat::TwoFloat;

use super::majorana::{extended_coeffs, horner};
use super::majorana_poly;
use super::{MajoranaPoly, SpherePoint, Zero, ZeroSet};
use crate::dd::{self, Cdd};
use crate::spin::Eigenpair;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Solve pure-parity polynomials `ζ^ν Q(ζ²)` in `w = ζ²`, which makes the
    /// `±ζ` pairs exact.
    pub use_parity: bool,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            use_parity: true,
        }
    }
}

/// `p(z)/p'(z)` together with `|p(z)|` and the rounding bound
/// `Σ|a_k||z|^k`, both in the chart in which they are computed.
fn newton_ratio(a: &[Complex64], z: Complex64) -> (Complex64, f64, f64) {
    let n = a.len() - 1;
    let zero = Complex64::new(0.0, 0.0);
    if z.norm() <= 1.0 {
        let (mut p, mut dp, mut bound) = (zero, zero, 0.0);
        let r = z.norm();
        for c in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
            bound = bound * r + c.norm();
        }
        let ratio = if p == zero { zero } else { p / dp };
        (ratio, p.norm(), bound)
    } else {
        // p(z) = z^n q(w), w = 1/z, q the reversed polynomial
        let w = 1.0 / z;
        let (mut q, mut dq, mut bound) = (zero, zero, 0.0);
        let r = w.norm();
        for c in a.iter() {
            dq = dq * w + q;
            q = q * w + c;
            bound = bound * r + c.norm();
        }
        let ratio = if q == zero {
            zero
        } else {
            1.0 / (w * (n as f64 - w * dq / q))
        };
        (ratio, q.norm(), bound)
    }
}

/// Aberth-Ehrlich simultaneous iteration for `Σ a_k z^k` (`a` in ascending
/// order, `a[n] != 0`). On failure returns the current approximations.
pub fn aberth(
    a: &[Complex64],
    max_iterations: usize,
) -> std::result::Result<Vec<Complex64>, (usize, Vec<Complex64>)> {
    let n = a.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![-a[0] / a[1]]);
    }
    let lead = a[n].norm();
    let max = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let radius = (max / lead).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let r = radius * (1.0 + 0.05 * (k as f64 * 1.7).sin());
            Complex64::from_polar(r, TAU * k as f64 / n as f64 + 0.4)
        })
        .collect();
    let tol = 4.0 * n as f64 * f64::EPSILON;
    let mut done = vec![false; n];
    for iter in 0..max_iterations {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, res, bound) = newton_ratio(a, z[i]);
            if res <= tol * bound {
                done[i] = true;
                continue;
            }
            all = false;
            let s: Complex64 = (0..n)
                .filter(|&k| k != i)
                .map(|k| {
                    let d = z[i] - z[k];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / d
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
            }
        }
        if all {
            polish_newton(a, &mut z);
            return Ok(z);
        }
        if iter + 1 == max_iterations {
            break;
        }
    }
    Err((max_iterations, z))
}

/// A few Newton steps per root, kept only when they lower the residual.
fn polish_newton(a: &[Complex64], z: &mut [Complex64]) {
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (ratio, res, _) = newton_ratio(a, *zi);
            if res == 0.0 {
                break;
            }
            let cand = *zi - ratio;
            let (_, res_c, _) = newton_ratio(a, cand);
            // residuals live in different charts on either side of |z| = 1
            let scale = |z: Complex64| {
                if z.norm() > 1.0 {
                    z.norm().powi(a.len() as i32 - 1)
                } else {
                    1.0
                }
            };
            if res_c * scale(cand) < res * scale(*zi) {
                *zi = cand;
            } else {
                break;
            }
        }
    }
}

fn newton_ratio_dd(a: &[TwoFloat], z: Cdd) -> (Cdd, f64, f64) {
    let n = a.len() - 1;
    if z.abs() <= 1.0 {
        let (mut p, mut dp, mut bound) = (Cdd::ZERO, Cdd::ZERO, 0.0);
        let r = z.abs();
        for c in a.iter().rev() {
            dp = dp * z + p;
            p = p * z + Cdd::real(*c);
            bound = bound * r + dd::to_f64(c.abs());
        }
        let ratio = if p == Cdd::ZERO { Cdd::ZERO } else { p.div(dp) };
        (ratio, p.abs(), bound)
    } else {
        let w = z.recip();
        let (mut q, mut dq, mut bound) = (Cdd::ZERO, Cdd::ZERO, 0.0);
        let r = w.abs();
        for c in a.iter() {
            dq = dq * w + q;
            q = q * w + Cdd::real(*c);
            bound = bound * r + dd::to_f64(c.abs());
        }
        let ratio = if q == Cdd::ZERO {
            Cdd::ZERO
        } else {
            let inner = Cdd::real(TwoFloat::from(n as f64)) - w * dq.div(q);
            (w * inner).recip()
        };
        (ratio, q.abs(), bound)
    }
}

/// Aberth iteration in double-double for a real polynomial, started from
/// double-precision approximations of its roots.
fn aberth_dd(a: &[TwoFloat], seeds: &[Complex64], max_iterations: usize) -> Option<Vec<Complex64>> {
    let n = seeds.len();
    let mut z: Vec<Cdd> = seeds.iter().map(|s| Cdd::from_c64(*s)).collect();
    let tol = 4.0 * n as f64 * dd::EPS;
    let mut done = vec![false; n];
    for _ in 0..max_iterations {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (ratio, res, bound) = newton_ratio_dd(a, z[i]);
            if res <= tol * bound {
                done[i] = true;
                continue;
            }
            all = false;
            let mut s = Cdd::ZERO;
            for k in 0..n {
                if k != i {
                    let d = z[i] - z[k];
                    if d != Cdd::ZERO {
                        s = s + d.recip();
                    }
                }
            }
            let den = Cdd::real(TwoFloat::from(1.0)) - ratio * s;
            let step = ratio.div(den);
            if step.re.hi().is_finite() && step.im.hi().is_finite() {
                z[i] = z[i] - step;
            }
        }
        if all {
            return Some(z.iter().map(|c| c.to_c64()).collect());
        }
    }
    None
}

/// Relative cutoff for degree and valuation when the coefficients carry
/// double-double accuracy.
const EXTENDED_THRESHOLD: f64 = 1e-28;

/// Zeros of a real pure-parity Majorana polynomial whose coefficients are
/// known in double-double. Double-precision roots seed a
/// double-double Aberth pass, which resolves near-coincident zeros far below
/// the `sqrt(eps)` splitting of a double computation. Falls back to
/// [`poly_roots`] for mixed parity or when the refinement stalls.
pub(crate) fn poly_roots_extended(p: &MajoranaPoly, coeffs: &[TwoFloat]) -> Result<ZeroSet> {
    let zero = TwoFloat::from(0.0);
    let max = coeffs.iter().map(|c| dd::to_f64(c.abs())).fold(0.0, f64::max);
    let cut = EXTENDED_THRESHOLD * max;
    let live = |c: &TwoFloat| dd::to_f64(c.abs()) > cut;
    let (Some(v), Some(deg)) = (coeffs.iter().position(live), coeffs.iter().rposition(live)) else {
        return poly_roots(p);
    };
    let q = &coeffs[v..=deg];
    if deg == v || !q.iter().skip(1).step_by(2).all(|c| *c == zero) {
        return poly_roots(p);
    }
    let half_dd: Vec<TwoFloat> = q.iter().step_by(2).copied().collect();
    let half: Vec<Complex64> = half_dd
        .iter()
        .map(|c| Complex64::new(dd::to_f64(*c), 0.0))
        .collect();
    let seeds = match aberth(&half, RootOptions::default().max_iterations) {
        Ok(s) => s,
        Err(_) => return poly_roots(p),
    };
    let Some(ws) = aberth_dd(&half_dd, &seeds, 500) else {
        return poly_roots(p);
    };
    let two_j = 2 * p.j() as usize;
    let mut zeros = Vec::with_capacity(two_j);
    if v > 0 {
        zeros.push(Zero::new(SpherePoint::ORIGIN, v));
    }
    if deg < two_j {
        zeros.push(Zero::new(SpherePoint::Infinity, two_j - deg));
    }
    let d: Vec<Complex64> = coeffs[..=deg]
        .iter()
        .map(|c| Complex64::new(dd::to_f64(*c), 0.0))
        .collect();
    let mut residual: f64 = 0.0;
    for w in ws {
        let s = w.sqrt();
        for z in [s, -s] {
            residual = residual.max(relative_residual(&d, z));
            zeros.push(Zero::new(SpherePoint::Finite(z), 1));
        }
    }
    Ok(ZeroSet::new(p.j(), zeros).with_residual(residual))
}

/// Raw zeros of an eigenstate's Husimi amplitude, using the double-double
/// eigenvector when the eigensolver kept one.
pub fn eigenpair_roots(pair: &Eigenpair) -> Result<ZeroSet> {
    let p = majorana_poly(&pair.state);
    match &pair.extended {
        Some(x) => poly_roots_extended(&p, &extended_coeffs(x)),
        None => poly_roots(&p),
    }
}

/// Relative residual `|P(ζ)| / (max|d| · max(1,|ζ|)^deg)`.
fn relative_residual(d: &[Complex64], z: Complex64) -> f64 {
    let max = d.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if z.norm() <= 1.0 {
        horner(d, z).norm() / max
    } else {
        let w = 1.0 / z;
        d.iter()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
            .norm()
            / max
    }
}

/// All `2j` zeros of the Majorana polynomial, unclustered: one entry per
/// computed root, plus the orders of the zeros at `0` and `∞`.
pub fn poly_roots(p: &MajoranaPoly) -> Result<ZeroSet> {
    poly_roots_with(p, RootOptions::default())
}

pub fn poly_roots_with(p: &MajoranaPoly, opts: RootOptions) -> Result<ZeroSet> {
    let two_j = 2 * p.j() as usize;
    let (v, deg) = (p.valuation(), p.degree());
    let mut zeros = Vec::with_capacity(two_j);
    if v > 0 {
        zeros.push(Zero::new(SpherePoint::ORIGIN, v));
    }
    if deg < two_j {
        zeros.push(Zero::new(SpherePoint::Infinity, two_j - deg));
    }
    let q = &p.coeffs()[v..=deg];
    let zero = Complex64::new(0.0, 0.0);
    let pure = opts.use_parity && q.iter().skip(1).step_by(2).all(|c| *c == zero);
    let found = if pure {
        let half: Vec<Complex64> = q.iter().step_by(2).copied().collect();
        aberth(&half, opts.max_iterations).map(|ws| {
            ws.iter()
                .flat_map(|w| {
                    let s = w.sqrt();
                    [s, -s]
                })
                .collect::<Vec<_>>()
        })
    } else {
        aberth(q, opts.max_iterations)
    };
    let mut residual: f64 = 0.0;
    match found {
        Ok(roots) => {
            for z in roots {
                residual = residual.max(relative_residual(&p.coeffs()[..=p.degree()], z));
                zeros.push(Zero::new(SpherePoint::Finite(z), 1));
            }
            Ok(ZeroSet::new(p.j(), zeros).with_residual(residual))
        }
        Err((iterations, partial)) => {
            for z in partial {
                zeros.push(Zero::new(SpherePoint::Finite(z), 1));
            }
            Err(Error::RootNonConvergence {
                iterations,
                partial: Box::new(ZeroSet::new(p.j(), zeros)),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::majorana_poly;
    use crate::spin::{build_hamiltonian, diagonalize, ModelParams, StateVector};
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Eigenvalues of the companion matrix, an independent root oracle. The
    /// matrix is shifted by `SHIFT` first: the QR iteration stalls on the
    /// exactly `±`-symmetric spectra of pure-parity polynomials.
    fn companion_roots(a: &[Complex64]) -> Option<Vec<Complex64>> {
        const SHIFT: f64 = 0.37;
        let n = a.len() - 1;
        if a.iter().all(|c| c.im == 0.0) {
            let m = DMatrix::from_fn(n, n, |r, col| {
                let diag = if r == col { SHIFT } else { 0.0 };
                diag + if col == n - 1 {
                    -a[r].re / a[n].re
                } else if r == col + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let s = nalgebra::Schur::try_new(m, f64::EPSILON, 10_000)?;
            return Some(s.complex_eigenvalues().iter().map(|e| e - SHIFT).collect());
        }
        let m = DMatrix::from_fn(n, n, |r, col| {
            let diag = if r == col { c(SHIFT) } else { c(0.0) };
            diag + if col == n - 1 {
                -a[r] / a[n]
            } else if r == col + 1 {
                c(1.0)
            } else {
                c(0.0)
            }
        });
        let s = nalgebra::Schur::try_new(m, f64::EPSILON, 10_000)?;
        s.eigenvalues().map(|e| e.iter().map(|x| x - SHIFT).collect())
    }

    fn matched(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        let mut used = vec![false; b.len()];
        a.iter().all(|x| {
            let best = (0..b.len())
                .filter(|&k| !used[k])
                .min_by(|&i, &k| (b[i] - x).norm().total_cmp(&(b[k] - x).norm()));
            match best {
                Some(k) if (b[k] - x).norm() <= tol * (1.0 + x.norm()) => {
                    used[k] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn unit_roots() {
        let r = aberth(&[c(-1.0), c(0.0), c(1.0)], 100).unwrap();
        assert!(matched(&r, &[c(1.0), c(-1.0)], 1e-14));
    }

    #[test]
    fn constant_polynomial_has_all_zeros_at_infinity() {
        let p = majorana_poly(&StateVector::dicke(10, -10).unwrap());
        let z = poly_roots(&p).unwrap();
        assert_eq!(z.zeros(), &[Zero::new(SpherePoint::Infinity, 20)]);
    }

    #[test]
    fn monomials() {
        for k in 0..=8i32 {
            let p = majorana_poly(&StateVector::dicke(4, k - 4).unwrap());
            let z = poly_roots(&p).unwrap();
            assert_eq!(z.multiplicity_at_origin(), k as usize);
            assert_eq!(z.multiplicity_at_infinity(), 8 - k as usize);
            assert_eq!(z.total_multiplicity(), 8);
        }
    }

    #[test]
    fn ground_state_matches_companion_oracle() {
        let p = ModelParams::from_control(2, 3.0, 7.0, 1.0).unwrap();
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let poly = majorana_poly(&s.pairs[0].state);
        let z = poly_roots(&poly).unwrap();
        let ours: Vec<Complex64> = z.zeros().iter().filter_map(|z| z.point.finite()).collect();
        assert_eq!(ours.len(), 4);
        let oracle = companion_roots(&poly.coeffs()[..=poly.degree()]).unwrap();
        assert!(matched(&ours, &oracle, 1e-10));
        // closed under ζ → -ζ and ζ → ζ̄
        let neg: Vec<Complex64> = ours.iter().map(|z| -z).collect();
        let conj: Vec<Complex64> = ours.iter().map(|z| z.conj()).collect();
        assert!(matched(&ours, &neg, 1e-12));
        assert!(matched(&ours, &conj, 1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn random_polynomials_match_oracle(
            coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..24)
        ) {
            let a: Vec<Complex64> = coeffs.iter().map(|&(x, y)| Complex64::new(x, y)).collect();
            prop_assume!(a[a.len() - 1].norm() > 0.05 && a[0].norm() > 0.05);
            let ours = aberth(&a, 2000).unwrap();
            if let Some(oracle) = companion_roots(&a) {
                prop_assert!(matched(&ours, &oracle, 1e-7));
            }
        }

        #[test]
        fn residual_bound_and_count(
            j in 1u32..12,
            coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 25)
        ) {
            let v: Vec<Complex64> = coeffs[..2 * j as usize + 1].iter().map(|&(x, y)| Complex64::new(x, y)).collect();
            prop_assume!(v.iter().any(|c| c.norm() > 1e-3));
            let s = StateVector::new(j, v).unwrap();
            let p = majorana_poly(&s);
            let z = poly_roots(&p).unwrap();
            prop_assert_eq!(z.total_multiplicity(), 2 * j as usize);
            prop_assert!(z.max_residual() <= 1e-10);
        }
    }
}
