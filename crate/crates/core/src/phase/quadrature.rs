use std::f64::consts::{PI, TAU};

use super::{majorana_poly, SpherePoint};
use crate::spin::StateVector;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureRule {
    /// Gauss-Legendre in `cos θ`, uniform in `φ`.
    GaussLegendre,
    /// Midpoint rule in `θ` with the `sin θ` weight, uniform in `φ`.
    Midpoint,
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                z
            } else {
                p1
            };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `∫ Q dΩ` with `dΩ = (2j+1)/(4π) sinθ dθ dφ`, on an
/// `n_theta × n_phi` Gauss-Legendre grid.
pub fn husimi_quadrature(state: &StateVector, n_theta: usize, n_phi: usize) -> Result<f64> {
    husimi_quadrature_with(state, QuadratureRule::GaussLegendre, n_theta, n_phi)
}

pub fn husimi_quadrature_with(
    state: &StateVector,
    rule: QuadratureRule,
    n_theta: usize,
    n_phi: usize,
) -> Result<f64> {
    if n_theta < 64 || n_phi < 64 {
        return Err(Error::InvalidParameter(format!(
            "quadrature grid must be at least 64x64, got {n_theta}x{n_phi}"
        )));
    }
    let poly = majorana_poly(state);
    let (nodes, weights): (Vec<f64>, Vec<f64>) = match rule {
        QuadratureRule::GaussLegendre => {
            let (x, w) = gauss_legendre(n_theta);
            (x.iter().map(|c| c.acos()).collect(), w)
        }
        QuadratureRule::Midpoint => {
            let h = PI / n_theta as f64;
            (0..n_theta)
                .map(|i| {
                    let t = (i as f64 + 0.5) * h;
                    (t, t.sin() * h)
                })
                .unzip()
        }
    };
    let dphi = TAU / n_phi as f64;
    let mut total = 0.0;
    for (theta, wt) in nodes.iter().zip(&weights) {
        let ring: f64 = (0..n_phi)
            .map(|k| {
                let z = SpherePoint::from_angles(*theta, k as f64 * dphi);
                poly.eval_normalized(&z).norm_sqr()
            })
            .sum();
        total += wt * ring * dphi;
    }
    Ok(total * (2 * state.j() + 1) as f64 / (4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((m - 2.0 / 19.0).abs() < 1e-14);
        let (x, _) = gauss_legendre(128);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn lowest_weight_state_is_normalized() {
        let s = StateVector::dicke(10, -10).unwrap();
        assert!((husimi_quadrature(&s, 128, 128).unwrap() - 1.0).abs() < 1e-8);
        let s2 = 2f64.sqrt();
        let g = StateVector::from_real(1, &[1.0, 0.0, 1.0 - s2]).unwrap();
        assert!((husimi_quadrature(&g, 64, 64).unwrap() - 1.0).abs() < 1e-6);
        assert!(husimi_quadrature(&g, 32, 64).is_err());
    }

    #[test]
    fn midpoint_rule_converges_at_second_order() {
        let s = StateVector::from_real(3, &[0.2, -0.4, 0.1, 0.5, 0.3, -0.6, 0.25]).unwrap();
        let errs: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&n| (husimi_quadrature_with(&s, QuadratureRule::Midpoint, n, 64).unwrap() - 1.0).abs())
            .collect();
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        assert!(order1 >= 1.9 && order2 >= 1.9, "{errs:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn random_states_are_normalized(coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 21)) {
            let v: Vec<Complex64> = coeffs.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            prop_assume!(v.iter().any(|c| c.norm() > 1e-3));
            let s = StateVector::new(10, v).unwrap();
            prop_assert!((husimi_quadrature(&s, 64, 64).unwrap() - 1.0).abs() < 1e-6);
        }
    }
}
