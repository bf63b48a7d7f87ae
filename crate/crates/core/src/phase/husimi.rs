use num_complex::Complex64;

use super::{majorana_poly, SpherePoint};
use crate::spin::StateVector;

/// `⟨ψ|ζ⟩ = Σ_m conj(c_m) sqrt(C(2j, j+m)) ζ^{j+m} / (1+|ζ|²)^j`.
/// At `ζ = ∞` this is `conj(c_j)`.
pub fn coherent_overlap(state: &StateVector, z: &SpherePoint) -> Complex64 {
    majorana_poly(state).eval_normalized(z)
}

/// `Q(ζ) = |⟨ψ|ζ⟩|²`.
pub fn husimi(state: &StateVector, z: &SpherePoint) -> f64 {
    coherent_overlap(state, z).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{cluster_zeros, poly_roots, DEFAULT_CLUSTER_RADIUS};
    use proptest::prelude::*;

    #[test]
    fn simple_values() {
        let low = StateVector::dicke(3, -3).unwrap();
        assert_eq!(
            coherent_overlap(&low, &SpherePoint::ORIGIN),
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(husimi(&low, &SpherePoint::ORIGIN), 1.0);
        let s = StateVector::dicke(1, -1).unwrap();
        assert!((coherent_overlap(&s, &SpherePoint::new(1.0, 0.0)).re - 0.5).abs() < 1e-16);
        assert!((husimi(&s, &SpherePoint::new(1.0, 0.0)) - 0.25).abs() < 1e-16);
        let s = StateVector::dicke(1, 0).unwrap();
        let a = coherent_overlap(&s, &SpherePoint::new(0.0, 1.0));
        assert!((a - Complex64::new(0.0, 2f64.sqrt() / 2.0)).norm() < 1e-15);
        let top = StateVector::dicke(2, 2).unwrap();
        assert_eq!(
            coherent_overlap(&top, &SpherePoint::Infinity),
            Complex64::new(1.0, 0.0)
        );
    }

    proptest! {
        #[test]
        fn bounded_and_vanishing_at_zeros(
            j in 1u32..10,
            coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 21),
            re in -4.0f64..4.0, im in -4.0f64..4.0,
        ) {
            let v: Vec<Complex64> = coeffs[..2 * j as usize + 1].iter().map(|&(a, b)| Complex64::new(a, b)).collect();
            prop_assume!(v.iter().any(|c| c.norm() > 1e-3));
            let s = StateVector::new(j, v).unwrap();
            let q = husimi(&s, &SpherePoint::new(re, im));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&q));
            let zs = cluster_zeros(&poly_roots(&majorana_poly(&s)).unwrap(), DEFAULT_CLUSTER_RADIUS);
            for z in zs.zeros() {
                if z.multiplicity == 1 {
                    prop_assert!(coherent_overlap(&s, &z.point).norm() <= 1e-9);
                }
            }
        }
    }
}
