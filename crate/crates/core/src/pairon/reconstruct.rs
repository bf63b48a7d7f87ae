use num_complex::Complex64;

use super::PaironSet;
use crate::math::sqrt_binomials;
use crate::spin::{build_hamiltonian, ModelParams, StateVector};
use crate::{Error, Result};

/// Expands `∏_α [(e_α - t) a†² + (e_α + t) b†²] a†^ν b†^ν |0⟩`, which is the
/// product ansatz `∏_α [a†²/(e_α + t) + b†²/(e_α - t)]` with the constant
/// `∏(e_α² - t²)` cleared, so `e_α = ±t` needs no special case.
///
/// The coefficient of `|n_a, n_b⟩`, `n_b = 2s + ν`, is `σ_s sqrt(n_a! n_b!)`,
/// kept as `σ_s / sqrt(C(2j, n_b))` up to a common factor.
pub fn reconstruct_state(p: &PaironSet, t: f64) -> Result<StateVector> {
    let j = p.j();
    let nu = p.seniority() as usize;
    let mut sigma = vec![Complex64::new(1.0, 0.0)];
    for e in p.pairons() {
        let (lo, hi) = (e - t, e + t);
        let mut next = vec![Complex64::new(0.0, 0.0); sigma.len() + 1];
        for (s, v) in sigma.iter().enumerate() {
            next[s] += v * lo;
            next[s + 1] += v * hi;
        }
        let scale = next.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Singular("pairon product vanishes".into()));
        }
        sigma = next.into_iter().map(|c| c / scale).collect();
    }
    let sb = sqrt_binomials(2 * j as usize);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * j as usize + 1];
    for (s, v) in sigma.iter().enumerate() {
        let nb = 2 * s + nu;
        coeffs[nb] = v / sb[nb];
    }
    StateVector::new(j, coeffs)
}

/// `‖Hψ - ⟨ψ|H|ψ⟩ψ‖ / ‖H‖`.
pub fn eigen_residual(state: &StateVector, params: &ModelParams) -> f64 {
    let h = build_hamiltonian(params);
    let v = state.coeffs();
    let hv = h.apply(v);
    let mean = h.expectation(v);
    let r = hv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b * mean).norm_sqr())
        .sum::<f64>()
        .sqrt();
    r / h.norm().max(f64::MIN_POSITIVE)
}
