use std::sync::Arc;

use num_complex::Complex64;

use super::FockBasis;
use crate::math::ln_factorials;
use crate::{Error, Result};

/// Normalized state `Σ_n c_n |n_0, …, n_L⟩` on a fixed-`N` Fock basis.
#[derive(Clone, Debug)]
pub struct BosonState {
    basis: Arc<FockBasis>,
    coeffs: Vec<Complex64>,
}

impl BosonState {
    pub fn new(basis: Arc<FockBasis>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        Ok(Self {
            basis,
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
        })
    }

    pub fn fock(basis: Arc<FockBasis>, occ: &[usize]) -> Result<Self> {
        let i = basis
            .index_of(occ)
            .ok_or_else(|| Error::InvalidParameter(format!("{occ:?} is not in the basis")))?;
        let mut c = vec![Complex64::new(0.0, 0.0); basis.len()];
        c[i] = Complex64::new(1.0, 0.0);
        Self::new(basis, c)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, occ: &[usize]) -> Complex64 {
        self.basis
            .index_of(occ)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn inner(&self, other: &BosonState) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &BosonState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Per-level seniorities `ν_ℓ`, when every occupied basis state has the
    /// same occupation parities.
    pub fn seniorities(&self) -> Option<Vec<u8>> {
        let mut found: Option<Vec<u8>> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let p = self.basis.parities(i);
            match &found {
                None => found = Some(p),
                Some(q) if *q != p => return None,
                _ => {}
            }
        }
        found
    }
}

/// Terms `conj(c_n) sqrt(N!/∏n_ℓ!) ∏_{ℓ≥1} ζ_ℓ^{n_ℓ}` of the amplitude,
/// without the normalization.
fn terms(state: &BosonState, zeta: &[Complex64]) -> Result<Vec<Complex64>> {
    let basis = state.basis();
    if zeta.len() != basis.l() {
        return Err(Error::InvalidParameter(format!(
            "expected {} coordinates, got {}",
            basis.l(),
            zeta.len()
        )));
    }
    let n = basis.particles();
    let lf = ln_factorials(n);
    Ok(basis
        .states()
        .iter()
        .zip(state.coeffs())
        .map(|(occ, c)| {
            let w = (0.5 * (lf[n] - occ.iter().map(|k| lf[*k]).sum::<f64>())).exp();
            let mono: Complex64 = occ[1..]
                .iter()
                .zip(zeta)
                .map(|(k, z)| z.powu(*k as u32))
                .product();
            c.conj() * w * mono
        })
        .collect())
}

/// `⟨ψ|ζ⟩` for the SU(L+1) coherent state with coordinates `ζ_1, …, ζ_L`:
/// `(1 + Σ|ζ_ℓ|²)^{-N/2} Σ_n conj(c_n) sqrt(N!/∏n_ℓ!) ∏ ζ_ℓ^{n_ℓ}`.
pub fn boson_husimi_amplitude(state: &BosonState, zeta: &[Complex64]) -> Result<Complex64> {
    let s: Complex64 = terms(state, zeta)?.into_iter().sum();
    let r2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
    Ok(s * (1.0 + r2).powf(-0.5 * state.basis().particles() as f64))
}

/// `|Σ terms| / Σ|terms|`: the amplitude relative to the size of the terms
/// that cancel in it. Zero on the zero set, independent of normalization.
pub fn cancellation_ratio(state: &BosonState, zeta: &[Complex64]) -> Result<f64> {
    let t = terms(state, zeta)?;
    let bound: f64 = t.iter().map(|c| c.norm()).sum();
    let sum: Complex64 = t.into_iter().sum();
    Ok(if bound == 0.0 { 0.0 } else { sum.norm() / bound })
}
