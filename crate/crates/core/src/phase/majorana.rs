use num_complex::Complex64;
use twofloat::TwoFloat;

use super::SpherePoint;
use crate::math::sqrt_binomials;
use crate::spin::StateVector;
use crate::{Error, Result};

/// Coefficients below `DEGREE_THRESHOLD·max|d|` at either end of the
/// polynomial are treated as zero when reading off degree and valuation.
pub const DEGREE_THRESHOLD: f64 = 1e-13;

/// `P(ζ) = Σ_k d_k ζ^k` with `d_k = conj(c_m) sqrt(C(2j, k))`, `k = j + m`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaPoly {
    j: u32,
    coeffs: Vec<Complex64>,
    degree: usize,
    valuation: usize,
}

pub fn majorana_poly(state: &StateVector) -> MajoranaPoly {
    let j = state.j();
    let sb = sqrt_binomials(2 * j as usize);
    let coeffs = state
        .coeffs()
        .iter()
        .zip(&sb)
        .map(|(c, b)| c.conj() * *b)
        .collect();
    MajoranaPoly::new(j, coeffs).expect("normalized state has a nonzero coefficient")
}

impl MajoranaPoly {
    pub fn new(j: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * j as usize + 1 {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                2 * j + 1,
                coeffs.len()
            )));
        }
        let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(max > 0.0 && max.is_finite()) {
            return Err(Error::InvalidParameter(
                "Majorana polynomial needs a finite nonzero coefficient".into(),
            ));
        }
        let cut = DEGREE_THRESHOLD * max;
        let degree = coeffs.iter().rposition(|c| c.norm() > cut).unwrap();
        let valuation = coeffs.iter().position(|c| c.norm() > cut).unwrap();
        Ok(Self {
            j,
            coeffs,
            degree,
            valuation,
        })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Largest `k` with a significant coefficient.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Smallest `k` with a significant coefficient (order of the zero at 0).
    pub fn valuation(&self) -> usize {
        self.valuation
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `P(ζ)`; at infinity the top coefficient `d_{2j}`, i.e. the value of
    /// `ζ^{-2j} P(ζ)` in the chart `w = 1/ζ` at `w = 0`.
    pub fn eval(&self, z: &SpherePoint) -> Complex64 {
        match z {
            SpherePoint::Infinity => self.coeffs[self.coeffs.len() - 1],
            SpherePoint::Finite(z) => horner(&self.coeffs, *z),
        }
    }

    /// `P(ζ) / (1 + |ζ|²)^j`, evaluated in whichever chart keeps it finite.
    pub fn eval_normalized(&self, z: &SpherePoint) -> Complex64 {
        let j = self.j as i32;
        match z {
            SpherePoint::Infinity => self.coeffs[self.coeffs.len() - 1],
            SpherePoint::Finite(z) if z.norm() <= 1.0 => {
                horner(&self.coeffs, *z) / (1.0 + z.norm_sqr()).powi(j)
            }
            SpherePoint::Finite(z) => {
                // ζ^{2j} Σ d_k w^{2j-k} / (1+|ζ|²)^j with w = 1/ζ
                let w = 1.0 / z;
                let s = self
                    .coeffs
                    .iter()
                    .fold(Complex64::new(0.0, 0.0), |acc, d| acc * w + d);
                let phase = (z / z.norm()).powi(2 * j);
                let mag = (1.0 / (1.0 + w.norm_sqr())).powi(j);
                s * phase * mag
            }
        }
    }

    /// The state with `c_m = conj(d_k) / sqrt(C(2j, k))`, normalized.
    pub fn to_state(&self) -> Result<StateVector> {
        let sb = sqrt_binomials(2 * self.j as usize);
        StateVector::new(
            self.j,
            self.coeffs.iter().zip(&sb).map(|(d, b)| d.conj() / *b).collect(),
        )
    }
}

/// `d_k = c_k sqrt(C(2j, k))` for a real double-double state vector.
pub(crate) fn extended_coeffs(state: &[TwoFloat]) -> Vec<TwoFloat> {
    let sb = crate::dd::sqrt_binomials(state.len() - 1);
    state.iter().zip(&sb).map(|(c, b)| *c * *b).collect()
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, d| acc * z + d)
}
