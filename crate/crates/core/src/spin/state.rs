use std::fmt;

use num_complex::Complex64;

use crate::{Error, Result};

/// Eigenvalue sector of `exp(iπ(Jz + j))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Mixed => "mixed",
        })
    }
}

/// Normalized pure state `Σ c_m |j, m⟩`.
///
/// `coeffs[k]` holds `c_m` for `m = k - j`, so `k = j + m` is the number of
/// excited pairs and equals the occupation `n_b` of the Schwinger boson `b`
/// (`n_a = 2j - k`).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    j: u32,
    coeffs: Vec<Complex64>,
    parity: Parity,
}

impl StateVector {
    /// Normalizes `coeffs` and labels the parity from its exact zero pattern.
    pub fn new(j: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        if j < 1 {
            return Err(Error::InvalidParameter(format!("j must be >= 1, got {j}")));
        }
        let dim = 2 * j as usize + 1;
        if coeffs.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "expected {dim} coefficients for j = {j}, got {}",
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
        let coeffs: Vec<Complex64> = coeffs.into_iter().map(|c| c / norm).collect();
        let parity = parity_of(&coeffs);
        Ok(Self { j, coeffs, parity })
    }

    pub fn from_real(j: u32, coeffs: &[f64]) -> Result<Self> {
        Self::new(j, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The Dicke state `|j, m⟩`.
    pub fn dicke(j: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > j {
            return Err(Error::InvalidParameter(format!(
                "|m| = {} exceeds j = {j}",
                m.abs()
            )));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * j as usize + 1];
        coeffs[(j as i32 + m) as usize] = Complex64::new(1.0, 0.0);
        Self::new(j, coeffs)
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: i32) -> Complex64 {
        self.coeffs[(self.j as i32 + m) as usize]
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }
}

fn parity_of(coeffs: &[Complex64]) -> Parity {
    let zero = Complex64::new(0.0, 0.0);
    let odd_empty = coeffs.iter().skip(1).step_by(2).all(|c| *c == zero);
    let even_empty = coeffs.iter().step_by(2).all(|c| *c == zero);
    match (odd_empty, even_empty) {
        (true, _) => Parity::Even,
        (false, true) => Parity::Odd,
        _ => Parity::Mixed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_and_labels() {
        let s = StateVector::from_real(1, &[3.0, 0.0, 4.0]).unwrap();
        assert_eq!(s.parity(), Parity::Even);
        let n: f64 = s.coeffs().iter().map(|c| c.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-15);
        assert!((s.coeff(1).re - 0.8).abs() < 1e-15);

        let s = StateVector::from_real(1, &[0.0, 2.0, 0.0]).unwrap();
        assert_eq!(s.parity(), Parity::Odd);
        let s = StateVector::from_real(1, &[1.0, 1.0, 0.0]).unwrap();
        assert_eq!(s.parity(), Parity::Mixed);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(StateVector::from_real(1, &[0.0; 3]).is_err());
        assert!(StateVector::from_real(1, &[1.0; 4]).is_err());
        assert!(StateVector::dicke(2, 3).is_err());
    }

    #[test]
    fn dicke_states() {
        let s = StateVector::dicke(10, -10).unwrap();
        assert_eq!(s.coeffs()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.parity(), Parity::Even);
        assert_eq!(StateVector::dicke(10, -9).unwrap().parity(), Parity::Odd);
    }
}
