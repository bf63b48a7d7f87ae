use crate::{Error, Result};

/// Couplings of the LMG Hamiltonian
/// `H = ε Jz + (λ/2)(J+² + J-²) + (γ/2)(J+J- + J-J+)` for quasispin `j`.
///
/// The dimensionless control parameters are
/// `γx = (2j-1)(γ+λ)/ε`, `γy = (2j-1)(γ-λ)/ε` and `t = sqrt(|γx/γy|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    j: u32,
    epsilon: f64,
    lambda: f64,
    gamma: f64,
}

impl ModelParams {
    pub fn new(j: u32, epsilon: f64, lambda: f64, gamma: f64) -> Result<Self> {
        if j < 1 {
            return Err(Error::InvalidParameter(format!("j must be >= 1, got {j}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be finite and positive, got {epsilon}"
            )));
        }
        if !lambda.is_finite() || !gamma.is_finite() {
            return Err(Error::InvalidParameter("couplings must be finite".into()));
        }
        Ok(Self {
            j,
            epsilon,
            lambda,
            gamma,
        })
    }

    /// Builds the couplings from the control parameters `(γx, γy)`.
    pub fn from_control(j: u32, gamma_x: f64, gamma_y: f64, epsilon: f64) -> Result<Self> {
        if j < 1 {
            return Err(Error::InvalidParameter(format!("j must be >= 1, got {j}")));
        }
        let scale = epsilon / (2 * j - 1) as f64;
        let plus = gamma_x * scale;
        let minus = gamma_y * scale;
        Self::new(j, epsilon, 0.5 * (plus - minus), 0.5 * (plus + minus))
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of Dicke states, `2j + 1`.
    pub fn dim(&self) -> usize {
        2 * self.j as usize + 1
    }

    pub fn gamma_x(&self) -> f64 {
        (2 * self.j - 1) as f64 * (self.gamma + self.lambda) / self.epsilon
    }

    pub fn gamma_y(&self) -> f64 {
        (2 * self.j - 1) as f64 * (self.gamma - self.lambda) / self.epsilon
    }

    /// `sqrt(|γx/γy|)`, undefined when `γy = 0`.
    pub fn t(&self) -> Option<f64> {
        let gy = self.gamma_y();
        if gy == 0.0 {
            None
        } else {
            Some((self.gamma_x() / gy).abs().sqrt())
        }
    }
}

/// Converts a user-facing quasispin value to an integer `j >= 1`.
/// Half-integer (or otherwise fractional) values are rejected.
pub fn spin_from_f64(j: f64) -> Result<u32> {
    if !j.is_finite() || j.fract() != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "j must be an integer (half-integer spins are not supported), got {j}"
        )));
    }
    if j < 1.0 || j > u32::MAX as f64 {
        return Err(Error::InvalidParameter(format!("j must be >= 1, got {j}")));
    }
    Ok(j as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_bad_spins() {
        assert!(spin_from_f64(2.5).is_err());
        assert!(spin_from_f64(0.0).is_err());
        assert!(spin_from_f64(-1.0).is_err());
        assert_eq!(spin_from_f64(10.0).unwrap(), 10);
        assert!(ModelParams::new(0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn t_requires_nonzero_gamma_y() {
        let p = ModelParams::from_control(3, 2.0, 0.0, 1.0).unwrap();
        assert!(p.t().is_none());
        let p = ModelParams::from_control(3, 2.0, 8.0, 1.0).unwrap();
        assert!((p.t().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn worked_two_level_point() {
        // j = 1, λ = 1, γ = 0  ⇔  γx = 1, γy = -1
        let p = ModelParams::new(1, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(p.gamma_x(), 1.0);
        assert_eq!(p.gamma_y(), -1.0);
        assert_eq!(p.t(), Some(1.0));
    }

    proptest! {
        #[test]
        fn control_roundtrip(j in 1u32..200, gx in -50.0f64..50.0, gy in -50.0f64..50.0, eps in 0.1f64..10.0) {
            let p = ModelParams::from_control(j, gx, gy, eps).unwrap();
            prop_assert!((p.gamma_x() - gx).abs() <= 1e-13 * (1.0 + gx.abs() + gy.abs()));
            prop_assert!((p.gamma_y() - gy).abs() <= 1e-13 * (1.0 + gx.abs() + gy.abs()));
            let q = ModelParams::new(j, eps, p.lambda(), p.gamma()).unwrap();
            prop_assert_eq!(p, q);
            match p.t() {
                Some(t) => prop_assert!(t.is_finite() && t >= 0.0),
                None => prop_assert_eq!(p.gamma_y(), 0.0),
            }
        }
    }
}
