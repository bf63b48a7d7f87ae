//! Double-double helpers on top of `TwoFloat`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use twofloat::TwoFloat;

/// Unit roundoff of double-double arithmetic.
pub(crate) const EPS: f64 = 4.93e-32;

/// Double-double quotient by two correction steps. `TwoFloat`'s own
/// division loses the low word (its `1 - b·(1/b)` is not formed exactly).
pub(crate) fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::from(q1) + q2 + q3
}

pub(crate) fn to_f64(x: TwoFloat) -> f64 {
    x.hi() + x.lo()
}

/// `sqrt(C(n, k))` in double-double for `k = 0..=n`.
pub(crate) fn sqrt_binomials(n: usize) -> Vec<TwoFloat> {
    let mut out = vec![TwoFloat::from(1.0); n + 1];
    let mut c = TwoFloat::from(1.0);
    for k in 0..n / 2 {
        c = div(c * ((n - k) as f64), TwoFloat::from((k + 1) as f64));
        let s = c.sqrt();
        out[k + 1] = s;
        out[n - k - 1] = s;
    }
    out
}

/// Complex double-double number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Cdd {
    pub re: TwoFloat,
    pub im: TwoFloat,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: TwoFloat::from_f64(0.0),
        im: TwoFloat::from_f64(0.0),
    };

    pub fn from_c64(z: Complex64) -> Self {
        Cdd {
            re: TwoFloat::from(z.re),
            im: TwoFloat::from(z.im),
        }
    }

    pub fn real(x: TwoFloat) -> Self {
        Cdd {
            re: x,
            im: TwoFloat::from(0.0),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(to_f64(self.re), to_f64(self.im))
    }

    pub fn norm_sqr(self) -> TwoFloat {
        self.re * self.re + self.im * self.im
    }

    /// Modulus, to double precision (used for tests and scaling only).
    pub fn abs(self) -> f64 {
        to_f64(self.norm_sqr()).sqrt()
    }

    pub fn recip(self) -> Self {
        let n = self.norm_sqr();
        Cdd {
            re: div(self.re, n),
            im: div(-self.im, n),
        }
    }

    pub fn div(self, other: Cdd) -> Cdd {
        self * other.recip()
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl Mul<f64> for Cdd {
    type Output = Cdd;
    fn mul(self, o: f64) -> Cdd {
        Cdd {
            re: self.re * o,
            im: self.im * o,
        }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd {
            re: -self.re,
            im: -self.im,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_keeps_the_low_word() {
        let third = div(TwoFloat::from(1.0), TwoFloat::from(3.0));
        assert!((third * 3.0 - 1.0).abs().hi() < 1e-31);
        let b = div(TwoFloat::from(7.0), TwoFloat::from(3.0));
        let a = TwoFloat::from(2.0).sqrt();
        let q = div(a, b);
        assert!((q * b - a).abs().hi() < 1e-31);
    }

    #[test]
    fn complex_reciprocal() {
        let z = Cdd::from_c64(Complex64::new(0.3, -1.7));
        let one = z * z.recip() - Cdd::real(TwoFloat::from(1.0));
        assert!(one.abs() < 1e-31);
    }

    #[test]
    fn binomials() {
        let s = sqrt_binomials(40);
        let c = s[20] * s[20];
        assert!((c - 137846528820.0).abs().hi() < 1e-18);
        assert_eq!(s[0], TwoFloat::from(1.0));
        assert_eq!(s[40], TwoFloat::from(1.0));
    }
}
