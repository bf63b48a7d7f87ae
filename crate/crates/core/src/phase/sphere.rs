use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

/// A point of the Riemann sphere: finite `ζ` or the pole at infinity.
///
/// Charts: `ζ = tan(θ/2) e^{-iφ}`, so `θ = 0` is `ζ = 0` and `θ = π` is `ζ = ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub const ORIGIN: SpherePoint = SpherePoint::Finite(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        if theta >= PI {
            return SpherePoint::Infinity;
        }
        SpherePoint::Finite(Complex64::from_polar((0.5 * theta).tan(), -phi))
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn is_origin(&self) -> bool {
        matches!(self, SpherePoint::Finite(z) if *z == Complex64::new(0.0, 0.0))
    }

    /// Either pole (`ζ = 0` or `ζ = ∞`), where `φ` is undefined.
    pub fn is_pole(&self) -> bool {
        self.is_infinity() || self.is_origin()
    }

    /// Polar angle in `[0, π]`.
    pub fn theta(&self) -> f64 {
        match self {
            SpherePoint::Infinity => PI,
            SpherePoint::Finite(z) => {
                let r = z.norm();
                if r.is_infinite() {
                    PI
                } else {
                    2.0 * r.atan()
                }
            }
        }
    }

    /// Azimuth in `[0, 2π)`; zero at the poles by convention.
    pub fn phi(&self) -> f64 {
        match self {
            SpherePoint::Infinity => 0.0,
            SpherePoint::Finite(z) if z.norm() == 0.0 => 0.0,
            SpherePoint::Finite(z) => {
                let p = (-z.arg()).rem_euclid(TAU);
                if p >= TAU || p == 0.0 {
                    0.0
                } else {
                    p
                }
            }
        }
    }

    /// `ζ → -ζ` (rotation by π about the polar axis).
    pub fn neg(&self) -> Self {
        match self {
            SpherePoint::Finite(z) => SpherePoint::Finite(-z),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            SpherePoint::Finite(z) => SpherePoint::Finite(z.conj()),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    /// Antipodal point `-1/ζ̄`.
    pub fn antipode(&self) -> Self {
        match self {
            SpherePoint::Infinity => SpherePoint::ORIGIN,
            SpherePoint::Finite(z) if z.norm() == 0.0 => SpherePoint::Infinity,
            SpherePoint::Finite(z) => SpherePoint::Finite(-1.0 / z.conj()),
        }
    }

    /// Unit vector `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn to_unit(&self) -> [f64; 3] {
        match self {
            SpherePoint::Infinity => [0.0, 0.0, -1.0],
            SpherePoint::Finite(z) => {
                let r2 = z.norm_sqr();
                if r2.is_infinite() {
                    return [0.0, 0.0, -1.0];
                }
                if r2 > 1.0 {
                    // via w = 1/ζ to keep precision near the south pole
                    let w = 1.0 / z;
                    let s2 = w.norm_sqr();
                    let d = 1.0 + s2;
                    [2.0 * w.re / d, 2.0 * w.im / d, (s2 - 1.0) / d]
                } else {
                    let d = 1.0 + r2;
                    [2.0 * z.re / d, -2.0 * z.im / d, (1.0 - r2) / d]
                }
            }
        }
    }

    /// Inverse of [`SpherePoint::to_unit`]; the input is normalized first.
    pub fn from_unit(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let [x, y, z] = [v[0] / n, v[1] / n, v[2] / n];
        if z >= 0.0 {
            SpherePoint::Finite(Complex64::new(x, -y) / (1.0 + z))
        } else {
            let w = Complex64::new(x, y) / (1.0 - z);
            if w.norm() == 0.0 {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite(1.0 / w)
            }
        }
    }

    /// Chordal distance `2|a-b| / sqrt((1+|a|²)(1+|b|²))`, in `[0, 2]`.
    pub fn chordal(&self, other: &SpherePoint) -> f64 {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(a), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(a)) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                let (ra, rb) = (a.norm(), b.norm());
                if ra > 1.0 && rb > 1.0 {
                    // same formula in the w = 1/ζ chart, which avoids overflow
                    let (wa, wb) = (1.0 / a, 1.0 / b);
                    2.0 * (wa - wb).norm() / ((1.0 + wa.norm_sqr()) * (1.0 + wb.norm_sqr())).sqrt()
                } else {
                    2.0 * (a - b).norm() / ((1.0 + ra * ra) * (1.0 + rb * rb)).sqrt()
                }
            }
        }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => f.write_str("inf"),
            SpherePoint::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chordal_unit(a: &SpherePoint, b: &SpherePoint) -> f64 {
        let (u, v) = (a.to_unit(), b.to_unit());
        ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt()
    }

    #[test]
    fn poles_and_angles() {
        assert_eq!(SpherePoint::from_angles(PI, 1.0), SpherePoint::Infinity);
        assert_eq!(SpherePoint::Infinity.theta(), PI);
        assert_eq!(SpherePoint::ORIGIN.theta(), 0.0);
        assert_eq!(SpherePoint::ORIGIN.phi(), 0.0);
        assert!(SpherePoint::ORIGIN.is_pole());
        let z = SpherePoint::new(0.0, -1.0);
        assert!((z.theta() - PI / 2.0).abs() < 1e-15);
        assert!((z.phi() - PI / 2.0).abs() < 1e-15);
        assert_eq!(SpherePoint::Infinity.to_unit(), [0.0, 0.0, -1.0]);
        assert_eq!(SpherePoint::ORIGIN.chordal(&SpherePoint::Infinity), 2.0);
        assert_eq!(SpherePoint::new(1.0, 0.0).antipode(), SpherePoint::new(-1.0, 0.0));
    }

    proptest! {
        #[test]
        fn chart_roundtrip(re in -50.0f64..50.0, im in -50.0f64..50.0) {
            let p = SpherePoint::new(re, im);
            let q = SpherePoint::from_angles(p.theta(), p.phi());
            let (a, b) = (p.finite().unwrap(), q.finite().unwrap());
            prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            prop_assert!((0.0..TAU).contains(&p.phi()));
            let u = SpherePoint::from_unit(p.to_unit());
            prop_assert!(p.chordal(&u) < 1e-14);
        }

        #[test]
        fn chordal_is_the_embedded_chord(a in -30.0f64..30.0, b in -30.0f64..30.0,
                                         c in -30.0f64..30.0, d in -30.0f64..30.0) {
            let p = SpherePoint::new(a, b);
            let q = SpherePoint::new(c, d);
            prop_assert!((p.chordal(&q) - chordal_unit(&p, &q)).abs() < 1e-12);
            prop_assert!((p.chordal(&SpherePoint::Infinity) - chordal_unit(&p, &SpherePoint::Infinity)).abs() < 1e-12);
            prop_assert!((p.chordal(&q) - q.chordal(&p)).abs() < 1e-15);
            // rotations about the axis and the antipodal map are isometries
            prop_assert!((p.neg().chordal(&q.neg()) - p.chordal(&q)).abs() < 1e-12);
            prop_assert!((p.chordal(&p.antipode()) - 2.0).abs() < 1e-12);
        }
    }
}
