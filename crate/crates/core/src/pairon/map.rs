use num_complex::Complex64;

use crate::phase::{SpherePoint, Zero, ZeroSet};
use crate::{Error, Result};

/// Chordal tolerance for matching a zero `ζ` with its partner `-ζ`.
pub const PAIRING_TOLERANCE: f64 = 1e-6;

/// Pairing energies `e_α`, `α = 1..M`, `M = j - ν`, of a state with
/// seniority `ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct PaironSet {
    j: u32,
    seniority: u8,
    pairons: Vec<Complex64>,
}

impl PaironSet {
    pub fn new(j: u32, seniority: u8, pairons: Vec<Complex64>) -> Result<Self> {
        if seniority > 1 {
            return Err(Error::InvalidParameter(format!(
                "seniority must be 0 or 1, got {seniority}"
            )));
        }
        if seniority as u32 > j || pairons.len() != (j - seniority as u32) as usize {
            return Err(Error::InvalidParameter(format!(
                "j = {j}, seniority {seniority} needs {} pairons, got {}",
                j.saturating_sub(seniority as u32),
                pairons.len()
            )));
        }
        if pairons.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::InvalidParameter("pairing energies must be finite".into()));
        }
        Ok(Self {
            j,
            seniority,
            pairons,
        })
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn seniority(&self) -> u8 {
        self.seniority
    }

    pub fn pairons(&self) -> &[Complex64] {
        &self.pairons
    }

    pub fn len(&self) -> usize {
        self.pairons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairons.is_empty()
    }

    /// Largest distance between the multiset and its complex conjugate.
    pub fn conjugation_defect(&self) -> f64 {
        let conj: Vec<Complex64> = self.pairons.iter().map(|e| e.conj()).collect();
        multiset_distance(&self.pairons, &conj)
    }

    /// Pairons within `tol` of a pole `±t` of the ansatz.
    pub fn near_poles(&self, t: f64, tol: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| {
                let e = self.pairons[a];
                (e - t).norm() <= tol || (e + t).norm() <= tol
            })
            .collect()
    }

    /// Multiset distance: greedy nearest matching, largest matched gap.
    pub fn distance(&self, other: &PaironSet) -> f64 {
        if self.seniority != other.seniority || self.len() != other.len() {
            return f64::INFINITY;
        }
        multiset_distance(&self.pairons, &other.pairons)
    }
}

/// Greedy matching of the closest pairs first; returns the worst matched gap.
pub(crate) fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            cand.push(((x - y).norm(), i, k));
        }
    }
    cand.sort_by(|p, q| p.0.total_cmp(&q.0));
    let (mut ua, mut ub) = (vec![false; a.len()], vec![false; b.len()]);
    let mut worst: f64 = 0.0;
    for (d, i, k) in cand {
        if !ua[i] && !ub[k] {
            ua[i] = true;
            ub[k] = true;
            worst = worst.max(d);
        }
    }
    worst
}

/// `e = t(1 - w̄)/(1 + w̄)` for `w = ζ²`; `w = ∞` gives `-t`.
pub fn zeta_sq_to_pairon(w: &SpherePoint, t: f64) -> Result<Complex64> {
    match w {
        SpherePoint::Infinity => Ok(Complex64::new(-t, 0.0)),
        SpherePoint::Finite(w) => {
            let wb = w.conj();
            let den = 1.0 + wb;
            if den.norm() == 0.0 {
                return Err(Error::Singular(
                    "zero with ζ² = -1 maps to an infinite pairing energy".into(),
                ));
            }
            Ok(t * (1.0 - wb) / den)
        }
    }
}

/// `ζ² = (t - ē)/(ē + t)`; `e = -t` gives `ζ² = ∞`.
pub fn pairon_to_zeta_sq(e: Complex64, t: f64) -> SpherePoint {
    let eb = e.conj();
    let den = eb + t;
    if den.norm() == 0.0 {
        SpherePoint::Infinity
    } else {
        SpherePoint::Finite((t - eb) / den)
    }
}

fn square(z: &SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Infinity => SpherePoint::Infinity,
        SpherePoint::Finite(z) => SpherePoint::Finite(z * z),
    }
}

/// Zeros grouped into the seniority pair `{0, ∞}` (when `ν = 1`) and
/// `±` pairs, one per pairing energy.
#[derive(Clone, Debug, PartialEq)]
pub struct PairedZeros {
    pub seniority: u8,
    /// `(ζ, ζ')` with `ζ' ≈ -ζ`; the representative `ζ²` is `-ζζ'`.
    pub pairs: Vec<(SpherePoint, SpherePoint)>,
    /// Largest chordal distance between `ζ'` and `-ζ`.
    pub max_defect: f64,
}

impl PairedZeros {
    /// `w = -ζζ'`, exact for exact partners.
    pub fn representative(pair: &(SpherePoint, SpherePoint)) -> SpherePoint {
        match pair {
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => SpherePoint::Finite(-a * b),
            _ => SpherePoint::Infinity,
        }
    }
}

/// Splits the zeros into the seniority pair and `±ζ` pairs by greedy
/// nearest-partner matching in the chordal metric.
pub fn pair_zeros(zeros: &ZeroSet, tol: f64) -> Result<PairedZeros> {
    let total = zeros.total_multiplicity();
    let two_j = 2 * zeros.j() as usize;
    if total != two_j {
        return Err(Error::Inconsistent(format!("{total} zeros for 2j = {two_j}")));
    }
    let mut rest = zeros.points();
    let near = |p: &SpherePoint, pole: &SpherePoint| p.chordal(pole) <= tol;
    let origin = rest.iter().filter(|p| near(p, &SpherePoint::ORIGIN)).count();
    let infinity = rest.iter().filter(|p| near(p, &SpherePoint::Infinity)).count();
    let seniority = (origin % 2) as u8;
    if infinity % 2 != seniority as usize {
        let zero = if seniority == 1 {
            SpherePoint::ORIGIN
        } else {
            SpherePoint::Infinity
        };
        return Err(Error::UnpairedZero { zero, tolerance: tol });
    }
    if seniority == 1 {
        // the seniority pair: the zeros closest to each pole
        for pole in [SpherePoint::ORIGIN, SpherePoint::Infinity] {
            let i = (0..rest.len())
                .min_by(|&a, &b| rest[a].chordal(&pole).total_cmp(&rest[b].chordal(&pole)))
                .unwrap();
            rest.swap_remove(i);
        }
    }
    let mut pairs = Vec::with_capacity(zeros.j() as usize);
    let mut max_defect: f64 = 0.0;
    let n = rest.len();
    let mut cand: Vec<(f64, usize, usize)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let d = rest[a].neg().chordal(&rest[b]);
            if d <= tol {
                cand.push((d, a, b));
            }
        }
    }
    cand.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used = vec![false; n];
    for (d, a, b) in cand {
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            max_defect = max_defect.max(d);
            pairs.push((rest[a], rest[b]));
        }
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(Error::UnpairedZero {
            zero: rest[i],
            tolerance: tol,
        });
    }
    Ok(PairedZeros {
        seniority,
        pairs,
        max_defect,
    })
}

fn sort_key(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Pairing energies from the zeros: `e = t(1 - w̄)/(1 + w̄)` with `w = ζ²`
/// for each `±ζ` pair, sorted by real then imaginary part.
pub fn zeros_to_pairons(zeros: &ZeroSet, t: f64) -> Result<PaironSet> {
    let paired = pair_zeros(zeros, PAIRING_TOLERANCE)?;
    let mut es = paired
        .pairs
        .iter()
        .map(|p| zeta_sq_to_pairon(&PairedZeros::representative(p), t))
        .collect::<Result<Vec<_>>>()?;
    es.sort_by(sort_key);
    PaironSet::new(zeros.j(), paired.seniority, es)
}

/// `±sqrt((t - ē)/(ē + t))` for every pairon, plus `{0, ∞}` for `ν = 1`.
pub fn pairons_to_zeros(p: &PaironSet, t: f64) -> ZeroSet {
    let mut zeros = Vec::with_capacity(2 * p.j() as usize);
    if p.seniority() == 1 {
        zeros.push(Zero::new(SpherePoint::ORIGIN, 1));
        zeros.push(Zero::new(SpherePoint::Infinity, 1));
    }
    for e in p.pairons() {
        match pairon_to_zeta_sq(*e, t) {
            SpherePoint::Infinity => zeros.push(Zero::new(SpherePoint::Infinity, 2)),
            SpherePoint::Finite(w) if w.norm() == 0.0 => zeros.push(Zero::new(SpherePoint::ORIGIN, 2)),
            SpherePoint::Finite(w) => {
                let s = w.sqrt();
                zeros.push(Zero::new(SpherePoint::Finite(s), 1));
                zeros.push(Zero::new(SpherePoint::Finite(-s), 1));
            }
        }
    }
    ZeroSet::new(p.j(), zeros)
}

/// Largest chordal distance between `ζ²` and `(t - ē)/(ē + t)` over the
/// paired zeros, matched against the pairons by nearest image.
pub fn correspondence_defect(zeros: &ZeroSet, pairons: &PaironSet, t: f64) -> Result<f64> {
    let paired = pair_zeros(zeros, PAIRING_TOLERANCE)?;
    if paired.seniority != pairons.seniority() || paired.pairs.len() != pairons.len() {
        return Ok(f64::INFINITY);
    }
    let images: Vec<SpherePoint> = pairons
        .pairons()
        .iter()
        .map(|e| pairon_to_zeta_sq(*e, t))
        .collect();
    let mut used = vec![false; images.len()];
    let mut worst: f64 = 0.0;
    for pair in &paired.pairs {
        let w = PairedZeros::representative(pair);
        let sq = square(&pair.0);
        let (k, d) = images
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, im)| (k, im.chordal(&w).max(im.chordal(&sq))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("as many images as pairs");
        used[k] = true;
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn all_zeros_at_infinity() {
        let z = ZeroSet::new(10, vec![Zero::new(SpherePoint::Infinity, 20)]);
        let p = zeros_to_pairons(&z, 0.7).unwrap();
        assert_eq!(p.seniority(), 0);
        assert!(p.pairons().iter().all(|e| *e == c(-0.7, 0.0)));
    }

    #[test]
    fn unit_pair_gives_zero_energy() {
        let z = ZeroSet::new(
            1,
            vec![
                Zero::new(SpherePoint::new(1.0, 0.0), 1),
                Zero::new(SpherePoint::new(-1.0, 0.0), 1),
            ],
        );
        assert_eq!(zeros_to_pairons(&z, 1.0).unwrap().pairons(), &[c(0.0, 0.0)]);
    }

    #[test]
    fn two_level_example() {
        let s2 = 2f64.sqrt();
        let r = (1.0 + s2).sqrt();
        let z = ZeroSet::new(
            1,
            vec![
                Zero::new(SpherePoint::new(r, 0.0), 1),
                Zero::new(SpherePoint::new(-r, 0.0), 1),
            ],
        );
        let p = zeros_to_pairons(&z, 1.0).unwrap();
        assert!((p.pairons()[0] - c(1.0 - s2, 0.0)).norm() < 1e-14);
        let back = pairons_to_zeros(&p, 1.0);
        let roots: Vec<f64> = back.points().iter().map(|z| z.finite().unwrap().re).collect();
        assert!((roots[0].abs() - 1.55377397403).abs() < 1e-10);
        assert!((roots[0] + roots[1]).abs() < 1e-15);
    }

    #[test]
    fn poles_and_seniority() {
        let p = PaironSet::new(2, 0, vec![c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let z = pairons_to_zeros(&p, 1.0);
        assert_eq!(z.multiplicity_at_infinity(), 2);
        assert_eq!(z.multiplicity_at_origin(), 2);
        assert_eq!(zeros_to_pairons(&z, 1.0).unwrap(), p);

        let p = PaironSet::new(1, 1, vec![]).unwrap();
        let z = pairons_to_zeros(&p, 1.0);
        assert_eq!(z.total_multiplicity(), 2);
        assert_eq!(zeros_to_pairons(&z, 1.0).unwrap().seniority(), 1);
    }

    #[test]
    fn unpaired_zero_is_reported() {
        let z = ZeroSet::new(
            1,
            vec![
                Zero::new(SpherePoint::new(1.0, 0.0), 1),
                Zero::new(SpherePoint::new(-0.5, 0.0), 1),
            ],
        );
        assert!(matches!(
            zeros_to_pairons(&z, 1.0),
            Err(Error::UnpairedZero { .. })
        ));
        let z = ZeroSet::new(
            1,
            vec![
                Zero::new(SpherePoint::ORIGIN, 1),
                Zero::new(SpherePoint::new(2.0, 0.0), 1),
            ],
        );
        assert!(matches!(
            zeros_to_pairons(&z, 1.0),
            Err(Error::UnpairedZero { .. })
        ));
    }

    #[test]
    fn bad_sets_rejected() {
        assert!(PaironSet::new(2, 1, vec![c(0.0, 0.0); 2]).is_err());
        assert!(PaironSet::new(2, 2, vec![]).is_err());
        assert!(PaironSet::new(1, 0, vec![c(f64::NAN, 0.0)]).is_err());
    }

    fn pairon() -> impl Strategy<Value = Complex64> {
        (-5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn roundtrip_through_zeros(
            t in 0.1f64..4.0,
            nu in 0u8..2,
            es in proptest::collection::vec(pairon(), 1..12),
        ) {
            prop_assume!(es.iter().all(|e| (e - t).norm() > 1e-3 && (e + t).norm() > 1e-3));
            // pairing needs the ± partners to be unambiguous
            let zs: Vec<SpherePoint> = es.iter().map(|e| pairon_to_zeta_sq(*e, t)).collect();
            for (a, x) in zs.iter().enumerate() {
                for y in &zs[a + 1..] {
                    prop_assume!(x.chordal(y) > 1e-5);
                }
                prop_assume!(x.chordal(&SpherePoint::new(-1.0, 0.0)) > 1e-3);
            }
            let j = es.len() as u32 + nu as u32;
            let p = PaironSet::new(j, nu, es).unwrap();
            let z = pairons_to_zeros(&p, t);
            prop_assert_eq!(z.total_multiplicity(), 2 * j as usize);
            let back = zeros_to_pairons(&z, t).unwrap();
            prop_assert!(back.distance(&p) <= 1e-9 * (1.0 + t));
            prop_assert!(correspondence_defect(&z, &back, t).unwrap() <= 1e-12);
        }
    }
}
