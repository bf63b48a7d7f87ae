use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::{cancellation_ratio, BosonModel, BosonSpectrum, BosonState, FockBasis};
use crate::math::ln_factorials;
use crate::phase::aberth;
use crate::{Error, Result};

/// Largest cancellation ratio accepted on an ellipsoid.
pub const ELLIPSOID_TOLERANCE: f64 = 1e-9;

/// `M` pairing energies and the per-level seniorities of the unpaired bosons.
#[derive(Clone, Debug, PartialEq)]
pub struct BosonPaironSet {
    pub seniorities: Vec<u8>,
    pub pairons: Vec<Complex64>,
}

impl BosonPaironSet {
    pub fn new(seniorities: Vec<u8>, pairons: Vec<Complex64>) -> Result<Self> {
        if seniorities.iter().any(|&v| v > 1) {
            return Err(Error::InvalidParameter("seniorities must be 0 or 1".into()));
        }
        if pairons.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite pairon".into()));
        }
        Ok(Self { seniorities, pairons })
    }

    pub fn seniority(&self) -> usize {
        self.seniorities.iter().map(|&v| v as usize).sum()
    }

    /// `ξ_{ℓ,α}² = (2ε_ℓ - ē_α)/(ē_α - 2ε_0)` for `ℓ = 1..L`, one row per pairon.
    pub fn semi_axes_sq(&self, model: &BosonModel) -> Vec<Vec<Complex64>> {
        let eps = model.levels();
        self.pairons
            .iter()
            .map(|e| {
                let eb = e.conj();
                eps[1..]
                    .iter()
                    .map(|el| (2.0 * el - eb) / (eb - 2.0 * eps[0]))
                    .collect()
            })
            .collect()
    }

    /// `max |Σ Im e|`-style check of closure under conjugation.
    pub fn conjugation_defect(&self) -> f64 {
        self.pairons
            .iter()
            .map(|e| {
                self.pairons
                    .iter()
                    .map(|f| (f - e.conj()).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Greedy matching distance between two pairon multisets.
    pub fn multiset_distance(&self, other: &BosonPaironSet) -> f64 {
        if self.pairons.len() != other.pairons.len() {
            return f64::INFINITY;
        }
        let n = self.pairons.len();
        let mut cand: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
        for (a, x) in self.pairons.iter().enumerate() {
            for (b, y) in other.pairons.iter().enumerate() {
                cand.push(((x - y).norm(), a, b));
            }
        }
        cand.sort_by(|p, q| p.0.total_cmp(&q.0));
        let (mut ua, mut ub) = (vec![false; n], vec![false; n]);
        let mut worst: f64 = 0.0;
        for (d, a, b) in cand {
            if !ua[a] && !ub[b] {
                ua[a] = true;
                ub[b] = true;
                worst = worst.max(d);
            }
        }
        worst
    }
}

fn check_shape(p: &BosonPaironSet, model: &BosonModel) -> Result<()> {
    if p.seniorities.len() != model.levels().len() {
        return Err(Error::InvalidParameter(format!(
            "{} seniorities for {} levels",
            p.seniorities.len(),
            model.levels().len()
        )));
    }
    if 2 * p.pairons.len() + p.seniority() != model.particles() {
        return Err(Error::InvalidParameter(format!(
            "2M + ν = {} but N = {}",
            2 * p.pairons.len() + p.seniority(),
            model.particles()
        )));
    }
    Ok(())
}

/// Expands `∏_α (Σ_ℓ b_ℓ†²/(2ε_ℓ - e_α)) |ν⟩`. Each factor is multiplied by
/// `∏_k (2ε_k - e_α)` first, which removes the poles: `e_α = 2ε_ℓ` puts the
/// pair in level `ℓ`.
pub fn reconstruct_boson_state(p: &BosonPaironSet, model: &BosonModel) -> Result<BosonState> {
    check_shape(p, model)?;
    let eps = model.levels();
    let nl = eps.len();
    let mut sigma: BTreeMap<Vec<usize>, Complex64> =
        BTreeMap::from([(vec![0; nl], Complex64::new(1.0, 0.0))]);
    for e in &p.pairons {
        let w: Vec<Complex64> = (0..nl)
            .map(|l| (0..nl).filter(|&k| k != l).map(|k| 2.0 * eps[k] - e).product())
            .collect();
        let mut next: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        for (pairs, v) in &sigma {
            for (l, wl) in w.iter().enumerate() {
                let mut q = pairs.clone();
                q[l] += 1;
                *next.entry(q).or_default() += v * wl;
            }
        }
        let scale = next.values().map(|c| c.norm()).fold(0.0, f64::max);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Singular("pairon product vanishes".into()));
        }
        sigma = next.into_iter().map(|(k, c)| (k, c / scale)).collect();
    }
    let basis = Arc::new(model.basis());
    let lf = ln_factorials(model.particles());
    let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
    for (pairs, v) in sigma {
        let occ: Vec<usize> = pairs
            .iter()
            .zip(&p.seniorities)
            .map(|(q, nu)| 2 * q + *nu as usize)
            .collect();
        let i = basis.index_of(&occ).expect("occupations sum to N");
        coeffs[i] = v * (0.5 * occ.iter().map(|n| lf[*n]).sum::<f64>()).exp();
    }
    BosonState::new(basis, coeffs)
}

/// Coefficients in `x = ζ_s²` of the amplitude restricted to the `ζ_s` axis,
/// with the seniority factor `∏ ζ_ℓ^{ν_ℓ}` divided out.
fn slice_polynomial(
    state: &BosonState,
    basis: &FockBasis,
    nu: &[u8],
    slice: usize,
    m: usize,
) -> Vec<Complex64> {
    let n = basis.particles();
    let lf = ln_factorials(n);
    (0..=m)
        .map(|p| {
            let mut occ: Vec<usize> = nu.iter().map(|&v| v as usize).collect();
            occ[slice] += 2 * p;
            occ[0] = n - occ[1..].iter().sum::<usize>();
            let w = (0.5 * (lf[n] - occ.iter().map(|k| lf[*k]).sum::<f64>())).exp();
            state.coeff(&occ).conj() * w
        })
        .collect()
}

/// The axis on which eigenstate `index` has the largest slice polynomial.
/// A slice sees only the basis states with the other levels at their
/// seniorities, so at weak coupling the other axes can carry pure noise.
pub fn best_slice(model: &BosonModel, spectrum: &BosonSpectrum, index: usize) -> Result<usize> {
    let pair = spectrum.get(index)?;
    let nu = &pair.seniorities;
    let m = (model.particles() - nu.iter().map(|&v| v as usize).sum::<usize>()) / 2;
    let weight = |s: usize| -> f64 {
        slice_polynomial(&pair.state, &spectrum.basis, nu, s, m)
            .iter()
            .map(|c| c.norm_sqr())
            .sum()
    };
    Ok((1..=model.l())
        .map(|s| (weight(s), s))
        .fold((f64::NEG_INFINITY, 1), |a, b| if b.0 > a.0 { b } else { a })
        .1)
}

/// Pairons of eigenstate `index` from the roots `x = ξ²` of its amplitude
/// along the `ζ_slice` axis: `ē = 2(ε_s + ε_0 x)/(1 + x)`.
pub fn extract_boson_pairons(
    model: &BosonModel,
    spectrum: &BosonSpectrum,
    index: usize,
    slice: usize,
) -> Result<BosonPaironSet> {
    if slice < 1 || slice > model.l() {
        return Err(Error::InvalidParameter(format!(
            "slice must be in 1..={}, got {slice}",
            model.l()
        )));
    }
    if !model.has_distinct_levels() {
        return Err(Error::InvalidParameter(
            "pairon inversion needs pairwise distinct levels".into(),
        ));
    }
    let pair = spectrum.nondegenerate(index)?;
    let nu = pair.seniorities.clone();
    let m = (model.particles() - nu.iter().map(|&v| v as usize).sum::<usize>()) / 2;
    if m == 0 {
        return BosonPaironSet::new(nu, Vec::new());
    }
    let a = slice_polynomial(&pair.state, &spectrum.basis, &nu, slice, m);
    let zero = Complex64::new(0.0, 0.0);
    if a[m] == zero || a[0] == zero {
        return Err(Error::Singular("a pairon sits on a level pole 2ε".into()));
    }
    let xs = aberth(&a, 2000).map_err(|(iterations, _)| Error::Convergence {
        sector: format!("slice {slice} polynomial after {iterations} iterations"),
        residual: f64::NAN,
    })?;
    let eps = model.levels();
    let mut es = Vec::with_capacity(m);
    for x in xs {
        if (1.0 + x).norm() <= 1e-12 * x.norm().max(1.0) {
            return Err(Error::Singular(
                "slice root at ξ² = -1 (pairon at infinity)".into(),
            ));
        }
        es.push((2.0 * (eps[slice] + eps[0] * x) / (1.0 + x)).conj());
    }
    es.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    BosonPaironSet::new(nu, es)
}

/// `E = Σ_ℓ ε_ℓ ν_ℓ + Σ_α e_α`; the imaginary parts must cancel.
pub fn boson_energy(p: &BosonPaironSet, model: &BosonModel) -> Result<f64> {
    check_shape(p, model)?;
    let sum: Complex64 = p.pairons.iter().sum();
    if sum.im.abs() > 1e-8 {
        return Err(Error::Inconsistent(format!(
            "pairon imaginary parts sum to {:.3e}",
            sum.im
        )));
    }
    let free: f64 = model
        .levels()
        .iter()
        .zip(&p.seniorities)
        .map(|(e, &v)| e * v as f64)
        .sum();
    Ok(free + sum.re)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidReport {
    pub samples: usize,
    /// Largest cancellation ratio found on each pairon's quadric.
    pub per_quadric: Vec<f64>,
    pub max: f64,
    pub passed: bool,
}

/// Samples `ζ_ℓ = ξ_{ℓ,α} u_ℓ` with `Σ u_ℓ² = 1` on every quadric
/// `Σ ζ_ℓ²/ξ_{ℓ,α}² = 1` and evaluates the amplitude there.
pub fn verify_ellipsoid<R: Rng + ?Sized>(
    p: &BosonPaironSet,
    state: &BosonState,
    model: &BosonModel,
    samples: usize,
    rng: &mut R,
) -> Result<EllipsoidReport> {
    if model.l() < 2 {
        return Err(Error::InvalidParameter("ellipsoids need L >= 2".into()));
    }
    check_shape(p, model)?;
    let mut per_quadric = Vec::with_capacity(p.pairons.len());
    for axes in p.semi_axes_sq(model) {
        let xi: Vec<Complex64> = axes.iter().map(|x| x.sqrt()).collect();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let u = loop {
                let v: Vec<Complex64> = (0..xi.len())
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let s = v.iter().map(|x| x * x).sum::<Complex64>().sqrt();
                if s.norm() > 1e-3 {
                    break v.into_iter().map(|x| x / s).collect::<Vec<_>>();
                }
            };
            let zeta: Vec<Complex64> = xi.iter().zip(&u).map(|(a, b)| a * b).collect();
            worst = worst.max(cancellation_ratio(state, &zeta)?);
        }
        per_quadric.push(worst);
    }
    let max = per_quadric.iter().copied().fold(0.0, f64::max);
    Ok(EllipsoidReport {
        samples,
        per_quadric,
        max,
        passed: max <= ELLIPSOID_TOLERANCE,
    })
}
