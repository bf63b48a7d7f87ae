use nalgebra::SymmetricEigen;
use twofloat::TwoFloat;

use super::hamiltonian::{split_parity, HamiltonianMatrix, ParitySector};
use super::polish::{polish, Tridiagonal};
use super::{Parity, StateVector};
use crate::{Error, Result};

/// Relative gap (in units of `‖H‖`) below which two levels of the same parity
/// sector are treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

const RESIDUAL_LIMIT: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub energy: f64,
    pub state: StateVector,
    /// A same-parity neighbour lies within `DEGENERACY_THRESHOLD·‖H‖`.
    /// The eigenvector (and therefore its zeros) is not well defined.
    pub degenerate: bool,
    /// A level of the other parity lies within the threshold. Informational:
    /// the sector-resolved eigenvector is still unique.
    pub sector_crossing: bool,
    /// `‖Hv - Ev‖ / ‖H‖`.
    pub residual: f64,
    /// Double-double eigenvector in the full Dicke basis, when refined.
    pub(crate) extended: Option<Vec<TwoFloat>>,
}

impl Eigenpair {
    pub fn parity(&self) -> Parity {
        self.state.parity()
    }
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub pairs: Vec<Eigenpair>,
    /// Max row sum of `H`.
    pub norm: f64,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.energy).collect()
    }

    pub fn get(&self, index: usize) -> Result<&Eigenpair> {
        self.pairs.get(index).ok_or(Error::StateIndex {
            index,
            dim: self.pairs.len(),
        })
    }

    /// Like [`Spectrum::get`] but refuses degenerate states.
    pub fn nondegenerate(&self, index: usize) -> Result<&Eigenpair> {
        let pair = self.get(index)?;
        if pair.degenerate {
            return Err(Error::Degenerate {
                index,
                gap: self.sector_gap(index),
            });
        }
        Ok(pair)
    }

    /// Distance to the nearest level of the same parity.
    pub fn sector_gap(&self, index: usize) -> f64 {
        let me = &self.pairs[index];
        self.pairs
            .iter()
            .enumerate()
            .filter(|(i, p)| *i != index && p.parity() == me.parity())
            .map(|(_, p)| (p.energy - me.energy).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Diagonalizes each parity sector, refines the eigenvectors in double-double
/// and returns all eigenpairs sorted by ascending energy. Eigenvectors are
/// real with their largest component positive.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<Spectrum> {
    let norm = h.norm();
    let blocks = split_parity(h);
    let dim = h.dim();
    let j = h.j();
    let mut pairs = Vec::with_capacity(dim);
    for sector in [&blocks.even, &blocks.odd] {
        for (energy, local, local_dd) in solve_sector(h, sector, norm)? {
            let mut full = vec![0.0; dim];
            for (i, &row) in sector.indices.iter().enumerate() {
                full[row] = local[i];
            }
            let extended = local_dd.map(|v| {
                let mut full = vec![TwoFloat::from(0.0); dim];
                for (i, &row) in sector.indices.iter().enumerate() {
                    full[row] = v[i];
                }
                full
            });
            let state = StateVector::from_real(j, &full)?;
            let residual = full_residual(h, &state, energy) / norm.max(f64::MIN_POSITIVE);
            if residual > RESIDUAL_LIMIT {
                return Err(Error::Convergence {
                    sector: sector.parity.to_string(),
                    residual,
                });
            }
            pairs.push(Eigenpair {
                energy,
                state,
                degenerate: false,
                sector_crossing: false,
                residual,
                extended,
            });
        }
    }
    pairs.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.parity().cmp(&b.parity())));
    let tol = DEGENERACY_THRESHOLD * norm;
    let flags: Vec<(bool, bool)> = pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let close = |same: bool| {
                pairs.iter().enumerate().any(|(k, q)| {
                    k != i && (q.parity() == p.parity()) == same && (q.energy - p.energy).abs() < tol
                })
            };
            (close(true), close(false))
        })
        .collect();
    for (p, (deg, cross)) in pairs.iter_mut().zip(flags) {
        p.degenerate = deg;
        p.sector_crossing = cross;
    }
    Ok(Spectrum { pairs, norm })
}

type SectorPair = (f64, Vec<f64>, Option<Vec<TwoFloat>>);

fn solve_sector(h: &HamiltonianMatrix, sector: &ParitySector, norm: f64) -> Result<Vec<SectorPair>> {
    let n = sector.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let coupled = (0..n.saturating_sub(1)).any(|i| sector.block[(i + 1, i)] != 0.0);
    if !coupled {
        // already diagonal: keep the matrix elements bit for bit
        return Ok((0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                (sector.block[(i, i)], v, None)
            })
            .collect());
    }
    let eig = SymmetricEigen::try_new(sector.block.clone(), f64::EPSILON, 100_000).ok_or_else(|| {
        Error::Convergence {
            sector: sector.parity.to_string(),
            residual: f64::NAN,
        }
    })?;
    let tri = Tridiagonal::lmg_sector(h.params(), sector.parity);
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        let mut value = eig.eigenvalues[c];
        let mut vector: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
        let p = polish(&tri, value, &vector, norm);
        let mut extended = None;
        if p.residual <= RESIDUAL_LIMIT {
            value = p.value;
            vector = p.vector;
            extended = Some(p.extended);
        }
        let lead = vector
            .iter()
            .copied()
            .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if lead < 0.0 {
            vector.iter_mut().for_each(|v| *v = -*v);
            if let Some(x) = extended.as_mut() {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        out.push((value, vector, extended));
    }
    Ok(out)
}

fn full_residual(h: &HamiltonianMatrix, state: &StateVector, energy: f64) -> f64 {
    let hv = h.apply(state.coeffs());
    hv.iter()
        .zip(state.coeffs())
        .map(|(a, b)| (a - b * energy).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{build_hamiltonian, ModelParams};
    use proptest::prelude::*;

    #[test]
    fn diagonal_case() {
        let s = diagonalize(&build_hamiltonian(&ModelParams::new(1, 1.0, 0.0, 0.0).unwrap())).unwrap();
        assert_eq!(s.energies(), vec![-1.0, 0.0, 1.0]);
        for (i, p) in s.pairs.iter().enumerate() {
            assert_eq!(p.state.coeffs()[i].re, 1.0);
        }
    }

    #[test]
    fn two_level_closed_form() {
        let s = diagonalize(&build_hamiltonian(&ModelParams::new(1, 1.0, 1.0, 0.0).unwrap())).unwrap();
        let s2 = 2f64.sqrt();
        assert!((s.pairs[0].energy + s2).abs() < 1e-14);
        assert!((s.pairs[2].energy - s2).abs() < 1e-14);
        let c = s.pairs[0].state.coeffs();
        assert!((c[2].re / c[0].re - (1.0 - s2)).abs() < 1e-15);
        assert_eq!(c[1].re, 0.0);
        assert_eq!(s.pairs[0].parity(), Parity::Even);
        assert_eq!(s.pairs[1].parity(), Parity::Odd);
    }

    #[test]
    fn lowest_weight_ground_state_on_diagonal() {
        let p = ModelParams::from_control(10, 5.0, 5.0, 1.0).unwrap();
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let g = &s.pairs[0];
        assert_eq!(g.state.coeffs()[0].re, 1.0);
        assert!(g.state.coeffs()[1..].iter().all(|c| c.norm() == 0.0));
        assert!((g.energy - (-10.0 + 50.0 / 19.0)).abs() < 1e-12);
    }

    #[test]
    fn crossing_is_not_degeneracy() {
        // γx = γy = -1 at j = 1: E(m=-1) = E(m=0) = -2 in different sectors
        let p = ModelParams::from_control(1, -1.0, -1.0, 1.0).unwrap();
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        assert_eq!(s.energies(), vec![-2.0, -2.0, 0.0]);
        assert!(s.pairs[0].sector_crossing && !s.pairs[0].degenerate);
        assert!(s.nondegenerate(0).is_ok());
        assert!(matches!(s.get(3), Err(Error::StateIndex { .. })));
    }

    #[test]
    fn same_sector_degeneracy_is_flagged() {
        // λ = 0, ε = 1, γ = 1/2, j = 2: E(m) = m + (6 - m²)/2, so E(0) = E(2) = 3,
        // both in the even sector.
        let p = ModelParams::new(2, 1.0, 0.0, 0.5).unwrap();
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let idx: Vec<usize> = (0..5)
            .filter(|&i| (s.pairs[i].energy - 3.0).abs() < 1e-12)
            .collect();
        assert_eq!(idx.len(), 2);
        for i in idx {
            assert!(s.pairs[i].degenerate);
            assert!(matches!(s.nondegenerate(i), Err(Error::Degenerate { .. })));
        }
    }

    fn params() -> impl Strategy<Value = ModelParams> {
        (1u32..14, -20.0f64..20.0, -20.0f64..20.0)
            .prop_map(|(j, gx, gy)| ModelParams::from_control(j, gx, gy, 1.0).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn residuals_orthonormality_and_sorting(p in params()) {
            let h = build_hamiltonian(&p);
            let s = diagonalize(&h).unwrap();
            prop_assert_eq!(s.pairs.len(), h.dim());
            for w in s.pairs.windows(2) {
                prop_assert!(w[0].energy <= w[1].energy);
            }
            for (a, pa) in s.pairs.iter().enumerate() {
                prop_assert!(pa.residual <= 1e-10);
                prop_assert!(pa.state.is_real());
                prop_assert!(pa.parity() != Parity::Mixed);
                for pb in s.pairs.iter().skip(a + 1) {
                    if !pa.degenerate {
                        prop_assert!(pa.state.fidelity(&pb.state) < 1e-8);
                    }
                }
            }
        }

        #[test]
        fn spectrum_invariant_under_lambda_flip(p in params()) {
            let q = ModelParams::new(p.j(), p.epsilon(), -p.lambda(), p.gamma()).unwrap();
            let a = diagonalize(&build_hamiltonian(&p)).unwrap();
            let b = diagonalize(&build_hamiltonian(&q)).unwrap();
            for (x, y) in a.pairs.iter().zip(&b.pairs) {
                prop_assert!((x.energy - y.energy).abs() <= 1e-10 * a.norm.max(1.0));
            }
        }

        #[test]
        fn lambda_zero_spectrum_is_diagonal(j in 1u32..12, gamma in -3.0f64..3.0) {
            let p = ModelParams::new(j, 1.0, 0.0, gamma).unwrap();
            let s = diagonalize(&build_hamiltonian(&p)).unwrap();
            let ji = j as i64;
            let mut want: Vec<f64> = (-ji..=ji)
                .map(|m| m as f64 + gamma * ((ji * (ji + 1) - m * m) as f64))
                .collect();
            want.sort_by(f64::total_cmp);
            prop_assert_eq!(s.energies(), want);
        }
    }
}
