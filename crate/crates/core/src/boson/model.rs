use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{fock_basis, BosonState, FockBasis};
use crate::spin::DEGENERACY_THRESHOLD;
use crate::{Error, Result};

const MAX_L: usize = 4;
const MAX_N: usize = 20;
const RESIDUAL_LIMIT: f64 = 1e-10;

/// `H = Σ_ℓ ε_ℓ n_ℓ + (γ/4) Σ_{k,l} b_k†b_k† b_l b_l` with `N` bosons.
#[derive(Clone, Debug, PartialEq)]
pub struct BosonModel {
    levels: Vec<f64>,
    gamma: f64,
    particles: usize,
}

impl BosonModel {
    pub fn new(levels: Vec<f64>, gamma: f64, particles: usize) -> Result<Self> {
        if levels.len() < 2 || levels.len() > MAX_L + 1 {
            return Err(Error::InvalidParameter(format!(
                "need 2 to {} levels, got {}",
                MAX_L + 1,
                levels.len()
            )));
        }
        if particles > MAX_N {
            return Err(Error::InvalidParameter(format!(
                "N = {particles} exceeds {MAX_N}"
            )));
        }
        if levels.iter().any(|e| !e.is_finite()) || !gamma.is_finite() {
            return Err(Error::InvalidParameter("non-finite model parameter".into()));
        }
        if levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("levels must be ascending".into()));
        }
        Ok(Self {
            levels,
            gamma,
            particles,
        })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn l(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Pairon inversion needs `|ε_k - ε_l| > 1e-9` for all `k ≠ l`.
    pub fn has_distinct_levels(&self) -> bool {
        self.levels.windows(2).all(|w| w[1] - w[0] > 1e-9)
    }

    pub fn basis(&self) -> FockBasis {
        fock_basis(self.l(), self.particles)
    }
}

/// Dense Hamiltonian on the model's Fock basis.
pub fn build_bcs_hamiltonian(model: &BosonModel) -> (FockBasis, DMatrix<f64>) {
    let basis = model.basis();
    let dim = basis.len();
    let g = 0.25 * model.gamma;
    let mut h = DMatrix::zeros(dim, dim);
    for (i, occ) in basis.states().iter().enumerate() {
        let n = |l: usize| occ[l] as f64;
        h[(i, i)] = (0..occ.len())
            .map(|l| model.levels[l] * n(l) + g * n(l) * (n(l) - 1.0))
            .sum();
        for l in (0..occ.len()).filter(|&l| occ[l] >= 2) {
            for k in (0..occ.len()).filter(|&k| k != l) {
                let mut to = occ.clone();
                to[l] -= 2;
                to[k] += 2;
                let amp = (n(l) * (n(l) - 1.0) * (n(k) + 1.0) * (n(k) + 2.0)).sqrt();
                let f = basis.index_of(&to).expect("pair moves stay in the basis");
                h[(f, i)] += g * amp;
            }
        }
    }
    (basis, h)
}

#[derive(Clone, Debug)]
pub struct BosonEigenpair {
    pub energy: f64,
    pub seniorities: Vec<u8>,
    pub state: BosonState,
    /// Another level with the same seniorities lies within
    /// `DEGENERACY_THRESHOLD·‖H‖`.
    pub degenerate: bool,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct BosonSpectrum {
    pub basis: Arc<FockBasis>,
    pub pairs: Vec<BosonEigenpair>,
    pub norm: f64,
}

impl BosonSpectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.energy).collect()
    }

    pub fn get(&self, index: usize) -> Result<&BosonEigenpair> {
        self.pairs.get(index).ok_or(Error::StateIndex {
            index,
            dim: self.pairs.len(),
        })
    }

    pub fn nondegenerate(&self, index: usize) -> Result<&BosonEigenpair> {
        let p = self.get(index)?;
        if p.degenerate {
            return Err(Error::Degenerate {
                index,
                gap: self.block_gap(index),
            });
        }
        Ok(p)
    }

    /// Distance to the nearest level with the same seniorities.
    pub fn block_gap(&self, index: usize) -> f64 {
        let me = &self.pairs[index];
        self.pairs
            .iter()
            .enumerate()
            .filter(|(i, p)| *i != index && p.seniorities == me.seniorities)
            .map(|(_, p)| (p.energy - me.energy).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Diagonalizes each block of fixed per-level seniorities separately, so
/// every eigenvector carries exact `ν_ℓ`. Sorted by energy, then seniorities.
pub fn diagonalize_bcs(model: &BosonModel) -> Result<BosonSpectrum> {
    let (basis, h) = build_bcs_hamiltonian(model);
    let basis = Arc::new(basis);
    let norm = (0..h.nrows())
        .map(|i| h.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut blocks: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    for i in 0..basis.len() {
        blocks.entry(basis.parities(i)).or_default().push(i);
    }
    let mut pairs = Vec::with_capacity(basis.len());
    for (nu, idx) in blocks {
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |a, b| h[(idx[a], idx[b])]);
        let eig = SymmetricEigen::try_new(sub, f64::EPSILON, 100_000).ok_or_else(|| Error::Convergence {
            sector: format!("seniority {nu:?}"),
            residual: f64::NAN,
        })?;
        let mut block = Vec::with_capacity(idx.len());
        for (c, &energy) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(c);
            let big = v
                .iter()
                .copied()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            let sign = if big < 0.0 { -1.0 } else { 1.0 };
            let mut full = vec![Complex64::new(0.0, 0.0); basis.len()];
            for (a, &i) in idx.iter().enumerate() {
                full[i] = Complex64::new(sign * v[a], 0.0);
            }
            let state = BosonState::new(basis.clone(), full)?;
            let residual = residual(&h, &state, energy) / norm;
            if residual > RESIDUAL_LIMIT {
                return Err(Error::Convergence {
                    sector: format!("seniority {nu:?}"),
                    residual,
                });
            }
            block.push((energy, state, residual));
        }
        let energies: Vec<f64> = block.iter().map(|b| b.0).collect();
        for (a, (energy, state, residual)) in block.into_iter().enumerate() {
            let degenerate = energies
                .iter()
                .enumerate()
                .any(|(b, e)| b != a && (e - energy).abs() <= DEGENERACY_THRESHOLD * norm);
            pairs.push(BosonEigenpair {
                energy,
                seniorities: nu.clone(),
                state,
                degenerate,
                residual,
            });
        }
    }
    pairs.sort_by(|a, b| {
        a.energy
            .total_cmp(&b.energy)
            .then_with(|| a.seniorities.cmp(&b.seniorities))
    });
    Ok(BosonSpectrum { basis, pairs, norm })
}

fn residual(h: &DMatrix<f64>, s: &BosonState, energy: f64) -> f64 {
    let c = s.coeffs();
    (0..h.nrows())
        .map(|i| {
            let hv: Complex64 = (0..h.ncols()).map(|k| c[k] * h[(i, k)]).sum();
            (hv - c[i] * energy).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `b†b†` / `b b` acting on occupation-number dictionaries.
    fn apply_pair_term(occ: &[usize], k: usize, l: usize) -> Option<(Vec<usize>, f64)> {
        let mut to = occ.to_vec();
        let mut amp = 1.0;
        for _ in 0..2 {
            if to[l] == 0 {
                return None;
            }
            amp *= (to[l] as f64).sqrt();
            to[l] -= 1;
        }
        for _ in 0..2 {
            to[k] += 1;
            amp *= (to[k] as f64).sqrt();
        }
        Some((to, amp))
    }

    #[test]
    fn two_level_two_boson_elements() {
        let gamma = 0.7;
        let m = BosonModel::new(vec![0.0, 1.0], gamma, 2).unwrap();
        let (b, h) = build_bcs_hamiltonian(&m);
        let i = |o: &[usize]| b.index_of(o).unwrap();
        assert!((h[(i(&[2, 0]), i(&[2, 0]))] - gamma / 2.0).abs() < 1e-15);
        assert!((h[(i(&[0, 2]), i(&[2, 0]))] - gamma / 2.0).abs() < 1e-15);
        assert_eq!(h[(i(&[1, 1]), i(&[1, 1]))], 1.0);
        assert_eq!(h[(i(&[1, 1]), i(&[2, 0]))], 0.0);
        assert!((h[(i(&[0, 2]), i(&[0, 2]))] - (2.0 + gamma / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn matches_operator_action() {
        let m = BosonModel::new(vec![-0.3, 0.2, 0.9], -0.45, 7).unwrap();
        let (b, h) = build_bcs_hamiltonian(&m);
        for (i, occ) in b.states().iter().enumerate() {
            let mut col = vec![0.0; b.len()];
            for (l, n) in occ.iter().enumerate() {
                col[i] += m.levels()[l] * *n as f64;
            }
            for k in 0..3 {
                for l in 0..3 {
                    if let Some((to, amp)) = apply_pair_term(occ, k, l) {
                        col[b.index_of(&to).unwrap()] += 0.25 * m.gamma() * amp;
                    }
                }
            }
            for (f, x) in col.iter().enumerate() {
                assert!((h[(f, i)] - x).abs() < 1e-13);
            }
        }
        assert!((h.clone() - h.transpose()).amax() == 0.0);
    }

    #[test]
    fn free_bosons() {
        let m = BosonModel::new(vec![0.0, 0.5, 1.0], 0.0, 4).unwrap();
        let (b, h) = build_bcs_hamiltonian(&m);
        for (i, occ) in b.states().iter().enumerate() {
            assert_eq!(h[(i, i)], 0.5 * occ[1] as f64 + occ[2] as f64);
        }
        assert_eq!(
            h.clone() - DMatrix::from_diagonal(&h.diagonal()),
            DMatrix::zeros(b.len(), b.len())
        );
    }

    #[test]
    fn spectrum_of_the_two_by_two() {
        let m = BosonModel::new(vec![0.0, 1.0], 1.0, 2).unwrap();
        let s = diagonalize_bcs(&m).unwrap();
        // [[0.5, 0.5], [0.5, 2.5]] → 1.5 ∓ sqrt(1.25), plus the (1,1) level at 1
        let want = [1.5 - 1.25f64.sqrt(), 1.0, 1.5 + 1.25f64.sqrt()];
        for (e, w) in s.energies().iter().zip(want) {
            assert!((e - w).abs() < 1e-14);
        }
        assert_eq!(s.pairs[1].seniorities, vec![1, 1]);
    }

    #[test]
    fn eigenstates_have_definite_seniorities() {
        let m = BosonModel::new(vec![0.0, 0.5, 1.0], 0.5, 6).unwrap();
        let s = diagonalize_bcs(&m).unwrap();
        assert_eq!(s.pairs.len(), 28);
        for p in &s.pairs {
            assert!(p.residual < 1e-13);
            let nu = p.state.seniorities().unwrap();
            assert_eq!(nu, p.seniorities);
            assert_eq!(nu.iter().map(|&x| x as usize).sum::<usize>() % 2, 0);
        }
    }

    #[test]
    fn rejects_bad_models() {
        assert!(BosonModel::new(vec![0.0], 1.0, 2).is_err());
        assert!(BosonModel::new(vec![1.0, 0.0], 1.0, 2).is_err());
        assert!(BosonModel::new(vec![0.0, 1.0], 1.0, 21).is_err());
        assert!(!BosonModel::new(vec![0.0, 0.0, 1.0], 1.0, 2)
            .unwrap()
            .has_distinct_levels());
    }
}
