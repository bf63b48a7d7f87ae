use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ModelParams, Parity};

/// Dense LMG Hamiltonian in the Dicke basis `m = -j..=j` (row/column `j + m`).
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianMatrix {
    params: ModelParams,
    matrix: DMatrix<f64>,
}

/// `⟨j,m|H|j,m⟩ = εm + γ(j(j+1) - m²)` and
/// `⟨j,m+2|H|j,m⟩ = (λ/2) sqrt((j-m)(j+m+1)(j-m-1)(j+m+2))`.
pub fn build_hamiltonian(params: &ModelParams) -> HamiltonianMatrix {
    let j = params.j() as i64;
    let dim = params.dim();
    let jj = (j * (j + 1)) as f64;
    let mut matrix = DMatrix::zeros(dim, dim);
    for row in 0..dim {
        let m = row as i64 - j;
        matrix[(row, row)] = params.epsilon() * m as f64 + params.gamma() * (jj - (m * m) as f64);
        if row + 2 < dim {
            let ladder = ((j - m) * (j + m + 1) * (j - m - 1) * (j + m + 2)) as f64;
            let v = 0.5 * params.lambda() * ladder.sqrt();
            matrix[(row + 2, row)] = v;
            matrix[(row, row + 2)] = v;
        }
    }
    HamiltonianMatrix {
        params: *params,
        matrix,
    }
}

impl HamiltonianMatrix {
    pub fn j(&self) -> u32 {
        self.params.j()
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Max absolute row sum.
    pub fn norm(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|r| {
                let lo = r.saturating_sub(2);
                let hi = (r + 2).min(n - 1);
                (lo..=hi).map(|c| v[c] * self.matrix[(r, c)]).sum()
            })
            .collect()
    }

    /// `⟨v|H|v⟩` for a normalized `v`.
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let hv = self.apply(v);
        v.iter().zip(&hv).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// One parity sector: a tridiagonal block plus its embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct ParitySector {
    pub parity: Parity,
    pub block: DMatrix<f64>,
    /// Sector row `i` is full row `indices[i]`.
    pub indices: Vec<usize>,
}

impl ParitySector {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// Diagonal and first off-diagonal of the tridiagonal block.
    pub fn tridiagonal(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let diag = (0..n).map(|i| self.block[(i, i)]).collect();
        let off = (0..n.saturating_sub(1)).map(|i| self.block[(i + 1, i)]).collect();
        (diag, off)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParityBlocks {
    pub even: ParitySector,
    pub odd: ParitySector,
    /// Full row `r` lives at `(parity, position[r])`.
    pub position: Vec<(Parity, usize)>,
}

/// Even sector: `j + m` even; odd sector: `j + m` odd.
pub fn split_parity(h: &HamiltonianMatrix) -> ParityBlocks {
    let dim = h.dim();
    let even: Vec<usize> = (0..dim).step_by(2).collect();
    let odd: Vec<usize> = (1..dim).step_by(2).collect();
    let take = |idx: &[usize]| DMatrix::from_fn(idx.len(), idx.len(), |r, c| h.matrix[(idx[r], idx[c])]);
    let mut position = vec![(Parity::Even, 0); dim];
    for (i, &r) in even.iter().enumerate() {
        position[r] = (Parity::Even, i);
    }
    for (i, &r) in odd.iter().enumerate() {
        position[r] = (Parity::Odd, i);
    }
    ParityBlocks {
        even: ParitySector {
            parity: Parity::Even,
            block: take(&even),
            indices: even,
        },
        odd: ParitySector {
            parity: Parity::Odd,
            block: take(&odd),
            indices: odd,
        },
        position,
    }
}
