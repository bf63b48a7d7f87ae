use crate::spin::{build_hamiltonian, diagonalize, ModelParams, Parity};
use crate::{Error, Result};

/// `h_k = ((2j-1)/(2j-1-2k))²`, `k = 0..j-1`: the hyperbolas `γx γy = h_k`.
pub fn hyperbola_levels(j: u32) -> Vec<f64> {
    let n = (2 * j - 1) as f64;
    (0..j).map(|k| (n / (n - 2.0 * k as f64)).powi(2)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Branch {
    Minus,
    Plus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Minus => -1.0,
            Branch::Plus => 1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Branch::Minus => '-',
            Branch::Plus => '+',
        }
    }
}

/// Intersection of the line `γx + γy = c` with the hyperbola `γx γy = h_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CollapsePoint {
    pub k: usize,
    pub branch: Branch,
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub level: f64,
}

impl CollapsePoint {
    /// Predicted multiplicities with `±ζ` pairs counted together:
    /// one zero of multiplicity `2(k+1)` and `j-k-1` of multiplicity 2.
    pub fn pattern(&self, j: u32) -> Vec<usize> {
        let mut p = vec![2 * (self.k + 1)];
        p.extend(std::iter::repeat_n(2, j as usize - self.k - 1));
        p
    }

    /// The same coincidence seen on the pairons.
    pub fn pairon_pattern(&self, j: u32) -> Vec<usize> {
        self.pattern(j).into_iter().map(|m| m / 2).collect()
    }
}

/// `γx = c/2 ± sqrt(c²/4 - h_k)` for every `k` with a real root, ordered by
/// `γx`.
pub fn collapse_points(j: u32, c: f64) -> Result<Vec<CollapsePoint>> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "line constant must be positive, got {c}"
        )));
    }
    if j < 1 {
        return Err(Error::InvalidParameter("j must be >= 1".into()));
    }
    let mut out = Vec::new();
    for (k, h) in hyperbola_levels(j).into_iter().enumerate() {
        let rad = 0.25 * c * c - h;
        if rad < 0.0 {
            continue;
        }
        let r = rad.sqrt();
        for branch in [Branch::Minus, Branch::Plus] {
            let gx = 0.5 * c + branch.sign() * r;
            out.push(CollapsePoint {
                k,
                branch,
                gamma_x: gx,
                gamma_y: c - gx,
                level: h,
            });
        }
    }
    out.sort_by(|a, b| a.gamma_x.total_cmp(&b.gamma_x));
    Ok(out)
}

/// Point on the diagonal `γx = γy` where an even and an odd level cross.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub k: usize,
    pub gamma_x: f64,
    /// The lowest crossing Dicke pair, `m + m' = -(2j-1-2k)`.
    pub m_pair: (i32, i32),
}

/// `γx = -(2j-1)/(2j-1-2k)`, `k = 0..j-1`.
pub fn crossing_points(j: u32) -> Vec<Crossing> {
    let n = (2 * j - 1) as f64;
    (0..j as usize)
        .map(|k| {
            let s = -(2 * j as i32 - 1 - 2 * k as i32);
            Crossing {
                k,
                gamma_x: -n / (n - 2.0 * k as f64),
                m_pair: ((s - 1) / 2, (s + 1) / 2),
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossingCheck {
    pub energy: f64,
    /// Smallest even/odd eigenvalue distance.
    pub gap: f64,
    pub norm: f64,
    /// `E(m) - E(m')` for the predicted pair, from the diagonal formula.
    pub pair_gap: f64,
    pub verified: bool,
}

/// Diagonalizes at the crossing and checks that the even and odd sectors
/// share an eigenvalue within `1e-10‖H‖`.
pub fn verify_crossing(j: u32, c: &Crossing, epsilon: f64) -> Result<CrossingCheck> {
    let params = ModelParams::from_control(j, c.gamma_x, c.gamma_x, epsilon)?;
    let spectrum = diagonalize(&build_hamiltonian(&params))?;
    let mut best = (f64::INFINITY, 0.0);
    for a in spectrum.pairs.iter().filter(|p| p.parity() == Parity::Even) {
        for b in spectrum.pairs.iter().filter(|p| p.parity() == Parity::Odd) {
            let d = (a.energy - b.energy).abs();
            if d < best.0 {
                best = (d, 0.5 * (a.energy + b.energy));
            }
        }
    }
    let diag = |m: i32| {
        let (m, jj) = (m as f64, j as f64);
        epsilon * m + params.gamma() * (jj * (jj + 1.0) - m * m)
    };
    let pair_gap = (diag(c.m_pair.0) - diag(c.m_pair.1)).abs();
    Ok(CrossingCheck {
        energy: best.1,
        gap: best.0,
        norm: spectrum.norm,
        pair_gap,
        verified: best.0 <= 1e-10 * spectrum.norm,
    })
}
