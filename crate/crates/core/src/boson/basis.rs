use std::collections::HashMap;

/// Occupations `(n_0, …, n_L)` with `Σ n_ℓ = N`, in descending lexicographic
/// order: `(N,0,…,0)` first.
#[derive(Clone, Debug, PartialEq)]
pub struct FockBasis {
    levels: usize,
    particles: usize,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

fn compositions(n: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        prefix.push(n);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in (0..=n).rev() {
        prefix.push(k);
        compositions(n - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Basis of `N` bosons on `L+1` levels; `C(N+L, L)` states.
pub fn fock_basis(l: usize, n: usize) -> FockBasis {
    let mut states = Vec::new();
    compositions(n, l + 1, &mut Vec::with_capacity(l + 1), &mut states);
    let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    FockBasis {
        levels: l + 1,
        particles: n,
        states,
        index,
    }
}

impl FockBasis {
    /// `L`, the number of levels above the lowest.
    pub fn l(&self) -> usize {
        self.levels - 1
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[usize] {
        &self.states[i]
    }

    pub fn index_of(&self, occ: &[usize]) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Per-level occupation parities of basis state `i`.
    pub fn parities(&self, i: usize) -> Vec<u8> {
        self.states[i].iter().map(|n| (n % 2) as u8).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::binomial;

    #[test]
    fn small_bases() {
        assert_eq!(fock_basis(1, 2).states(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(fock_basis(2, 2).len(), 6);
        assert_eq!(fock_basis(2, 6).len(), 28);
        assert_eq!(fock_basis(3, 0).states(), &[vec![0, 0, 0, 0]]);
    }

    #[test]
    fn sizes_and_order() {
        for l in 1..=4 {
            for n in 0..=12 {
                let b = fock_basis(l, n);
                assert_eq!(b.len() as f64, binomial((n + l) as u64, l as u64));
                assert!(b.states().windows(2).all(|w| w[0] > w[1]));
                assert!(b.states().iter().all(|s| s.iter().sum::<usize>() == n));
                for (i, s) in b.states().iter().enumerate() {
                    assert_eq!(b.index_of(s), Some(i));
                }
            }
        }
    }
}
