use num_complex::Complex64;

use super::SpherePoint;

/// Clustering radius (chordal) for generic parameter points.
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-6;

/// Radius able to gather the numerical images of an `m`-fold root: a
/// perturbation `δ` of the coefficients splits it by about `δ^{1/m}`.
pub fn multiplicity_radius(m: usize) -> f64 {
    (10.0 * 1e-12f64.powf(1.0 / m.max(1) as f64)).max(DEFAULT_CLUSTER_RADIUS)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub point: SpherePoint,
    pub multiplicity: usize,
}

impl Zero {
    pub fn new(point: SpherePoint, multiplicity: usize) -> Self {
        Self { point, multiplicity }
    }
}

/// Zeros of a Husimi amplitude with multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroSet {
    j: u32,
    zeros: Vec<Zero>,
    max_residual: f64,
}

impl ZeroSet {
    pub fn new(j: u32, zeros: Vec<Zero>) -> Self {
        Self {
            j,
            zeros,
            max_residual: 0.0,
        }
    }

    pub(crate) fn with_residual(mut self, r: f64) -> Self {
        self.max_residual = r;
        self
    }

    pub fn j(&self) -> u32 {
        self.j
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    /// Largest relative polynomial residual of the computed roots.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn multiplicity_at_infinity(&self) -> usize {
        self.zeros
            .iter()
            .filter(|z| z.point.is_infinity())
            .map(|z| z.multiplicity)
            .sum()
    }

    pub fn multiplicity_at_origin(&self) -> usize {
        self.zeros
            .iter()
            .filter(|z| z.point.is_origin())
            .map(|z| z.multiplicity)
            .sum()
    }

    /// Each zero repeated by its multiplicity.
    pub fn points(&self) -> Vec<SpherePoint> {
        self.zeros
            .iter()
            .flat_map(|z| std::iter::repeat_n(z.point, z.multiplicity))
            .collect()
    }

    /// Multiplicities in decreasing order.
    pub fn pattern(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.zeros.iter().map(|z| z.multiplicity).collect();
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }

    pub fn map(&self, f: impl Fn(&SpherePoint) -> SpherePoint) -> ZeroSet {
        ZeroSet {
            j: self.j,
            zeros: self
                .zeros
                .iter()
                .map(|z| Zero::new(f(&z.point), z.multiplicity))
                .collect(),
            max_residual: self.max_residual,
        }
    }

    /// Hausdorff distance (chordal) between the two point sets.
    pub fn hausdorff(&self, other: &ZeroSet) -> f64 {
        let one_way = |a: &ZeroSet, b: &ZeroSet| {
            a.zeros
                .iter()
                .map(|x| {
                    b.zeros
                        .iter()
                        .map(|y| x.point.chordal(&y.point))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        one_way(self, other).max(one_way(other, self))
    }
}

/// Single-linkage clustering of the zeros in the chordal metric. Each
/// cluster is reported at its multiplicity-weighted mean, computed in the
/// `ζ` chart or, for clusters in the southern hemisphere, in `w = 1/ζ`.
pub fn cluster_zeros(raw: &ZeroSet, radius: f64) -> ZeroSet {
    let zs = &raw.zeros;
    let n = zs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for a in 0..n {
        for b in a + 1..n {
            if zs[a].point.chordal(&zs[b].point) <= radius {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    let mut zeros: Vec<Zero> = groups.iter().map(|g| merge(g.iter().map(|&i| &zs[i]))).collect();
    zeros.sort_by(|a, b| {
        a.point
            .theta()
            .total_cmp(&b.point.theta())
            .then(a.point.phi().total_cmp(&b.point.phi()))
    });
    ZeroSet {
        j: raw.j,
        zeros,
        max_residual: raw.max_residual,
    }
}

fn merge<'a>(members: impl Iterator<Item = &'a Zero> + Clone) -> Zero {
    let total: usize = members.clone().map(|z| z.multiplicity).sum();
    let single: Vec<&Zero> = members.clone().take(2).collect();
    if single.len() == 1 {
        return *single[0];
    }
    let south = members.clone().any(|z| z.point.is_infinity()) || {
        let zsum: f64 = members
            .clone()
            .map(|z| z.point.to_unit()[2] * z.multiplicity as f64)
            .sum();
        zsum < 0.0
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for z in members {
        let v = match z.point {
            SpherePoint::Infinity => Complex64::new(0.0, 0.0),
            SpherePoint::Finite(c) if south => 1.0 / c,
            SpherePoint::Finite(c) => c,
        };
        acc += v * z.multiplicity as f64;
    }
    let mean = acc / total as f64;
    let point = if !south {
        SpherePoint::Finite(mean)
    } else if mean.norm() == 0.0 {
        SpherePoint::Infinity
    } else {
        SpherePoint::Finite(1.0 / mean)
    };
    Zero::new(point, total)
}
