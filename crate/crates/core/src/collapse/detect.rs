use num_complex::Complex64;

use crate::pairon::{extract_with, pair_zeros, ExtractOptions, Extraction, PAIRING_TOLERANCE};
use crate::phase::{cluster_zeros, eigenpair_roots, multiplicity_radius, SpherePoint, ZeroSet};
use crate::spin::{build_hamiltonian, diagonalize, ModelParams};
use crate::{Error, Result};

use super::analytic::{Branch, CollapsePoint};
use super::scan::{ScanTable, TrajectorySpec};

/// Smallest chordal distance between zeros of different `±` pairs.
/// Zeros pinned at `0` and `∞` by the seniority are left out.
pub fn dispersion(x: &Extraction) -> f64 {
    let paired = pair_zeros(&x.raw_zeros, PAIRING_TOLERANCE).unwrap_or_else(|_| x.paired.clone());
    let zs: Vec<SpherePoint> = paired.pairs.iter().map(|p| p.0).collect();
    let mut best = f64::INFINITY;
    for (a, za) in zs.iter().enumerate() {
        for zb in &zs[a + 1..] {
            best = best.min(za.chordal(zb)).min(za.chordal(&zb.neg()));
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CandidateKind {
    /// Isolated minimum of the dispersion, refined by golden-section search.
    DispersionMinimum,
    /// Interval on which the dispersion vanishes identically.
    Plateau,
    /// A real pairon crossing `e = -1`.
    PoleCrossing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub gamma_x: f64,
    pub dispersion: f64,
    /// Sample interval the candidate was found in.
    pub bracket: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectOptions {
    /// Refined minima above this are discarded.
    pub threshold: f64,
    /// The refined minimum must drop below `depth` times the smaller of the
    /// two bracketing samples; smooth minima of the background do not.
    pub depth: f64,
    pub min_samples: usize,
    pub plateau_tolerance: f64,
    pub refine_tolerance: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            threshold: 0.05,
            depth: 0.5,
            min_samples: 50,
            plateau_tolerance: 1e-12,
            refine_tolerance: 1e-10,
        }
    }
}

fn dispersion_at(spec: &TrajectorySpec, gx: f64) -> f64 {
    spec.evaluate(gx)
        .map(|(_, x)| dispersion(&x))
        .unwrap_or(f64::INFINITY)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Dispersion minima and zero plateaus along a scanned trajectory.
pub fn detect_collapses(table: &ScanTable, opts: &DetectOptions) -> Result<Vec<Candidate>> {
    let valid: Vec<(f64, f64)> = table.valid().map(|(s, d)| (s.gamma_x, d.dispersion)).collect();
    if valid.len() < opts.min_samples {
        return Err(Error::InvalidParameter(format!(
            "{} valid samples, at least {} needed",
            valid.len(),
            opts.min_samples
        )));
    }
    let mut out = Vec::new();
    let n = valid.len();
    let mut i = 0;
    while i < n {
        if valid[i].1 <= opts.plateau_tolerance {
            let start = i;
            while i + 1 < n && valid[i + 1].1 <= opts.plateau_tolerance {
                i += 1;
            }
            let (a, b) = (valid[start].0, valid[i].0);
            out.push(Candidate {
                kind: CandidateKind::Plateau,
                gamma_x: 0.5 * (a + b),
                dispersion: 0.0,
                bracket: (a, b),
            });
        } else if i > 0
            && i + 1 < n
            && valid[i - 1].1 > valid[i].1
            && valid[i].1 <= valid[i + 1].1
            && valid[i + 1].1 > opts.plateau_tolerance
        {
            let bracket = (valid[i - 1].0, valid[i + 1].0);
            let (gx, d) = golden_section(
                |x| dispersion_at(&table.spec, x),
                bracket.0,
                bracket.1,
                opts.refine_tolerance,
            );
            let edge = valid[i - 1].1.min(valid[i + 1].1);
            if d < opts.threshold && d < opts.depth * edge {
                out.push(Candidate {
                    kind: CandidateKind::DispersionMinimum,
                    gamma_x: gx,
                    dispersion: d,
                    bracket,
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

fn is_real(e: Complex64) -> bool {
    e.im.abs() <= 1e-8 * e.norm().max(1.0)
}

/// Side of `-1` taken by the real pairon nearest to it.
fn pole_side(spec: &TrajectorySpec, gx: f64) -> Option<f64> {
    let (_, x) = spec.evaluate(gx).ok()?;
    x.pairons
        .pairons()
        .iter()
        .filter(|e| is_real(**e))
        .min_by(|a, b| (a.re + 1.0).abs().total_cmp(&(b.re + 1.0).abs()))
        .map(|e| (e.re + 1.0).signum())
}

/// Points where a tracked real pairon passes through `e = -1`, located by
/// bisection between the bracketing samples.
pub fn locate_pole_crossings(table: &ScanTable) -> Vec<Candidate> {
    let valid: Vec<_> = table.valid().collect();
    let mut out = Vec::new();
    for w in valid.windows(2) {
        let ((s0, d0), (s1, d1)) = (w[0], w[1]);
        let crosses = d0.branches.iter().enumerate().any(|(a, &label)| {
            let Some(b) = d1.branches.iter().position(|&l| l == label) else {
                return false;
            };
            let (e0, e1) = (d0.pairons()[a], d1.pairons()[b]);
            is_real(e0) && is_real(e1) && (e0.re + 1.0) * (e1.re + 1.0) < 0.0
        });
        if !crosses {
            continue;
        }
        let (mut a, mut b) = (s0.gamma_x, s1.gamma_x);
        let Some(left) = pole_side(&table.spec, a) else {
            continue;
        };
        for _ in 0..200 {
            if b - a <= 1e-13 * a.abs().max(1.0) {
                break;
            }
            let m = 0.5 * (a + b);
            match pole_side(&table.spec, m) {
                Some(s) if s == left => a = m,
                Some(_) => b = m,
                None => break,
            }
        }
        let gx = 0.5 * (a + b);
        out.push(Candidate {
            kind: CandidateKind::PoleCrossing,
            gamma_x: gx,
            dispersion: dispersion_at(&table.spec, gx),
            bracket: (s0.gamma_x, s1.gamma_x),
        });
    }
    out
}

/// Merges each cluster with its `-ζ` partner; clusters at `0` and `∞` are
/// their own partners.
pub fn fold_pattern(zeros: &ZeroSet, tol: f64) -> Vec<usize> {
    let zs = zeros.zeros();
    let mut used = vec![false; zs.len()];
    let mut out = Vec::new();
    for a in 0..zs.len() {
        if used[a] {
            continue;
        }
        used[a] = true;
        let mut m = zs[a].multiplicity;
        if !zs[a].point.is_pole() {
            let partner = (0..zs.len())
                .filter(|&b| !used[b])
                .map(|b| (zs[b].point.chordal(&zs[a].point.neg()), b))
                .filter(|(d, _)| *d <= tol)
                .min_by(|p, q| p.0.total_cmp(&q.0));
            if let Some((_, b)) = partner {
                used[b] = true;
                m += zs[b].multiplicity;
            }
        }
        out.push(m);
    }
    out.sort_by(|a, b| b.cmp(a));
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct CollapseCheck {
    pub k: usize,
    pub branch: Branch,
    pub gamma_x: f64,
    pub radius: f64,
    /// Folded multiplicities found at the point.
    pub pattern: Vec<usize>,
    pub expected: Vec<usize>,
    /// Common value of the coinciding pairons; for `k = 0` the pairon
    /// closest to `-1`.
    pub center: Complex64,
    pub matches: bool,
}

/// Extracts the ground state exactly at an analytic collapse point and
/// compares the zero multiplicities with the prediction, clustering with
/// the radius appropriate to a `(k+1)`-fold root.
pub fn verify_collapse(j: u32, point: &CollapsePoint, epsilon: f64) -> Result<CollapseCheck> {
    let params = ModelParams::from_control(j, point.gamma_x, point.gamma_y, epsilon)?;
    let spectrum = diagonalize(&build_hamiltonian(&params))?;
    let radius = multiplicity_radius(point.k + 1);
    let raw = eigenpair_roots(spectrum.nondegenerate(0)?)?;
    let clustered = cluster_zeros(&raw, radius);
    let pattern = fold_pattern(&clustered, radius);
    let opts = ExtractOptions {
        cluster_radius: radius,
        verify: false,
        ..ExtractOptions::default()
    };
    let x = extract_with(&params, &spectrum, 0, &opts)?;
    let es = x.pairons.pairons();
    let center = es
        .iter()
        .max_by(|a, b| {
            let count = |e: &Complex64| es.iter().filter(|f| (*f - e).norm() <= 1e-9).count();
            count(a)
                .cmp(&count(b))
                .then((*b + 1.0).norm().total_cmp(&(*a + 1.0).norm()))
        })
        .copied()
        .unwrap_or_default();
    let expected = point.pattern(j);
    Ok(CollapseCheck {
        k: point.k,
        branch: point.branch,
        gamma_x: point.gamma_x,
        radius,
        matches: pattern == expected,
        pattern,
        expected,
        center,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::{collapse_points, scan_trajectory, Line};
    use crate::phase::Zero;

    #[test]
    fn golden_section_finds_a_cusp() {
        let (x, _) = golden_section(|x| (x - 0.3).abs().powf(0.25), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-11);
    }

    #[test]
    fn folding() {
        let z = |a: f64, b: f64, m| Zero::new(SpherePoint::new(a, b), m);
        let zs = ZeroSet::new(
            3,
            vec![z(0.5, 0.1, 2), z(-0.5, -0.1, 2), z(2.0, 0.0, 1), z(-2.0, 0.0, 1)],
        );
        assert_eq!(fold_pattern(&zs, 1e-9), vec![4, 2]);
        let inf = ZeroSet::new(2, vec![Zero::new(SpherePoint::Infinity, 4)]);
        assert_eq!(fold_pattern(&inf, 1e-9), vec![4]);
    }

    #[test]
    fn analytic_points_show_the_predicted_pattern() {
        for p in collapse_points(10, 10.0).unwrap().iter().filter(|p| p.k <= 3) {
            let chk = verify_collapse(10, p, 1.0).unwrap();
            assert!(chk.matches, "k = {} {:?}: {:?}", p.k, p.branch, chk.pattern);
            assert!((chk.center + 1.0).norm() < 1e-3, "{}", chk.center);
        }
    }

    #[test]
    fn too_few_samples() {
        let s = TrajectorySpec::new(3, Line::Sum(10.0), 1.0, 2.0, 10).unwrap();
        let t = scan_trajectory(&s).unwrap();
        assert!(detect_collapses(&t, &DetectOptions::default()).is_err());
    }
}
