use num_complex::Complex64;
use rayon::prelude::*;

use crate::pairon::{extract_with, pairon_to_zeta_sq, ExtractOptions, Extraction};
use crate::phase::SpherePoint;
use crate::spin::{build_hamiltonian, diagonalize, ModelParams};
use crate::{Error, Result};

use super::detect::dispersion;

/// Samples closer than this to a point with `γx = 0` or `γy = 0` are skipped.
pub const SINGULAR_MARGIN: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Line {
    /// `γx + γy = c`.
    Sum(f64),
    /// `γx = γy`.
    Diagonal,
}

/// A straight path in the `(γx, γy)` plane parametrized by `γx`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySpec {
    pub j: u32,
    pub epsilon: f64,
    pub line: Line,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub state_index: usize,
    pub options: ExtractOptions,
}

impl TrajectorySpec {
    pub fn new(j: u32, line: Line, from: f64, to: f64, steps: usize) -> Result<Self> {
        let spec = TrajectorySpec {
            j,
            epsilon: 1.0,
            line,
            from,
            to,
            steps,
            state_index: 0,
            options: ExtractOptions::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.j < 1 {
            return Err(Error::InvalidParameter("j must be >= 1".into()));
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.from <= self.to) {
            return Err(Error::InvalidParameter(format!(
                "invalid range [{}, {}]",
                self.from, self.to
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be >= 1".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon != 0.0) {
            return Err(Error::InvalidParameter(
                "epsilon must be finite and nonzero".into(),
            ));
        }
        if let Line::Sum(c) = self.line {
            if !c.is_finite() {
                return Err(Error::InvalidParameter("line constant must be finite".into()));
            }
        }
        if self.state_index as u64 > 2 * self.j as u64 {
            return Err(Error::StateIndex {
                index: self.state_index,
                dim: 2 * self.j as usize + 1,
            });
        }
        Ok(())
    }

    pub fn samples(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let h = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + h * i as f64
                }
            })
            .collect()
    }

    pub fn point(&self, gamma_x: f64) -> (f64, f64) {
        match self.line {
            Line::Sum(c) => (gamma_x, c - gamma_x),
            Line::Diagonal => (gamma_x, gamma_x),
        }
    }

    /// Why `γx` cannot be sampled, if it cannot.
    pub fn singular(&self, gamma_x: f64) -> Option<String> {
        let (gx, gy) = self.point(gamma_x);
        if gy.abs() < SINGULAR_MARGIN {
            Some(format!("gamma_y = {gy:.3e} within {SINGULAR_MARGIN:e} of 0"))
        } else if gx.abs() < SINGULAR_MARGIN {
            Some(format!("gamma_x = {gx:.3e} within {SINGULAR_MARGIN:e} of 0"))
        } else {
            None
        }
    }

    pub fn params(&self, gamma_x: f64) -> Result<ModelParams> {
        let (gx, gy) = self.point(gamma_x);
        ModelParams::from_control(self.j, gx, gy, self.epsilon)
    }

    /// Runs the extraction pipeline, reconstruction check included, at one
    /// point. No branch labels.
    pub fn evaluate(&self, gamma_x: f64) -> Result<(Vec<f64>, Extraction)> {
        if let Some(why) = self.singular(gamma_x) {
            return Err(Error::Singular(why));
        }
        let params = self.params(gamma_x)?;
        let spectrum = diagonalize(&build_hamiltonian(&params))?;
        let x = extract_with(&params, &spectrum, self.state_index, &self.options)?;
        Ok((spectrum.energies(), x))
    }
}

#[derive(Clone, Debug)]
pub struct SampleData {
    pub extraction: Extraction,
    /// Branch label of each pairon, aligned with `extraction.pairons`.
    pub branches: Vec<usize>,
    /// One zero of each `±ζ` pair, chosen continuously along each branch.
    pub representatives: Vec<SpherePoint>,
    pub dispersion: f64,
}

impl SampleData {
    pub fn pairons(&self) -> &[Complex64] {
        self.extraction.pairons.pairons()
    }
}

#[derive(Clone, Debug)]
pub struct ScanSample {
    pub index: usize,
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub energies: Vec<f64>,
    /// `Err` carries the reason the sample was skipped.
    pub data: std::result::Result<SampleData, String>,
}

#[derive(Clone, Debug)]
pub struct ScanTable {
    pub spec: TrajectorySpec,
    pub samples: Vec<ScanSample>,
}

impl ScanTable {
    pub fn valid(&self) -> impl Iterator<Item = (&ScanSample, &SampleData)> {
        self.samples
            .iter()
            .filter_map(|s| s.data.as_ref().ok().map(|d| (s, d)))
    }

    pub fn skipped(&self) -> impl Iterator<Item = (&ScanSample, &str)> {
        self.samples
            .iter()
            .filter_map(|s| s.data.as_ref().err().map(|e| (s, e.as_str())))
    }
}

type Evaluated = (Vec<f64>, Extraction);

/// Scans the trajectory in parallel; sample order, and therefore the
/// branch labels, do not depend on the number of threads.
pub fn scan_trajectory(spec: &TrajectorySpec) -> Result<ScanTable> {
    spec.validate()?;
    let raw: Vec<(f64, Result<Evaluated>)> = spec
        .samples()
        .into_par_iter()
        .map(|gx| (gx, spec.evaluate(gx)))
        .collect();
    let mut samples = Vec::with_capacity(raw.len());
    let mut tracker = Tracker::default();
    for (index, (gx, r)) in raw.into_iter().enumerate() {
        let (_, gy) = spec.point(gx);
        let (energies, data) = match r {
            Ok((energies, x)) => {
                let (branches, representatives) = tracker.assign(gx, &x);
                let dispersion = dispersion(&x);
                let d = SampleData {
                    extraction: x,
                    branches,
                    representatives,
                    dispersion,
                };
                (energies, Ok(d))
            }
            Err(e) => {
                let energies = spec
                    .params(gx)
                    .and_then(|p| diagonalize(&build_hamiltonian(&p)))
                    .map(|s| s.energies())
                    .unwrap_or_default();
                (energies, Err(e.to_string()))
            }
        };
        samples.push(ScanSample {
            index,
            gamma_x: gx,
            gamma_y: gy,
            energies,
            data,
        });
    }
    Ok(ScanTable {
        spec: spec.clone(),
        samples,
    })
}

/// Labels pairons by matching each sample against a linear prediction from
/// the previous two valid samples. A change in the number of pairons (the
/// state switched parity) starts new branches with fresh labels.
#[derive(Default)]
struct Tracker {
    history: Vec<(f64, Vec<Complex64>, Vec<SpherePoint>)>,
    base: usize,
}

impl Tracker {
    fn assign(&mut self, gx: f64, x: &Extraction) -> (Vec<usize>, Vec<SpherePoint>) {
        let es = x.pairons.pairons().to_vec();
        let n = es.len();
        let t = x.diagnostics.t;
        if let Some((_, prev, _)) = self.history.last() {
            if prev.len() != n {
                self.base += prev.len();
                self.history.clear();
            }
        }
        // the zero pair behind each pairon, recovered through the inverse map
        let zetas: Vec<SpherePoint> = es
            .iter()
            .map(|&e| match pairon_to_zeta_sq(e, t) {
                SpherePoint::Finite(w) => SpherePoint::Finite(w.sqrt()),
                SpherePoint::Infinity => SpherePoint::Infinity,
            })
            .collect();
        let (labels, reps) = match self.history.as_slice() {
            [] => {
                let reps: Vec<SpherePoint> = zetas.iter().map(canonical).collect();
                ((0..n).collect(), reps)
            }
            hist => {
                let (x1, e1, z1) = &hist[hist.len() - 1];
                let predicted: Vec<Complex64> = match hist.len() {
                    1 => e1.clone(),
                    _ => {
                        let (x0, e0, _) = &hist[hist.len() - 2];
                        let s = if x1 != x0 { (gx - x1) / (x1 - x0) } else { 0.0 };
                        e1.iter().zip(e0).map(|(a, b)| a + (a - b) * s).collect()
                    }
                };
                let mut cand = Vec::with_capacity(n * n);
                for (a, e) in es.iter().enumerate() {
                    for (b, p) in predicted.iter().enumerate() {
                        cand.push((SpherePoint::Finite(*e).chordal(&SpherePoint::Finite(*p)), a, b));
                    }
                }
                cand.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
                let mut labels = vec![usize::MAX; n];
                let mut taken = vec![false; n];
                for (_, a, b) in cand {
                    if labels[a] == usize::MAX && !taken[b] {
                        labels[a] = b;
                        taken[b] = true;
                    }
                }
                let reps: Vec<SpherePoint> = labels
                    .iter()
                    .zip(&zetas)
                    .map(|(&b, z)| {
                        let prev = &z1[b];
                        if z.neg().chordal(prev) < z.chordal(prev) {
                            z.neg()
                        } else {
                            *z
                        }
                    })
                    .collect();
                (labels, reps)
            }
        };
        // store in label order so that the next prediction indexes by label
        let mut by_label = vec![Complex64::new(0.0, 0.0); n];
        let mut rep_by_label = vec![SpherePoint::ORIGIN; n];
        for (a, &l) in labels.iter().enumerate() {
            by_label[l] = es[a];
            rep_by_label[l] = reps[a];
        }
        if self.history.len() == 2 {
            self.history.remove(0);
        }
        self.history.push((gx, by_label, rep_by_label));
        (labels.into_iter().map(|l| l + self.base).collect(), reps)
    }
}

fn canonical(z: &SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Finite(c) if c.re < 0.0 || (c.re == 0.0 && c.im < 0.0) => z.neg(),
        _ => *z,
    }
}
