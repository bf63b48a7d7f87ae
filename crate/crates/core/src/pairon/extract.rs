use super::map::{pair_zeros, zeta_sq_to_pairon, PairedZeros, PAIRING_TOLERANCE};
use super::{correspondence_defect, eigen_residual, reconstruct_state, PaironSet};
use crate::phase::{
    cluster_zeros, eigenpair_roots, majorana_poly, poly_roots, ZeroSet, DEFAULT_CLUSTER_RADIUS,
};
use crate::spin::{build_hamiltonian, diagonalize, ModelParams, Parity, Spectrum, StateVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractOptions {
    pub cluster_radius: f64,
    pub pairing_tolerance: f64,
    /// Also rebuild the state from its pairons and measure fidelity and
    /// eigen-residual.
    pub verify: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            cluster_radius: DEFAULT_CLUSTER_RADIUS,
            pairing_tolerance: PAIRING_TOLERANCE,
            verify: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub energy: f64,
    /// Distance to the nearest eigenvalue of the same parity.
    pub gap: f64,
    pub t: f64,
    /// Largest relative polynomial residual of the raw roots.
    pub root_residual: f64,
    /// Largest chordal distance between a zero and minus its partner.
    pub pairing_defect: f64,
    /// Largest mismatch between `ζ²` and `(t - ē)/(ē + t)`.
    pub correspondence_defect: f64,
    pub conjugation_defect: f64,
    /// `|⟨reconstructed|eigenstate⟩|`, when verified.
    pub fidelity: Option<f64>,
    pub reconstruction_residual: Option<f64>,
    /// `γx γy < 0`: the absolute value in `t` is taken as printed.
    pub sign_unverified: bool,
    /// Another-parity level within the degeneracy threshold.
    pub sector_crossing: bool,
    /// Pairons within `1e-9` of `±t`.
    pub near_pole: bool,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub state_index: usize,
    pub state: StateVector,
    pub raw_zeros: ZeroSet,
    pub zeros: ZeroSet,
    pub paired: PairedZeros,
    pub pairons: PaironSet,
    pub diagnostics: Diagnostics,
}

/// `t` for pairon extraction; `γy = 0` and `γx = 0` are singular.
pub fn control_t(params: &ModelParams) -> Result<f64> {
    let (gx, gy) = (params.gamma_x(), params.gamma_y());
    if gy == 0.0 {
        return Err(Error::Singular("γy = 0: t is undefined".into()));
    }
    if gx == 0.0 {
        return Err(Error::Singular("γx = 0: t vanishes".into()));
    }
    Ok(params.t().expect("γy != 0"))
}

type Analysis = (ZeroSet, ZeroSet, PairedZeros, PaironSet);

/// Zeros and pairons of a single state with a given `t`.
pub fn analyze_state(state: &StateVector, t: f64, opts: &ExtractOptions) -> Result<Analysis> {
    analyze_raw(state, poly_roots(&majorana_poly(state))?, t, opts)
}

fn analyze_raw(state: &StateVector, raw: ZeroSet, t: f64, opts: &ExtractOptions) -> Result<Analysis> {
    let zeros = cluster_zeros(&raw, opts.cluster_radius);
    let paired = pair_zeros(&zeros, opts.pairing_tolerance)?;
    let mut es = paired
        .pairs
        .iter()
        .map(|p| zeta_sq_to_pairon(&PairedZeros::representative(p), t))
        .collect::<Result<Vec<_>>>()?;
    // keep the pairs aligned with the sorted pairons
    let mut order: Vec<usize> = (0..es.len()).collect();
    order.sort_by(|&a, &b| es[a].re.total_cmp(&es[b].re).then(es[a].im.total_cmp(&es[b].im)));
    let pairs = order.iter().map(|&i| paired.pairs[i]).collect();
    es = order.iter().map(|&i| es[i]).collect();
    let paired = PairedZeros { pairs, ..paired };
    let pairons = PaironSet::new(state.j(), paired.seniority, es)?;
    Ok((raw, zeros, paired, pairons))
}

/// Full pipeline for eigenstate `index` at `params`:
/// diagonalize → Majorana polynomial → roots → clusters → pairons.
pub fn extract_pairons(params: &ModelParams, index: usize) -> Result<(PaironSet, Diagnostics)> {
    let spectrum = diagonalize(&build_hamiltonian(params))?;
    let x = extract_with(params, &spectrum, index, &ExtractOptions::default())?;
    Ok((x.pairons, x.diagnostics))
}

pub fn extract_with(
    params: &ModelParams,
    spectrum: &Spectrum,
    index: usize,
    opts: &ExtractOptions,
) -> Result<Extraction> {
    let t = control_t(params)?;
    let pair = spectrum.nondegenerate(index)?;
    let state = pair.state.clone();
    let (raw, zeros, paired, pairons) = analyze_raw(&state, eigenpair_roots(pair)?, t, opts)?;
    let expected = match state.parity() {
        Parity::Even => 0,
        Parity::Odd => 1,
        Parity::Mixed => unreachable!("eigenstates are parity-resolved"),
    };
    if pairons.seniority() != expected {
        return Err(Error::Inconsistent(format!(
            "seniority {} from zeros but the state has {} parity",
            pairons.seniority(),
            state.parity()
        )));
    }
    let mut d = Diagnostics {
        energy: pair.energy,
        gap: spectrum.sector_gap(index),
        t,
        root_residual: raw.max_residual(),
        pairing_defect: paired.max_defect,
        correspondence_defect: correspondence_defect(&zeros, &pairons, t)?,
        conjugation_defect: pairons.conjugation_defect(),
        fidelity: None,
        reconstruction_residual: None,
        sign_unverified: params.gamma_x() * params.gamma_y() < 0.0,
        sector_crossing: pair.sector_crossing,
        near_pole: !pairons.near_poles(t, 1e-9).is_empty(),
    };
    if opts.verify {
        let rebuilt = reconstruct_state(&pairons, t)?;
        d.fidelity = Some(rebuilt.fidelity(&state));
        d.reconstruction_residual = Some(eigen_residual(&rebuilt, params));
    }
    Ok(Extraction {
        state_index: index,
        state,
        raw_zeros: raw,
        zeros,
        paired,
        pairons,
        diagnostics: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn total_collapse_on_the_diagonal() {
        let p = ModelParams::from_control(10, 5.0, 5.0, 1.0).unwrap();
        let (pairons, d) = extract_pairons(&p, 0).unwrap();
        assert_eq!(pairons.len(), 10);
        assert!(pairons.pairons().iter().all(|e| *e == Complex64::new(-1.0, 0.0)));
        assert_eq!(d.fidelity, Some(1.0));
        assert!(d.near_pole);
    }

    #[test]
    fn two_level_ground_state() {
        let p = ModelParams::new(1, 1.0, 1.0, 0.0).unwrap();
        let (pairons, d) = extract_pairons(&p, 0).unwrap();
        assert!((pairons.pairons()[0] - Complex64::new(1.0 - 2f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!(d.sign_unverified);
        assert!(d.fidelity.unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn singular_points() {
        let p = ModelParams::new(2, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(extract_pairons(&p, 0), Err(Error::Singular(_))));
        let p = ModelParams::from_control(2, 0.0, 3.0, 1.0).unwrap();
        assert!(matches!(extract_pairons(&p, 0), Err(Error::Singular(_))));
    }

    #[test]
    fn degenerate_state_refused() {
        let p = ModelParams::new(2, 1.0, 0.0, 0.5).unwrap();
        // E(0) = E(2) = 3 in the even sector; both sit above three lower levels
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        let i = s.pairs.iter().position(|q| q.degenerate).unwrap();
        assert!(matches!(
            extract_with(&p, &s, i, &ExtractOptions::default()),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn every_state_roundtrips_at_a_generic_point() {
        let p = ModelParams::from_control(6, 2.3, 7.7, 1.0).unwrap();
        let s = diagonalize(&build_hamiltonian(&p)).unwrap();
        for i in 0..s.pairs.len() {
            let x = extract_with(&p, &s, i, &ExtractOptions::default()).unwrap();
            assert_eq!(x.zeros.total_multiplicity(), 12);
            assert!(x.diagnostics.fidelity.unwrap() >= 1.0 - 1e-8, "state {i}");
            assert!(
                x.diagnostics.reconstruction_residual.unwrap() <= 1e-8,
                "state {i}"
            );
            assert!(x.diagnostics.conjugation_defect <= 1e-8);
            assert!(x.diagnostics.correspondence_defect <= 1e-9);
        }
    }
}
