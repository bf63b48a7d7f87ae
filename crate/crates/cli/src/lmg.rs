use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use pairon_core::collapse::{
    collapse_points, crossing_points, detect_collapses, locate_pole_crossings, scan_trajectory,
    verify_collapse, verify_crossing, Candidate, CandidateKind, Line, ScanTable, TrajectorySpec,
};
use pairon_core::pairon::{extract_with, zeta_sq_to_pairon, ExtractOptions, Extraction, PairedZeros};
use pairon_core::phase::SpherePoint;
use pairon_core::spin::{build_hamiltonian, diagonalize, ModelParams};

use crate::config::{pick, positive, thread_count, with_threads, ConfigFile, Format};
use crate::output::{flags, Cell, Table};
use crate::{emit, meta, CliError, CliResult, OutputArgs};

/// Largest allowed disagreement between an emitted pairon and the pairon
/// recomputed from its emitted zero.
const CORRESPONDENCE_CHECK: f64 = 1e-9;
const FIDELITY_FLOOR: f64 = 1.0 - 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "lmg",
    version,
    about = "Husimi zeros and pairing energies of the two-level pairing (LMG) model"
)]
pub struct LmgCli {
    #[command(subcommand)]
    command: LmgCommand,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Quasispin (2j+1 levels)
    #[arg(long)]
    j: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    gx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gy: Option<f64>,
    /// Single-particle splitting ε [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
}

#[derive(Debug, Args)]
struct ToleranceArgs {
    /// Chordal radius for merging zeros into one multiple zero
    #[arg(long)]
    cluster_radius: Option<f64>,
    /// Chordal tolerance for matching ζ with -ζ
    #[arg(long)]
    pairing_tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct TrajectoryArgs {
    #[arg(long)]
    j: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    /// Scan along γx + γy = c
    #[arg(long, allow_negative_numbers = true, conflicts_with = "diagonal")]
    line_sum: Option<f64>,
    /// Scan along γx = γy
    #[arg(long)]
    diagonal: bool,
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Eigenstate index in ascending energy order [default: 0]
    #[arg(long)]
    state: Option<usize>,
    #[command(flatten)]
    tol: ToleranceArgs,
}

#[derive(Debug, Subcommand)]
enum LmgCommand {
    /// Energies with parity labels, optionally with eigenvectors
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Append the Dicke-basis coefficients c_0 … c_2j (index j+m)
        #[arg(long)]
        vectors: bool,
    },
    /// Clustered Husimi zeros of one eigenstate
    Zeros {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        state: Option<usize>,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Pairing energies of one eigenstate
    Pairons {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        state: Option<usize>,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Pairons and zeros along a line in the (γx, γy) plane
    Scan {
        #[command(flatten)]
        traj: TrajectoryArgs,
        /// Also write every sample's full spectrum to this CSV file
        #[arg(long)]
        energies_out: Option<PathBuf>,
    },
    /// Analytic collapse points compared with those detected along a scan
    Collapse {
        #[command(flatten)]
        traj: TrajectoryArgs,
    },
    /// Even/odd level crossings on the diagonal γx = γy
    Crossings {
        #[arg(long)]
        j: Option<u32>,
        #[arg(long, allow_negative_numbers = true)]
        eps: Option<f64>,
    },
}

struct Ctx {
    file: ConfigFile,
    format: Format,
}

impl Ctx {
    fn params(&self, m: &ModelArgs) -> CliResult<ModelParams> {
        let j = pick(m.j, self.file.j, "j")?;
        let gx = pick(m.gx, self.file.gx, "gx")?;
        let gy = pick(m.gy, self.file.gy, "gy")?;
        let eps = m.eps.or(self.file.eps).unwrap_or(1.0);
        Ok(ModelParams::from_control(j, gx, gy, eps)?)
    }

    fn options(&self, t: &ToleranceArgs) -> CliResult<ExtractOptions> {
        let mut o = ExtractOptions::default();
        if let Some(r) = t.cluster_radius.or(self.file.cluster_radius) {
            o.cluster_radius = positive(r, "cluster-radius")?;
        }
        if let Some(r) = t.pairing_tolerance.or(self.file.pairing_tolerance) {
            o.pairing_tolerance = positive(r, "pairing-tolerance")?;
        }
        Ok(o)
    }

    fn state(&self, s: Option<usize>) -> usize {
        s.or(self.file.state).unwrap_or(0)
    }

    fn trajectory(&self, a: &TrajectoryArgs, default_steps: usize) -> CliResult<TrajectorySpec> {
        let f = &self.file;
        let j = pick(a.j, f.j, "j")?;
        let diagonal = a.diagonal || (a.line_sum.is_none() && f.diagonal == Some(true));
        let line = if diagonal {
            Line::Diagonal
        } else {
            Line::Sum(pick(a.line_sum, f.line_sum, "line-sum")?)
        };
        let (from_default, to_default) = match line {
            Line::Sum(c) if c > 0.1 => (Some(0.05), Some(c - 0.05)),
            _ => (None, None),
        };
        let mut spec = TrajectorySpec::new(
            j,
            line,
            pick(a.from.or(f.from), from_default, "from")?,
            pick(a.to.or(f.to), to_default, "to")?,
            a.steps.or(f.steps).unwrap_or(default_steps),
        )?;
        spec.epsilon = a.eps.or(f.eps).unwrap_or(1.0);
        spec.state_index = self.state(a.state);
        spec.options = self.options(&a.tol)?;
        spec.validate()?;
        Ok(spec)
    }
}

fn point_json(p: &ModelParams) -> Value {
    json!({
        "j": p.j(),
        "gx": crate::output::json_float(p.gamma_x()),
        "gy": crate::output::json_float(p.gamma_y()),
        "eps": crate::output::json_float(p.epsilon()),
    })
}

fn spec_json(s: &TrajectorySpec) -> Value {
    let line = match s.line {
        Line::Sum(c) => json!({ "line-sum": crate::output::json_float(c) }),
        Line::Diagonal => json!("diagonal"),
    };
    json!({
        "j": s.j,
        "eps": crate::output::json_float(s.epsilon),
        "line": line,
        "from": crate::output::json_float(s.from),
        "to": crate::output::json_float(s.to),
        "steps": s.steps,
        "state": s.state_index,
        "cluster-radius": crate::output::json_float(s.options.cluster_radius),
        "pairing-tolerance": crate::output::json_float(s.options.pairing_tolerance),
    })
}

fn square(z: &SpherePoint) -> SpherePoint {
    match z {
        SpherePoint::Finite(z) => SpherePoint::Finite(z * z),
        SpherePoint::Infinity => SpherePoint::Infinity,
    }
}

/// Re-derives a pairon from the `ζ²` emitted alongside it.
fn check_correspondence(w: &SpherePoint, e: Complex64, t: f64) -> CliResult<()> {
    let back = zeta_sq_to_pairon(w, t)?;
    let d = SpherePoint::Finite(back).chordal(&SpherePoint::Finite(e));
    if d > CORRESPONDENCE_CHECK {
        return Err(CliError::Check(format!(
            "ζ² = {w} maps to {back}, emitted pairon {e} (distance {d:.3e})"
        )));
    }
    Ok(())
}

/// Index of each `±` pair's pairon in the sorted pairon list.
fn pair_alphas(x: &Extraction) -> CliResult<Vec<usize>> {
    let t = x.diagnostics.t;
    let es = x.pairons.pairons();
    let mut used = vec![false; es.len()];
    let mut out = Vec::with_capacity(x.paired.pairs.len());
    for pair in &x.paired.pairs {
        let w = PairedZeros::representative(pair);
        let e = zeta_sq_to_pairon(&w, t)?;
        let a = (0..es.len())
            .filter(|&a| !used[a])
            .min_by(|&a, &b| (es[a] - e).norm().total_cmp(&(es[b] - e).norm()))
            .ok_or_else(|| CliError::Check("more zero pairs than pairons".into()))?;
        used[a] = true;
        check_correspondence(&w, es[a], t)?;
        out.push(a);
    }
    Ok(out)
}

fn spectrum_table(p: &ModelParams, vectors: bool) -> CliResult<Table> {
    let s = diagonalize(&build_hamiltonian(p))?;
    let mut cols: Vec<String> = ["index", "energy", "parity", "residual", "flags"]
        .map(String::from)
        .to_vec();
    if vectors {
        cols.extend((0..p.dim()).map(|k| format!("c_{k}")));
    }
    let mut t = Table::new(cols);
    for (i, pair) in s.pairs.iter().enumerate() {
        let mut row = vec![
            i.into(),
            pair.energy.into(),
            pair.parity().to_string().into(),
            pair.residual.into(),
            flags(&[
                (pair.degenerate, "degenerate"),
                (pair.sector_crossing, "sector_crossing"),
            ]),
        ];
        if vectors {
            row.extend(pair.state.coeffs().iter().map(|c| Cell::Float(c.re)));
        }
        t.push(row);
    }
    Ok(t)
}

fn extraction(p: &ModelParams, index: usize, opts: &ExtractOptions) -> CliResult<Extraction> {
    let s = diagonalize(&build_hamiltonian(p))?;
    Ok(extract_with(p, &s, index, opts)?)
}

fn diagnostic_flags(x: &Extraction) -> Vec<(bool, &'static str)> {
    let d = &x.diagnostics;
    vec![
        (d.near_pole, "near_pole"),
        (d.sign_unverified, "sign_unverified"),
        (d.sector_crossing, "sector_crossing"),
        (d.fidelity.is_some_and(|f| f < FIDELITY_FLOOR), "low_fidelity"),
    ]
}

fn zeros_table(p: &ModelParams, x: &Extraction) -> CliResult<Table> {
    let alphas = pair_alphas(x)?;
    let m = x.pairons.len();
    let mut t = Table::new([
        "gx",
        "gy",
        "t",
        "state_index",
        "energy",
        "alpha",
        "theta",
        "phi",
        "multiplicity",
        "flags",
    ]);
    for z in x.zeros.zeros() {
        let alpha = x
            .paired
            .pairs
            .iter()
            .zip(&alphas)
            .filter(|(pair, _)| pair.0 == z.point || pair.1 == z.point)
            .map(|(_, a)| *a)
            .min();
        let mut f = diagnostic_flags(x);
        f.push((z.point.is_pole(), "pole"));
        f.push((alpha.is_none(), "seniority"));
        t.push(vec![
            p.gamma_x().into(),
            p.gamma_y().into(),
            x.diagnostics.t.into(),
            x.state_index.into(),
            x.diagnostics.energy.into(),
            alpha.unwrap_or(m).into(),
            z.point.theta().into(),
            z.point.phi().into(),
            z.multiplicity.into(),
            flags(&f),
        ]);
    }
    Ok(t)
}

fn pairons_table(p: &ModelParams, x: &Extraction) -> CliResult<Table> {
    pair_alphas(x)?;
    let near = x.pairons.near_poles(x.diagnostics.t, 1e-9);
    let mut t = Table::new([
        "gx",
        "gy",
        "t",
        "state_index",
        "energy",
        "alpha",
        "re_e",
        "im_e",
        "flags",
    ]);
    for (a, e) in x.pairons.pairons().iter().enumerate() {
        let mut f = diagnostic_flags(x);
        f[0] = (near.contains(&a), "near_pole");
        t.push(vec![
            p.gamma_x().into(),
            p.gamma_y().into(),
            x.diagnostics.t.into(),
            x.state_index.into(),
            x.diagnostics.energy.into(),
            a.into(),
            e.re.into(),
            e.im.into(),
            flags(&f),
        ]);
    }
    Ok(t)
}

pub const SCAN_COLUMNS: [&str; 13] = [
    "gx",
    "gy",
    "t",
    "state_index",
    "energy",
    "alpha",
    "re_e",
    "im_e",
    "theta",
    "phi",
    "multiplicity",
    "branch_id",
    "flags",
];

pub fn scan_rows(table: &ScanTable, log: &mut dyn Write) -> CliResult<Table> {
    let mut t = Table::new(SCAN_COLUMNS);
    for s in &table.samples {
        let d = match &s.data {
            Ok(d) => d,
            Err(reason) => {
                writeln!(log, "warning: skipped sample gx = {}: {reason}", s.gamma_x)?;
                let mut row = vec![s.gamma_x.into(), s.gamma_y.into()];
                row.extend(std::iter::repeat_n(Cell::Empty, 10));
                row.push("skipped".into());
                t.push(row);
                continue;
            }
        };
        let x = &d.extraction;
        let tt = x.diagnostics.t;
        let near = x.pairons.near_poles(tt, 1e-9);
        let head = |cells: &mut Vec<Cell>| {
            cells.extend([
                s.gamma_x.into(),
                s.gamma_y.into(),
                tt.into(),
                x.state_index.into(),
                x.diagnostics.energy.into(),
            ])
        };
        for (a, e) in d.pairons().iter().enumerate() {
            let z = d.representatives[a];
            check_correspondence(&square(&z), *e, tt)?;
            let mult = x
                .zeros
                .zeros()
                .iter()
                .min_by(|p, q| p.point.chordal(&z).total_cmp(&q.point.chordal(&z)))
                .map_or(1, |c| c.multiplicity);
            let mut f = diagnostic_flags(x);
            f[0] = (near.contains(&a), "near_pole");
            f.push((z.is_pole(), "pole"));
            let mut row = Vec::with_capacity(13);
            head(&mut row);
            row.extend([
                a.into(),
                e.re.into(),
                e.im.into(),
                z.theta().into(),
                z.phi().into(),
                mult.into(),
                d.branches[a].into(),
                flags(&f),
            ]);
            t.push(row);
        }
        if x.pairons.seniority() == 1 {
            for (k, pole) in [SpherePoint::ORIGIN, SpherePoint::Infinity].iter().enumerate() {
                let mut row = Vec::with_capacity(13);
                head(&mut row);
                row.extend([
                    (d.pairons().len() + k).into(),
                    Cell::Empty,
                    Cell::Empty,
                    pole.theta().into(),
                    pole.phi().into(),
                    1usize.into(),
                    Cell::Empty,
                    "seniority|pole".into(),
                ]);
                t.push(row);
            }
        }
    }
    Ok(t)
}

fn energies_table(table: &ScanTable) -> Table {
    let mut t = Table::new(["gx", "gy", "index", "energy"]);
    for s in &table.samples {
        for (i, e) in s.energies.iter().enumerate() {
            t.push(vec![s.gamma_x.into(), s.gamma_y.into(), i.into(), (*e).into()]);
        }
    }
    t
}

fn pattern_text(p: &[usize]) -> String {
    p.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
}

/// Analytic points (k, ± branch) matched to the nearest detection of the
/// right kind, followed by any detections left unmatched.
fn collapse_table(spec: &TrajectorySpec, table: &ScanTable) -> CliResult<Table> {
    let mut candidates = detect_collapses(table, &Default::default())?;
    candidates.extend(locate_pole_crossings(table));
    let mut t = Table::new([
        "k",
        "branch",
        "gx",
        "gy",
        "level",
        "detected_gx",
        "delta",
        "method",
        "dispersion",
        "tolerance",
        "within_tolerance",
        "pattern",
        "expected_pattern",
        "pattern_match",
        "center_re",
        "center_im",
    ]);
    let mut used = vec![false; candidates.len()];
    let points = match spec.line {
        Line::Sum(c) if c > 0.0 => collapse_points(spec.j, c)?,
        _ => Vec::new(),
    };
    let method = |k: CandidateKind| match k {
        CandidateKind::DispersionMinimum => "dispersion",
        CandidateKind::Plateau => "plateau",
        CandidateKind::PoleCrossing => "pole_crossing",
    };
    for p in points
        .iter()
        .filter(|p| p.gamma_x >= spec.from && p.gamma_x <= spec.to)
    {
        let want = if p.k == 0 {
            CandidateKind::PoleCrossing
        } else {
            CandidateKind::DispersionMinimum
        };
        let best = candidates
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind == want)
            .min_by(|a, b| {
                (a.1.gamma_x - p.gamma_x)
                    .abs()
                    .total_cmp(&(b.1.gamma_x - p.gamma_x).abs())
            });
        let tol = if p.k <= 3 { 1e-3 } else { 5e-2 };
        let check = verify_collapse(spec.j, p, spec.epsilon)?;
        let (det, delta, disp, kind): (Option<f64>, Option<f64>, Option<f64>, Option<&str>) = match best {
            Some((i, c)) => {
                used[i] = true;
                (
                    Some(c.gamma_x),
                    Some(c.gamma_x - p.gamma_x),
                    Some(c.dispersion),
                    Some(method(c.kind)),
                )
            }
            None => (None, None, None, None),
        };
        t.push(vec![
            p.k.into(),
            p.branch.symbol().to_string().into(),
            p.gamma_x.into(),
            p.gamma_y.into(),
            p.level.into(),
            det.into(),
            delta.into(),
            kind.into(),
            disp.into(),
            tol.into(),
            delta.is_some_and(|d| d.abs() <= tol).into(),
            pattern_text(&check.pattern).into(),
            pattern_text(&check.expected).into(),
            check.matches.into(),
            check.center.re.into(),
            check.center.im.into(),
        ]);
    }
    for (c, _) in candidates.iter().zip(&used).filter(|(_, u)| !**u) {
        let Candidate {
            kind,
            gamma_x,
            dispersion,
            ..
        } = *c;
        let mut row = vec![Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty];
        row.extend([
            gamma_x.into(),
            Cell::Empty,
            method(kind).into(),
            dispersion.into(),
        ]);
        row.extend(std::iter::repeat_n(Cell::Empty, 7));
        t.push(row);
    }
    Ok(t)
}

fn crossings_table(j: u32, eps: f64) -> CliResult<Table> {
    let mut t = Table::new([
        "k", "gx", "gy", "m", "m_prime", "energy", "gap", "norm", "pair_gap", "verified",
    ]);
    for c in crossing_points(j) {
        let chk = verify_crossing(j, &c, eps)?;
        t.push(vec![
            c.k.into(),
            c.gamma_x.into(),
            c.gamma_x.into(),
            (c.m_pair.0 as i64).into(),
            (c.m_pair.1 as i64).into(),
            chk.energy.into(),
            chk.gap.into(),
            chk.norm.into(),
            chk.pair_gap.into(),
            chk.verified.into(),
        ]);
    }
    Ok(t)
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = LmgCli::try_parse_from(args)?;
    let file = match &cli.output.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let format = cli.output.format.or(file.format).unwrap_or_default();
    let threads = thread_count(cli.output.threads, file.threads)?;
    let seed = cli.output.seed.or(file.seed).unwrap_or(0);
    let out = cli.output.out.clone().or(file.out.clone());
    let ctx = Ctx { file, format };
    let (name, table, config) = match &cli.command {
        LmgCommand::Spectrum { model, vectors } => {
            let p = ctx.params(model)?;
            ("spectrum", spectrum_table(&p, *vectors)?, point_json(&p))
        }
        LmgCommand::Zeros { model, state, tol } => {
            let p = ctx.params(model)?;
            let x = extraction(&p, ctx.state(*state), &ctx.options(tol)?)?;
            ("zeros", zeros_table(&p, &x)?, point_json(&p))
        }
        LmgCommand::Pairons { model, state, tol } => {
            let p = ctx.params(model)?;
            let x = extraction(&p, ctx.state(*state), &ctx.options(tol)?)?;
            ("pairons", pairons_table(&p, &x)?, point_json(&p))
        }
        LmgCommand::Scan { traj, energies_out } => {
            let spec = ctx.trajectory(traj, 200)?;
            let table = with_threads(threads, || scan_trajectory(&spec))??;
            if let Some(path) = energies_out {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                energies_table(&table).write_csv(&mut f)?;
                f.flush()?;
            }
            ("scan", scan_rows(&table, stderr)?, spec_json(&spec))
        }
        LmgCommand::Collapse { traj } => {
            let spec = ctx.trajectory(traj, 2000)?;
            let t = with_threads(threads, || {
                scan_trajectory(&spec)
                    .map_err(CliError::from)
                    .and_then(|table| collapse_table(&spec, &table))
            })??;
            ("collapse", t, spec_json(&spec))
        }
        LmgCommand::Crossings { j, eps } => {
            let j = pick(*j, ctx.file.j, "j")?;
            let eps = eps.or(ctx.file.eps).unwrap_or(1.0);
            (
                "crossings",
                crossings_table(j, eps)?,
                json!({ "j": j, "eps": crate::output::json_float(eps) }),
            )
        }
    };
    emit(
        &table,
        ctx.format,
        meta("lmg", name, config, seed),
        out.as_deref(),
        stdout,
    )
}
