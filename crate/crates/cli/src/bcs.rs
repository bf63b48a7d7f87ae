use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use pairon_core::boson::{
    best_slice, boson_energy, diagonalize_bcs, extract_boson_pairons, reconstruct_boson_state,
    verify_ellipsoid, BosonModel, BosonSpectrum, ELLIPSOID_TOLERANCE,
};

use crate::config::{pick, ConfigFile};
use crate::output::{flags, json_float, Cell, Table};
use crate::{emit, meta, CliResult, OutputArgs};

const FIDELITY_FLOOR: f64 = 1.0 - 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "bcs",
    version,
    about = "Pairing energies of the multi-level bosonic pairing model"
)]
pub struct BcsCli {
    #[command(subcommand)]
    command: BcsCommand,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Ascending level energies ε_0,…,ε_L
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    levels: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Number of bosons
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum BcsCommand {
    /// Energies with per-level seniorities
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Append the Fock-basis coefficients
        #[arg(long)]
        vectors: bool,
    },
    /// Pairing energies of one eigenstate
    Pairons {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        state: Option<usize>,
        /// Axis ζ_s used for extraction [default: the best-conditioned one]
        #[arg(long)]
        slice: Option<usize>,
    },
    /// Sampled amplitude on each pairon's quadric
    Ellipsoid {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        state: Option<usize>,
        #[arg(long)]
        slice: Option<usize>,
        /// Points per quadric
        #[arg(long)]
        samples: Option<usize>,
        /// Check every non-degenerate eigenstate instead of --state
        #[arg(long)]
        all_states: bool,
    },
}

fn model(m: &ModelArgs, f: &ConfigFile) -> CliResult<BosonModel> {
    let levels = pick(m.levels.clone(), f.levels.clone(), "levels")?;
    let gamma = pick(m.gamma, f.gamma, "gamma")?;
    let n = pick(m.n, f.n, "n")?;
    Ok(BosonModel::new(levels, gamma, n)?)
}

fn model_json(m: &BosonModel) -> Value {
    json!({
        "levels": m.levels().iter().map(|e| json_float(*e)).collect::<Vec<_>>(),
        "gamma": json_float(m.gamma()),
        "n": m.particles(),
    })
}

fn nu_columns(l: usize) -> impl Iterator<Item = String> {
    (0..=l).map(|k| format!("nu_{k}"))
}

fn spectrum_table(m: &BosonModel, s: &BosonSpectrum, vectors: bool) -> Table {
    let mut cols: Vec<String> = vec!["index".into(), "energy".into()];
    cols.extend(nu_columns(m.l()));
    cols.extend(["residual".into(), "flags".into()]);
    if vectors {
        cols.extend(s.basis.states().iter().map(|occ| {
            format!(
                "c_{}",
                occ.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("_")
            )
        }));
    }
    let mut t = Table::new(cols);
    for (i, p) in s.pairs.iter().enumerate() {
        let mut row: Vec<Cell> = vec![i.into(), p.energy.into()];
        row.extend(p.seniorities.iter().map(|&v| Cell::Int(v as i64)));
        row.push(p.residual.into());
        row.push(flags(&[(p.degenerate, "degenerate")]));
        if vectors {
            row.extend(p.state.coeffs().iter().map(|c| Cell::Float(c.re)));
        }
        t.push(row);
    }
    t
}

fn pairons_table(m: &BosonModel, s: &BosonSpectrum, index: usize, slice: Option<usize>) -> CliResult<Table> {
    let slice = match slice {
        Some(s) => s,
        None => best_slice(m, s, index)?,
    };
    let p = extract_boson_pairons(m, s, index, slice)?;
    let energy = boson_energy(&p, m)?;
    let fidelity = reconstruct_boson_state(&p, m)?.fidelity(&s.get(index)?.state);
    let l = m.l();
    let mut cols: Vec<String> = ["state_index", "energy", "alpha", "re_e", "im_e"]
        .map(String::from)
        .to_vec();
    cols.extend(nu_columns(l));
    for k in 1..=l {
        cols.push(format!("xi2_re_{k}"));
        cols.push(format!("xi2_im_{k}"));
    }
    cols.extend(["slice", "sum_rule_energy", "fidelity", "flags"].map(String::from));
    let mut t = Table::new(cols);
    let axes = p.semi_axes_sq(m);
    for (a, e) in p.pairons.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            index.into(),
            s.get(index)?.energy.into(),
            a.into(),
            e.re.into(),
            e.im.into(),
        ];
        row.extend(p.seniorities.iter().map(|&v| Cell::Int(v as i64)));
        for x in &axes[a] {
            row.push(x.re.into());
            row.push(x.im.into());
        }
        row.extend([
            slice.into(),
            energy.into(),
            fidelity.into(),
            flags(&[(fidelity < FIDELITY_FLOOR, "low_fidelity")]),
        ]);
        t.push(row);
    }
    Ok(t)
}

fn ellipsoid_table(
    m: &BosonModel,
    s: &BosonSpectrum,
    states: &[usize],
    slice: Option<usize>,
    samples: usize,
    seed: u64,
) -> CliResult<Table> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new([
        "state_index",
        "energy",
        "alpha",
        "re_e",
        "im_e",
        "samples",
        "max_ratio",
        "tolerance",
        "passed",
    ]);
    for &i in states {
        let slice = match slice {
            Some(s) => s,
            None => best_slice(m, s, i)?,
        };
        let p = extract_boson_pairons(m, s, i, slice)?;
        let r = verify_ellipsoid(&p, &s.get(i)?.state, m, samples, &mut rng)?;
        for (a, (e, worst)) in p.pairons.iter().zip(&r.per_quadric).enumerate() {
            t.push(vec![
                i.into(),
                s.get(i)?.energy.into(),
                a.into(),
                e.re.into(),
                e.im.into(),
                samples.into(),
                (*worst).into(),
                ELLIPSOID_TOLERANCE.into(),
                (*worst <= ELLIPSOID_TOLERANCE).into(),
            ]);
        }
    }
    Ok(t)
}

pub fn run<I, T>(args: I, stdout: &mut dyn Write, _stderr: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = BcsCli::try_parse_from(args)?;
    let file = match &cli.output.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let format = cli.output.format.or(file.format).unwrap_or_default();
    let seed = cli.output.seed.or(file.seed).unwrap_or(0);
    let out = cli.output.out.clone().or(file.out.clone());
    let (name, table, config) = match &cli.command {
        BcsCommand::Spectrum { model: a, vectors } => {
            let m = model(a, &file)?;
            let s = diagonalize_bcs(&m)?;
            ("spectrum", spectrum_table(&m, &s, *vectors), model_json(&m))
        }
        BcsCommand::Pairons {
            model: a,
            state,
            slice,
        } => {
            let m = model(a, &file)?;
            let s = diagonalize_bcs(&m)?;
            let index = state.or(file.state).unwrap_or(0);
            let slice = slice.or(file.slice);
            ("pairons", pairons_table(&m, &s, index, slice)?, model_json(&m))
        }
        BcsCommand::Ellipsoid {
            model: a,
            state,
            slice,
            samples,
            all_states,
        } => {
            let m = model(a, &file)?;
            let s = diagonalize_bcs(&m)?;
            let states: Vec<usize> = if *all_states {
                (0..s.pairs.len()).filter(|&i| !s.pairs[i].degenerate).collect()
            } else {
                vec![state.or(file.state).unwrap_or(0)]
            };
            let samples = samples.or(file.samples).unwrap_or(100);
            let t = ellipsoid_table(&m, &s, &states, slice.or(file.slice), samples, seed)?;
            let mut config = model_json(&m);
            config["samples"] = json!(samples);
            ("ellipsoid", t, config)
        }
    };
    emit(
        &table,
        format,
        meta("bcs", name, config, seed),
        out.as_deref(),
        stdout,
    )
}
