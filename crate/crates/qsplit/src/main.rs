//! Command-line front end. One command per process; every output file
//! is byte-reproducible for a given scenario and flags.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use qsplit::observables::{channel_fraction, moments_x, Weight};
use qsplit::oracle::{propagate, GridField};
use qsplit::scenario::Scenario;
use qsplit::spectral::{synthesize_with, SynthesisTable};
use qsplit::stationary::{channel_states, Channel};
use qsplit::timing::{deff_xstart_sweep, timing_report};
use qsplit::transfer::{tunneling_params, ParamTable};

const DERIVATIVE_STEP: f64 = 1e-3;
const ORACLE_DT_FS: f64 = 0.25;
const ORACLE_DX_NM: f64 = 0.05;
const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "qsplit",
    version,
    about = "Transmission/reflection splitting of 1D scattering packets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario path, or a bundled name: barrier_fig1, well_fig4
    #[arg(long, global = true, default_value = "barrier_fig1")]
    scenario: String,
    /// Directory for output files
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Comma-separated checkpoint times in ps, overriding the scenario
    #[arg(long, global = true)]
    times: Option<String>,
    /// Worker threads (falls back to QSPLIT_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Left margin L1 in nm, overriding the scenario
    #[arg(long, global = true)]
    l1: Option<f64>,
    /// Right margin L2 in nm, overriding the scenario
    #[arg(long, global = true)]
    l2: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Tunneling parameters and their k-derivatives over the k-grid
    Params,
    /// Stationary full/transmission/reflection states at the central k
    Stationary,
    /// Packet densities per channel at the checkpoint times
    Evolve,
    /// Norms, centers, widths, and mean wavenumbers per channel
    Moments,
    /// Exact, asymptotic, and legacy characteristic times
    Times,
    /// Effective width and starting point across the k-grid
    Sweep,
    /// Finite-difference propagation of the full packet for diffing
    Oracle,
    /// Run the invariant suite and print a pass/fail table
    Validate,
}

struct Failure {
    code: i32,
    msg: String,
}

/// Exit 2: the request itself is malformed.
fn cfg(e: impl std::fmt::Display) -> Failure {
    Failure { code: 2, msg: e.to_string() }
}

/// Exit 3: a numerical precondition failed while computing.
fn num(e: impl std::fmt::Display) -> Failure {
    Failure { code: 3, msg: e.to_string() }
}

fn main() {
    let cli = Cli::parse();
    if let Err(f) = run(cli) {
        eprintln!("error: {}", f.msg);
        std::process::exit(f.code);
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = resolve_threads(cli.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(cfg)?;
    }
    let mut scenario = Scenario::load(&cli.scenario).map_err(cfg)?;
    if let Some(spec) = &cli.times {
        scenario.times = parse_times(spec)?;
    }
    let l1 = cli.l1.unwrap_or(scenario.timing.l1_nm);
    let l2 = cli.l2.unwrap_or(scenario.timing.l2_nm);
    if l1 < 0.0 || l2 < 0.0 {
        return Err(cfg("margins L1 and L2 must be non-negative"));
    }
    std::fs::create_dir_all(&cli.out).map_err(cfg)?;

    match cli.command {
        Command::Params => cmd_params(&scenario, &cli.out),
        Command::Stationary => cmd_stationary(&scenario, &cli.out),
        Command::Evolve => cmd_evolve(&scenario, &cli.out),
        Command::Moments => cmd_moments(&scenario, &cli.out),
        Command::Times => cmd_times(&scenario, &cli.out, l1, l2),
        Command::Sweep => cmd_sweep(&scenario, &cli.out),
        Command::Oracle => cmd_oracle(&scenario, &cli.out),
        Command::Validate => cmd_validate(&scenario),
    }
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("QSPLIT_THREADS") {
            Ok(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| cfg(format!("QSPLIT_THREADS is not a thread count: {v:?}")))?,
            ),
            Err(_) => None,
        },
    };
    if n == Some(0) {
        return Err(cfg("thread count must be at least 1"));
    }
    Ok(n)
}

fn parse_times(spec: &str) -> Result<Vec<f64>, Failure> {
    let times: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| cfg(format!("cannot parse --times {spec:?} as ps values")))?;
    if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(cfg("checkpoint times must be finite and non-negative (ps)"));
    }
    Ok(times)
}

/// 17 significant digits, sign of zero normalized, exponent notation.
fn fmt17(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

/// Checkpoint tag for filenames: fs rounded to µfs, '.' spelled as 'p'.
fn time_tag(t_fs: f64) -> String {
    let r = (t_fs * 1e6).round() / 1e6;
    if r == r.trunc() {
        format!("{}", r.trunc() as i64)
    } else {
        format!("{r}").replace('.', "p")
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(cfg)?;
    w.write_record(header).map_err(cfg)?;
    for row in rows {
        w.write_record(row).map_err(cfg)?;
    }
    w.flush().map_err(cfg)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_params(sc: &Scenario, out: &Path) -> Result<(), Failure> {
    let pot = sc.potential().map_err(cfg)?;
    let ks = sc.kgrid().map_err(cfg)?.points();
    let table = ParamTable::build(&pot, &ks, DERIVATIVE_STEP).map_err(num)?;
    let rows: Vec<Vec<String>> = table
        .entries
        .iter()
        .map(|e| {
            vec![
                fmt17(e.params.k),
                fmt17(e.params.t),
                fmt17(e.params.r),
                fmt17(e.params.j),
                fmt17(e.params.f),
                fmt17(e.t_prime),
                fmt17(e.j_prime),
                e.f_prime.map(fmt17).unwrap_or_default(),
            ]
        })
        .collect();
    write_csv(
        &out.join("params.csv"),
        &["k_inm", "T", "R", "J_rad", "F_rad", "dT_dk", "dJ_dk", "dF_dk"],
        &rows,
    )
}

fn cmd_stationary(sc: &Scenario, out: &Path) -> Result<(), Failure> {
    let pot = sc.potential().map_err(cfg)?;
    let params = tunneling_params(&pot, sc.k0()).map_err(num)?;
    let states = channel_states(&params, &pot).map_err(num)?;
    let rows: Vec<Vec<String>> = sc
        .xs()
        .iter()
        .map(|&x| {
            let vf = states.full.eval(x);
            let vt = states.tr.eval(x);
            let vr = states.rf.eval(x);
            vec![
                fmt17(x),
                fmt17(vf.re),
                fmt17(vf.im),
                fmt17(vt.re),
                fmt17(vt.im),
                fmt17(vr.re),
                fmt17(vr.im),
            ]
        })
        .collect();
    write_csv(
        &out.join("stationary.csv"),
        &["x_nm", "re_full", "im_full", "re_tr", "im_tr", "re_ref", "im_ref"],
        &rows,
    )
}

struct Synth {
    table: SynthesisTable,
    packet: qsplit::spectral::SpectralPacket,
}

impl Synth {
    fn new(sc: &Scenario) -> Result<Synth, Failure> {
        let pot = sc.potential().map_err(cfg)?;
        let grid = sc.kgrid().map_err(cfg)?;
        let packet = sc.spectrum(&grid).map_err(cfg)?;
        let table = SynthesisTable::build(&pot, &grid).map_err(num)?;
        Ok(Synth { table, packet })
    }

    fn field(&self, channel: Channel, t_fs: f64, xs: &[f64]) -> Result<Vec<Complex64>, Failure> {
        synthesize_with(&self.table, &self.packet, channel, t_fs, xs).map_err(num)
    }
}

fn cmd_evolve(sc: &Scenario, out: &Path) -> Result<(), Failure> {
    let synth = Synth::new(sc)?;
    let xs = sc.xs();
    for t in sc.times_fs() {
        let full = synth.field(Channel::Full, t, &xs)?;
        let tr = synth.field(Channel::Tr, t, &xs)?;
        let rf = synth.field(Channel::Ref, t, &xs)?;
        let rows: Vec<Vec<String>> = (0..xs.len())
            .map(|i| {
                vec![
                    fmt17(xs[i]),
                    fmt17(full[i].norm_sqr()),
                    fmt17(tr[i].norm_sqr()),
                    fmt17(rf[i].norm_sqr()),
                ]
            })
            .collect();
        write_csv(
            &out.join(format!("evolve_t{}fs.csv", time_tag(t))),
            &["x_nm", "dens_full", "dens_tr", "dens_ref"],
            &rows,
        )?;
    }
    Ok(())
}

fn cmd_moments(sc: &Scenario, out: &Path) -> Result<(), Failure> {
    let synth = Synth::new(sc)?;
    let xs = sc.xs();
    let mass = sc.potential.mass_me;
    let mut rows = Vec::new();
    for t in sc.times_fs() {
        for (name, channel) in [("full", Channel::Full), ("tr", Channel::Tr), ("ref", Channel::Ref)]
        {
            let field = synth.field(channel, t, &xs)?;
            let m = moments_x(&xs, &field, mass).map_err(num)?;
            rows.push(vec![
                fmt17(t),
                name.to_string(),
                fmt17(m.norm2),
                fmt17(m.mean_x),
                fmt17(m.var_x),
                fmt17(m.mean_k),
            ]);
        }
    }
    write_csv(
        &out.join("moments.csv"),
        &["t_fs", "channel", "norm2", "mean_x_nm", "var_x_nm2", "mean_k_inm"],
        &rows,
    )
}

#[derive(Serialize)]
struct TimesDoc {
    schema_version: u32,
    #[serde(flatten)]
    report: qsplit::timing::TimingReport,
}

fn cmd_times(sc: &Scenario, out: &Path, l1: f64, l2: f64) -> Result<(), Failure> {
    let pot = sc.potential().map_err(cfg)?;
    let grid = sc.kgrid().map_err(cfg)?;
    let packet = sc.spectrum(&grid).map_err(cfg)?;
    let report = timing_report(&pot, &packet, l1, l2, sc.window_fs()).map_err(num)?;
    let doc = TimesDoc { schema_version: SCHEMA_VERSION, report };
    let text = serde_json::to_string_pretty(&doc).map_err(cfg)?;
    let path = out.join("times.json");
    std::fs::write(&path, text.as_bytes()).map_err(cfg)?;
    println!("{text}");
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_sweep(sc: &Scenario, out: &Path) -> Result<(), Failure> {
    let pot = sc.potential().map_err(cfg)?;
    let ks = sc.kgrid().map_err(cfg)?.points();
    let rows: Vec<Vec<String>> = deff_xstart_sweep(&pot, &ks, DERIVATIVE_STEP)
        .map_err(num)?
        .iter()
        .map(|&(k, d_eff, x_start)| vec![fmt17(k), fmt17(d_eff), fmt17(x_start)])
        .collect();
    write_csv(&out.join("sweep.csv"), &["k_inm", "d_eff_nm", "x_start_nm"], &rows)
}

/// Refine the output grid so the propagator runs at its design spacing
/// while every output node stays bitwise on the fine grid.
fn refine_grid(xs: &[f64]) -> (Vec<f64>, usize) {
    let step = xs[1] - xs[0];
    let m = (step / ORACLE_DX_NM).ceil().max(1.0) as usize;
    let mut fine = Vec::with_capacity((xs.len() - 1) * m + 1);
    for i in 0..xs.len() - 1 {
        fine.push(xs[i]);
        for r in 1..m {
            fine.push(xs[i] + (xs[i + 1] - xs[i]) * r as f64 / m as f64);
        }
    }
    fine.push(*xs.last().unwrap());
    (fine, m)
}

fn cmd_oracle(sc: &Scenario, out: &Path) -> Result<(), Failure> {
    let pot = sc.potential().map_err(cfg)?;
    let synth = Synth::new(sc)?;
    let xs = sc.xs();
    let (fine, m) = refine_grid(&xs);
    let mut times = sc.times_fs();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();

    let start = synth.field(Channel::Full, 0.0, &fine)?;
    let mut field = GridField::new(fine, start, 0.0).map_err(num)?;
    for t in times {
        let steps = ((t - field.t) / ORACLE_DT_FS).round();
        if ((t - field.t) - steps * ORACLE_DT_FS).abs() > 1e-6 {
            return Err(num(format!(
                "checkpoint {t} fs does not align with the {ORACLE_DT_FS} fs step"
            )));
        }
        if steps > 0.0 {
            field = propagate(&field, &pot, ORACLE_DT_FS, steps as usize).map_err(num)?;
        }
        let rows: Vec<Vec<String>> = (0..xs.len())
            .map(|i| vec![fmt17(field.xs[i * m]), fmt17(field.values[i * m].norm_sqr())])
            .collect();
        write_csv(
            &out.join(format!("oracle_t{}fs.csv", time_tag(t))),
            &["x_nm", "dens_full"],
            &rows,
        )?;
    }
    Ok(())
}

struct CheckRow {
    name: &'static str,
    measured: f64,
    bound: f64,
    pass: bool,
}

fn check(name: &'static str, measured: f64, bound: f64) -> CheckRow {
    CheckRow { name, measured, bound, pass: measured < bound }
}

fn overlap(a: &[Complex64], b: &[Complex64], dx: f64) -> Complex64 {
    let n = a.len();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        s += a[i].conj() * b[i] * w;
    }
    s * dx
}

fn cmd_validate(sc: &Scenario) -> Result<(), Failure> {
    let pot = sc.potential().map_err(cfg)?;
    let synth = Synth::new(sc)?;
    let xs = sc.xs();
    let dx = xs[1] - xs[0];
    let mut rows: Vec<CheckRow> = Vec::new();

    // decomposition identity and reflected-channel confinement at the
    // scenario checkpoints
    let mut decomp = 0.0f64;
    let mut nullity = 0.0f64;
    for t in sc.times_fs() {
        let full = synth.field(Channel::Full, t, &xs)?;
        let tr = synth.field(Channel::Tr, t, &xs)?;
        let rf = synth.field(Channel::Ref, t, &xs)?;
        let max_full = full.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let max_gap = (0..xs.len())
            .map(|i| (full[i] - tr[i] - rf[i]).norm())
            .fold(0.0, f64::max);
        decomp = decomp.max(max_gap / max_full);
        let total = overlap(&rf, &rf, dx).re;
        let right: f64 = (0..xs.len())
            .filter(|&i| xs[i] > pot.x_mid)
            .map(|i| rf[i].norm_sqr() * dx)
            .sum();
        nullity = nullity.max(right / total);
    }
    rows.push(check("decomposition_identity", decomp, 1e-6));
    rows.push(check("ref_confined_left_of_midpoint", nullity, 1e-6));

    // norm constancy and channel orthogonality on a 7-point schedule
    let ts: Vec<f64> = (0..7).map(|i| 100.0 * i as f64).collect();
    let mut tr0 = 0.0;
    let mut rf0 = 0.0;
    let mut tr_drift = 0.0f64;
    let mut rf_drift = 0.0f64;
    let mut ortho = 0.0f64;
    for (i, &t) in ts.iter().enumerate() {
        let tr = synth.field(Channel::Tr, t, &xs)?;
        let rf = synth.field(Channel::Ref, t, &xs)?;
        let nt = overlap(&tr, &tr, dx).re;
        let nr = overlap(&rf, &rf, dx).re;
        if i == 0 {
            tr0 = nt;
            rf0 = nr;
        } else {
            tr_drift = tr_drift.max((nt - tr0).abs() / tr0);
            rf_drift = rf_drift.max((nr - rf0).abs() / rf0);
        }
        ortho = ortho.max(overlap(&tr, &rf, dx).norm() / (nt * nr).sqrt());
    }
    rows.push(check("tr_norm_drift", tr_drift, 1e-4));
    rows.push(check("ref_norm_drift", rf_drift, 1e-4));
    let ks = synth.packet.grid.points();
    let ptable = ParamTable::build(&pot, &ks, DERIVATIVE_STEP).map_err(num)?;
    let mean_t = channel_fraction(&ptable, Weight::T, &synth.packet).map_err(num)?;
    rows.push(check("tr_norm_matches_mean_T", (tr0 - mean_t).abs(), 1e-3));
    rows.push(check("channel_orthogonality", ortho, 1e-4));

    // stationary flux probes at the central wavenumber
    let params = tunneling_params(&pot, sc.k0()).map_err(num)?;
    let states = channel_states(&params, &pot).map_err(num)?;
    let probes: Vec<f64> = (0..64)
        .map(|i| xs[0] + (xs[xs.len() - 1] - xs[0]) * i as f64 / 63.0)
        .collect();
    let ref_flux = probes
        .iter()
        .map(|&x| states.rf.flux_at(x).abs())
        .fold(0.0, f64::max);
    rows.push(check("stationary_ref_flux", ref_flux, 1e-10));
    let tr_flux: Vec<f64> = probes.iter().map(|&x| states.tr.flux_at(x)).collect();
    let f_lo = tr_flux.iter().cloned().fold(f64::INFINITY, f64::min);
    let f_hi = tr_flux.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    rows.push(check(
        "stationary_tr_flux_variation",
        (f_hi - f_lo) / f_hi.abs().max(1e-300),
        1e-10,
    ));

    // cross-method distance against the finite-difference propagation
    let (fine, _) = refine_grid(&xs);
    let start = synth.field(Channel::Full, 0.0, &fine)?;
    let mut field = GridField::new(fine.clone(), start, 0.0).map_err(num)?;
    for t in [200.0, 400.0] {
        let steps = ((t - field.t) / ORACLE_DT_FS).round() as usize;
        field = propagate(&field, &pot, ORACLE_DT_FS, steps).map_err(num)?;
        let reference = synth.field(Channel::Full, t, &fine)?;
        let mut diff2 = 0.0;
        let mut ref2 = 0.0;
        for (a, b) in field.values.iter().zip(&reference) {
            diff2 += (a - b).norm_sqr();
            ref2 += b.norm_sqr();
        }
        let name = if t == 200.0 { "oracle_l2_t200fs" } else { "oracle_l2_t400fs" };
        rows.push(check(name, (diff2 / ref2).sqrt(), 1e-3));
    }

    let mut failed = 0;
    println!("{:<34} {:>13} {:>10}  verdict", "check", "measured", "bound");
    for r in &rows {
        if !r.pass {
            failed += 1;
        }
        println!(
            "{:<34} {:>13.3e} {:>10.0e}  {}",
            r.name,
            r.measured,
            r.bound,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    if failed > 0 {
        return Err(Failure {
            code: 1,
            msg: format!("validation failure: {failed} of {} checks failed", rows.len()),
        });
    }
    println!("all {} checks passed", rows.len());
    Ok(())
}
