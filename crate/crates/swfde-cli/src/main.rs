//! Command-line front end for the swfde toolkit.
//!
//! Exit codes are a contract shared by all subcommands:
//! 0 success / feasible, 1 input error, 2 infeasible (or failed trials),
//! 3 trajectory divergence. Logging goes through the `SWFDE_LOG`
//! environment variable (`error`, `info`, `debug`).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use swfde::certify::{certify_system, compare_criteria, CertificateFile};
use swfde::simulate::{simulate_with, Psi, Trajectory};
use swfde::switching::{generate_adt_signal, periodic_signal, validate_adt, AdtSpec, SwitchingSignal};
use swfde::system::{InitialHistory, Mode, PhiFile, SectorSubsystem, SwitchedSystem};
use swfde::verify::{monte_carlo_ges_with, McOptions};
use swfde::{builtin, Error, Result};

#[derive(Parser)]
#[command(
    name = "swfde",
    version,
    about = "Stability certificates and simulation for switched time-delay systems",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a positive-vector stability certificate for a system spec.
    ///
    /// Prints the decay rate, the mode mismatch, and the dwell-time
    /// threshold; exits 0 when feasible, 2 when infeasible.
    Certify {
        /// System spec file (JSON).
        spec: PathBuf,
        /// Write the certificate as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the system along a switching signal and export a CSV.
    #[command(group(
        ArgGroup::new("signal_source").required(true).args(["signal", "periodic", "adt"])
    ))]
    Simulate {
        /// System spec file (JSON).
        spec: PathBuf,
        /// Read the switching signal from a CSV file.
        #[arg(long)]
        signal: Option<PathBuf>,
        /// Cycle through the modes with this switching period.
        #[arg(long, value_name = "T")]
        periodic: Option<f64>,
        /// Generate a random signal with this average dwell time.
        #[arg(long, value_name = "TAU")]
        adt: Option<f64>,
        /// Chatter bound for --adt.
        #[arg(long, value_name = "K", default_value_t = 1.0)]
        n0: f64,
        /// Seed for --adt signal generation.
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
        /// Initial history: a registered name or a JSON file with
        /// {"thetas": [...], "states": [[...], ...]}. Defaults to the spec's
        /// embedded history.
        #[arg(long, value_name = "NAME|FILE")]
        phi: Option<String>,
        /// Registered sector nonlinearity, required for sector modes.
        #[arg(long, value_name = "NAME")]
        psi: Option<String>,
        #[arg(long, value_name = "H", default_value_t = 30.0)]
        horizon: f64,
        #[arg(long, value_name = "D", default_value_t = 1e-3)]
        dt: f64,
        /// Trajectory CSV output path.
        #[arg(long)]
        out: PathBuf,
        /// Also write a downsampled CSV (at most 2000 rows) for plotting.
        #[arg(long, value_name = "FILE")]
        plot_data: Option<PathBuf>,
    },
    /// Monte-Carlo check of a certificate against simulated trajectories.
    ///
    /// Exits 0 when every trial meets its envelope, 2 otherwise.
    Verify {
        /// System spec file (JSON).
        spec: PathBuf,
        /// Certificate JSON produced by `certify --out`.
        #[arg(long)]
        cert: PathBuf,
        /// Average dwell time of the admitted signals; must exceed the
        /// certificate's threshold.
        #[arg(long, value_name = "T")]
        tau_a: f64,
        /// Chatter bound.
        #[arg(long, value_name = "K", default_value_t = 1.0)]
        n0: f64,
        #[arg(long, value_name = "M", default_value_t = 50)]
        trials: usize,
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
        /// Registered sector nonlinearity, required for sector modes.
        #[arg(long, value_name = "NAME")]
        psi: Option<String>,
        #[arg(long, value_name = "H", default_value_t = 30.0)]
        horizon: f64,
        #[arg(long, value_name = "D", default_value_t = 1e-3)]
        dt: f64,
        /// Worker threads for the trials.
        #[arg(long, value_name = "K", default_value_t = 1)]
        jobs: usize,
    },
    /// Generate a random switching signal under an average-dwell-time
    /// constraint and write it as CSV.
    GenSignal {
        #[arg(long, value_name = "T")]
        tau_a: f64,
        #[arg(long, value_name = "K")]
        n0: f64,
        /// Number of modes to draw from.
        #[arg(long, value_name = "N")]
        modes: usize,
        #[arg(long, value_name = "H")]
        horizon: f64,
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the delay-bound criteria for a sector system: per-mode
    /// bounds against the pooled and pairwise alternatives.
    ///
    /// Exits 0 when the per-mode criterion is feasible, 2 otherwise.
    Compare {
        /// System spec file (JSON) whose modes are all sector modes.
        spec: PathBuf,
    },
}

/// Restore the default SIGPIPE disposition so that piping into `head` or a
/// closed pager terminates the process quietly instead of panicking on the
/// next stdout write.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SWFDE_LOG", "error"))
        .init();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Divergence { .. } => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Certify { spec, out } => cmd_certify(&spec, out.as_deref()),
        Command::Simulate {
            spec,
            signal,
            periodic,
            adt,
            n0,
            seed,
            phi,
            psi,
            horizon,
            dt,
            out,
            plot_data,
        } => cmd_simulate(
            &spec,
            signal.as_deref(),
            periodic,
            adt,
            n0,
            seed,
            phi.as_deref(),
            psi.as_deref(),
            horizon,
            dt,
            &out,
            plot_data.as_deref(),
        ),
        Command::Verify { spec, cert, tau_a, n0, trials, seed, psi, horizon, dt, jobs } => {
            cmd_verify(&spec, &cert, tau_a, n0, trials, seed, psi.as_deref(), horizon, dt, jobs)
        }
        Command::GenSignal { tau_a, n0, modes, horizon, seed, out } => {
            cmd_gen_signal(tau_a, n0, modes, horizon, seed, &out)
        }
        Command::Compare { spec } => cmd_compare(&spec),
    }
}

fn cmd_certify(spec: &Path, out: Option<&Path>) -> Result<u8> {
    let (sys, _) = swfde::load_system(spec)?;
    let report = certify_system(&sys)?;
    for note in &report.notes {
        println!("note: {note}");
    }
    if let Some(path) = out {
        fs::write(path, CertificateFile::from_report(&report).to_json())?;
        println!("certificate written to {}", path.display());
    }
    match &report.certificate {
        Some(cert) => {
            for (k, xi) in cert.xi.iter().enumerate() {
                let entries: Vec<String> =
                    xi.iter().map(|v| format!("{v:.6}")).collect();
                println!("xi[{}] = ({})", k + 1, entries.join(", "));
            }
            println!("alpha     = {:.6}", cert.alpha);
            println!("gamma     = {:.6}", cert.gamma);
            println!("tau_star  = {:.6}", cert.tau_star);
            if cert.tau_star == 0.0 {
                println!(
                    "verdict: exponentially stable for every switching signal \
                     (no dwell-time restriction)"
                );
            } else {
                println!(
                    "verdict: exponentially stable for every switching signal with \
                     average dwell time above {:.6}",
                    cert.tau_star
                );
            }
            Ok(0)
        }
        None => {
            println!("infeasible: no positive-vector certificate for this system");
            Ok(2)
        }
    }
}

fn resolve_phi(arg: Option<&str>, embedded: Option<InitialHistory>) -> Result<InitialHistory> {
    let Some(name) = arg else {
        return embedded.ok_or_else(|| {
            Error::Argument(
                "the spec embeds no initial history; pass --phi <name|file>".into(),
            )
        });
    };
    if let Some(phi) = builtin::phi(name) {
        return Ok(phi);
    }
    let path = Path::new(name);
    if path.exists() {
        let text = fs::read_to_string(path)?;
        let file: PhiFile = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("invalid history file: {e}")))?;
        return match file {
            PhiFile::Name(inner) => builtin::phi(&inner).ok_or_else(|| {
                Error::Argument(format!("unknown initial history name {inner:?}"))
            }),
            PhiFile::Samples { thetas, states } => InitialHistory::from_samples(thetas, states),
        };
    }
    Err(Error::Argument(format!(
        "unknown initial history {name:?} (registered names: {}) and no such file",
        builtin::PHI_NAMES.join(", ")
    )))
}

fn resolve_psi(arg: Option<&str>, sys: &SwitchedSystem) -> Result<Option<Psi>> {
    let has_sector = sys.modes().iter().any(|m| matches!(m, Mode::Sector(_)));
    match arg {
        Some(name) => builtin::psi(name).map(Some).ok_or_else(|| {
            Error::Argument(format!(
                "unknown nonlinearity {name:?} (registered names: {})",
                builtin::PSI_NAMES.join(", ")
            ))
        }),
        None if has_sector => Err(Error::Argument(format!(
            "this system has sector modes; pass --psi <name> (registered names: {})",
            builtin::PSI_NAMES.join(", ")
        ))),
        None => Ok(None),
    }
}

fn plot_csv(traj: &Trajectory, max_rows: usize) -> String {
    let m = traj.times.len();
    let stride = m.div_ceil(max_rows).max(1);
    let n = traj.dim();
    let mut out = String::from("t");
    for j in 1..=n {
        out.push_str(&format!(",x{j}"));
    }
    out.push_str(",mode\n");
    let mut write_row = |i: usize| {
        out.push_str(&format!("{:.6e}", traj.times[i]));
        for v in &traj.states[i] {
            out.push_str(&format!(",{v:.6e}"));
        }
        out.push_str(&format!(",{}\n", traj.modes[i]));
    };
    let mut last_written = 0;
    for i in (0..m).step_by(stride) {
        write_row(i);
        last_written = i;
    }
    if last_written != m - 1 {
        write_row(m - 1);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    spec: &Path,
    signal: Option<&Path>,
    periodic: Option<f64>,
    adt: Option<f64>,
    n0: f64,
    seed: u64,
    phi: Option<&str>,
    psi: Option<&str>,
    horizon: f64,
    dt: f64,
    out: &Path,
    plot_data: Option<&Path>,
) -> Result<u8> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::Argument(format!("horizon must be positive, got {horizon}")));
    }
    let (sys, embedded) = swfde::load_system(spec)?;
    let signal = if let Some(path) = signal {
        SwitchingSignal::from_csv(&fs::read_to_string(path)?)?
    } else if let Some(period) = periodic {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::Argument(format!("period must be positive, got {period}")));
        }
        periodic_signal(period, sys.mode_count(), horizon)
    } else {
        let adt_spec = AdtSpec { tau_a: adt.expect("clap group guarantees one source"), n0 };
        adt_spec.validate()?;
        generate_adt_signal(&adt_spec, sys.mode_count(), horizon, seed)
    };
    let phi = resolve_phi(phi, embedded)?;
    let psi = resolve_psi(psi, &sys)?;
    let traj = simulate_with(&sys, &signal, &phi, horizon, dt, psi.as_ref())?;
    for w in &traj.warnings {
        eprintln!("warning: {w}");
    }
    fs::write(out, traj.to_csv())?;
    println!("wrote {} rows to {}", traj.times.len(), out.display());
    if let Some(path) = plot_data {
        fs::write(path, plot_csv(&traj, 2000))?;
        println!("plot data written to {}", path.display());
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    spec: &Path,
    cert_path: &Path,
    tau_a: f64,
    n0: f64,
    trials: usize,
    seed: u64,
    psi: Option<&str>,
    horizon: f64,
    dt: f64,
    jobs: usize,
) -> Result<u8> {
    let (sys, _) = swfde::load_system(spec)?;
    let cert = CertificateFile::parse(&fs::read_to_string(cert_path)?)?.to_certificate()?;
    let adt_spec = AdtSpec { tau_a, n0 };
    let psi = resolve_psi(psi, &sys)?;
    let opts = McOptions { horizon, dt, psi, jobs };
    let summary = monte_carlo_ges_with(&sys, &cert, &adt_spec, trials, seed, &opts)?;
    for f in &summary.failures {
        eprintln!("trial {} (seed {}): {}", f.trial, f.seed, f.reason);
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    if summary.passes == summary.trials {
        println!("verdict: {}/{} trials met the envelope", summary.passes, summary.trials);
        Ok(0)
    } else {
        println!(
            "verdict: only {}/{} trials met the envelope",
            summary.passes, summary.trials
        );
        Ok(2)
    }
}

fn cmd_gen_signal(
    tau_a: f64,
    n0: f64,
    modes: usize,
    horizon: f64,
    seed: u64,
    out: &Path,
) -> Result<u8> {
    let spec = AdtSpec { tau_a, n0 };
    spec.validate()?;
    if modes == 0 {
        return Err(Error::Argument("at least one mode is required".into()));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::Argument(format!("horizon must be positive, got {horizon}")));
    }
    let signal = generate_adt_signal(&spec, modes, horizon, seed);
    let verdict = validate_adt(&signal, &spec, horizon);
    if !verdict.valid {
        return Err(Error::Argument(
            "generated signal failed self-validation; this is a bug".into(),
        ));
    }
    fs::write(out, signal.to_csv())?;
    println!(
        "wrote signal with {} switches over [0, {horizon}] to {}",
        signal.instants().len(),
        out.display()
    );
    Ok(0)
}

fn cmd_compare(spec: &Path) -> Result<u8> {
    let (sys, _) = swfde::load_system(spec)?;
    let sectors: Vec<SectorSubsystem> = sys
        .modes()
        .iter()
        .map(|m| match m {
            Mode::Sector(s) => Ok(s.clone()),
            other => Err(Error::Unsupported(format!(
                "the comparison table needs sector modes, found a {} mode",
                other.kind()
            ))),
        })
        .collect::<Result<_>>()?;
    let table = compare_criteria(&sectors)?;
    for row in table.rows() {
        let status = if row.feasible { "feasible  " } else { "infeasible" };
        match &row.zeta {
            Some(z) => {
                let entries: Vec<String> = z.iter().map(|v| format!("{v:.6}")).collect();
                println!("{status}  {}  zeta = ({})", row.label, entries.join(", "));
            }
            None => println!("{status}  {}", row.label),
        }
    }
    Ok(if table.per_mode.feasible { 0 } else { 2 })
}
