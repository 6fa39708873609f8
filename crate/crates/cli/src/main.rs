use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use photon_dimer_cli::{run, threads_from_env, Config, Observable, SweepSpec};

/// Two-photon scattering off a waveguide-coupled Bose-Hubbard dimer.
///
/// Every subcommand evaluates one observable on a parameter grid and writes
/// CSV. Settings come from `--config`, then subcommand flags, then `--set`.
/// Exit status: 0 on success, 2 if any point carried a warning, 1 on error.
#[derive(Parser, Debug)]
#[command(name = "photon-dimer", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration key (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Write CSV here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single-photon reflection and transmission versus energy.
    Scan1 {
        #[arg(long, allow_hyphen_values = true)]
        emin: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        emax: Option<String>,
        #[arg(long)]
        n: Option<String>,
    },
    /// |S_RR|^2 of the bound part on a (dk, dp) grid.
    Smap {
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        /// Squared waveguide coupling.
        #[arg(long)]
        v2: Option<String>,
        #[arg(long)]
        n: Option<String>,
    },
    /// Correlations of the incoming two-photon state versus dk.
    Initg2 {
        #[arg(long = "dk-min", allow_hyphen_values = true)]
        dk_min: Option<String>,
        #[arg(long = "dk-max", allow_hyphen_values = true)]
        dk_max: Option<String>,
    },
    /// Two-photon scattering probabilities.
    Probs(SweepFlags),
    /// Transmitted zero-delay correlation.
    G2(SweepFlags),
    /// Integrated bound-part weight versus delta.
    Sbar {
        /// Squared waveguide coupling (list allowed).
        #[arg(long)]
        v2: Option<String>,
    },
    /// Scattering probabilities with cavity loss.
    Loss {
        /// Comma-separated bath loss rates.
        #[arg(long = "gamma-list")]
        gamma_list: Option<String>,
    },
    /// Steady state of the driven, damped dimer.
    Lindblad {
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long)]
        omega: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        nmax: Option<String>,
    },
    /// Two-excitation cavity amplitudes of the scattering state.
    Excite(SweepFlags),
}

#[derive(Args, Debug)]
struct SweepFlags {
    /// delta, u, dk or gamma.
    #[arg(long)]
    sweep: Option<String>,
    /// resonant, zero or a number (list allowed).
    #[arg(long = "dk-mode")]
    dk_mode: Option<String>,
}

impl Command {
    fn observable(&self) -> Observable {
        match self {
            Command::Scan1 { .. } => Observable::Scan1,
            Command::Smap { .. } => Observable::Smap,
            Command::Initg2 { .. } => Observable::Initg2,
            Command::Probs(_) => Observable::Probs,
            Command::G2(_) => Observable::G2,
            Command::Sbar { .. } => Observable::Sbar,
            Command::Loss { .. } => Observable::Loss,
            Command::Lindblad { .. } => Observable::Lindblad,
            Command::Excite(_) => Observable::Excite,
        }
    }

    /// Subcommand flags as configuration keys.
    fn overrides(&self) -> Vec<(&'static str, &String)> {
        let pairs: Vec<(&'static str, &Option<String>)> = match self {
            Command::Scan1 { emin, emax, n } => vec![("emin", emin), ("emax", emax), ("n", n)],
            Command::Smap { delta, u, v2, n } => {
                vec![("delta", delta), ("u", u), ("vsq", v2), ("n", n)]
            }
            Command::Initg2 { dk_min, dk_max } => vec![("dk_min", dk_min), ("dk_max", dk_max)],
            Command::Probs(f) | Command::G2(f) | Command::Excite(f) => {
                vec![("sweep", &f.sweep), ("dk_mode", &f.dk_mode)]
            }
            Command::Sbar { v2 } => vec![("vsq", v2)],
            Command::Loss { gamma_list } => vec![("gamma_bath", gamma_list)],
            Command::Lindblad {
                sweep,
                u,
                omega,
                gamma,
                nmax,
            } => vec![
                ("sweep", sweep),
                ("u", u),
                ("omega", omega),
                ("gamma", gamma),
                ("nmax", nmax),
            ],
        };
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
            .collect()
    }
}

fn execute(cli: &Cli) -> Result<bool, String> {
    let mut cfg = match &cli.common.config {
        Some(path) => Config::load(path).map_err(|e| e.to_string())?,
        None => Config::default(),
    };
    for (key, value) in cli.command.overrides() {
        cfg.set_value(key, value).map_err(|e| e.to_string())?;
    }
    for s in &cli.common.set {
        cfg.set(s).map_err(|e| e.to_string())?;
    }
    let spec = SweepSpec::from_config(cli.command.observable(), &cfg).map_err(|e| e.to_string())?;
    let threads = threads_from_env()?;
    let table = run(&spec, threads).map_err(|e| e.to_string())?;

    let csv = table.to_csv();
    match &cli.common.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| format!("{}: {e}", path.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(csv.as_bytes()).map_err(|e| e.to_string())?;
            out.flush().map_err(|e| e.to_string())?;
        }
    }
    for (row, w) in table.warnings() {
        eprintln!("warning: row {}: {w}", row + 1);
    }
    let flagged = table.status.iter().filter(|s| s.flagged).count();
    if flagged > 0 {
        eprintln!(
            "warning: {flagged} row(s) exceeded the quadrature error threshold (see rel_error)"
        );
    }
    Ok(table.clean())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
