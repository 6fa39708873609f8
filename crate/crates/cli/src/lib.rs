//! Configuration, sweep orchestration and CSV output for the `photon-dimer`
//! command line tool.

pub mod config;
pub mod sweep;

pub use config::{Config, ConfigError};
pub use sweep::{run, Observable, SweepSpec, Table};

/// Environment variable bounding the number of worker threads.
pub const THREADS_ENV: &str = "PHOTON_DIMER_THREADS";

/// Reads [`THREADS_ENV`]; `None` means one worker per core.
pub fn threads_from_env() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_ENV} must be a positive integer, found {s:?}"
            )),
        },
    }
}
