//! Command-line front end: builds surfaces, verifies them and writes mesh
//! files and JSON reports.

pub mod export;
pub mod run;

pub use run::{config_dump, run_build, run_report, run_verify, BuildRequest, CliError};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "S3MIN_THREADS";

/// Thread pool for a command: one thread in deterministic mode, otherwise
/// the count from [`THREADS_ENV`] or rayon's default.
pub fn thread_pool(deterministic: bool) -> Result<rayon::ThreadPool, CliError> {
    let threads = if deterministic {
        1
    } else {
        match std::env::var(THREADS_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("{THREADS_ENV}={s:?} is not a thread count")))?,
            Err(_) => 0,
        }
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Usage(e.to_string()))
}
