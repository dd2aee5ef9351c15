//! Run specs, presets and artifact output for the `qchaos` command.

pub mod output;
pub mod presets;
pub mod runner;
pub mod spec;
pub mod svg;

use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};

pub use output::verify;
pub use spec::{parse_run_spec, RunSpec};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "QCHAOS_WORKERS";

pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("{WORKERS_ENV}={v:?} is not a count"))?;
            anyhow::ensure!(n > 0, "{WORKERS_ENV} must be positive");
            Ok(n)
        }
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Runs `spec` on a dedicated pool of `workers` threads and writes the
/// artifacts into `dir`.
pub fn execute(spec: &RunSpec, dir: &Path, workers: usize) -> Result<()> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let artifacts = pool.install(|| runner::run(spec))?;
    let experiment = serde_json::to_value(spec.experiment)?;
    artifacts.write(
        dir,
        spec,
        &[
            ("experiment", experiment.as_str().unwrap_or_default().to_string()),
            ("preset", spec.preset.clone().unwrap_or_default()),
            ("workers", workers.to_string()),
            ("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64())),
        ],
    )?;
    log::info!("wrote {} in {:.1}s", dir.display(), start.elapsed().as_secs_f64());
    Ok(())
}
