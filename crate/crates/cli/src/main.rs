use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use qchaos_cli::presets::{preset, Scale};
use qchaos_cli::{execute, parse_run_spec, verify, worker_count};

#[derive(Parser)]
#[command(
    name = "qchaos",
    version,
    about = "Localized-to-chaotic crossover experiments for qubit arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML run spec.
    Run {
        spec: PathBuf,
        /// Output directory (overrides the spec's output.dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named preset.
    Preset {
        name: String,
        #[arg(long, value_enum, default_value = "reduced")]
        scale: Scale,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of disorder realizations.
        #[arg(long)]
        realizations: Option<usize>,
    },
    /// Check config hashes and file digests of an output directory.
    Verify { dir: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            for cause in e.chain().skip(1) {
                eprintln!("  caused by: {cause}");
            }
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { spec, out } => {
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let spec = parse_run_spec(&text)?;
            let dir = out
                .or_else(|| spec.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("qchaos-out"));
            execute(&spec, &dir, worker_count()?)
        }
        Command::Preset {
            name,
            scale,
            seed,
            out,
            realizations,
        } => {
            let mut spec = preset(&name, scale, seed)?;
            if let Some(r) = realizations {
                spec.realizations = r;
            }
            let dir = out.unwrap_or_else(|| PathBuf::from(format!("qchaos-out/{name}")));
            execute(&spec, &dir, worker_count()?)
        }
        Command::Verify { dir } => {
            let report = verify(&dir)?;
            println!(
                "ok: {} files match config hash {}",
                report.files_checked, report.config_hash
            );
            Ok(())
        }
    }
}
