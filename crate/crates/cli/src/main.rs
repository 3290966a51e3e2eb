//! `dpfilm`: batch front-end for energy evaluation, minimization, λ sweeps,
//! the thin-film limit experiment and the verification suites.
//!
//! Exit status is 0 when every requested check passes and every minimization
//! converges, 1 when one does not, 2 on usage or input errors.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "dpfilm", version, about = "Dipolar Ginzburg-Landau thin films")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; falls back to DPFILM_THREADS, then all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Zero-padding factor of in-plane transforms (1, 2 or 4).
    #[arg(long)]
    pub padding: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy breakdown of a stored field.
    Energy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        field: Option<PathBuf>,
        /// Parameters as JSON (the `params` block of a config).
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Minimize a planar energy on a domain.
    Minimize {
        #[command(flatten)]
        common: Common,
    },
    /// Minimize the layered 3D energy on a film.
    Minimize3d {
        #[command(flatten)]
        common: Common,
    },
    /// Multistart λ sweep with bisection for the crossing.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// ε, e.g. 2^-6.
        #[arg(long)]
        eps: Option<String>,
        /// λ values: a..b:step or a comma list.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Disc radius when no config gives a domain.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Run a verification suite or a single check.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: Option<String>,
        /// Random cases per check.
        #[arg(long)]
        cases: Option<usize>,
    },
    /// Thickness sequence toward the thin-film limit.
    Gioia {
        #[command(flatten)]
        common: Common,
    },
}

fn setup_threads(jobs: Option<usize>) -> anyhow::Result<()> {
    let jobs = match jobs {
        Some(j) => Some(j),
        None => match std::env::var("DPFILM_THREADS") {
            Ok(s) => Some(s.trim().parse().map_err(|_| anyhow::anyhow!("DPFILM_THREADS must be a positive integer, got {s:?}"))?),
            Err(_) => None,
        },
    };
    if let Some(j) = jobs {
        if j == 0 {
            anyhow::bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let common = match &cli.command {
            Command::Energy { common, .. }
            | Command::Minimize { common }
            | Command::Minimize3d { common }
            | Command::Sweep { common, .. }
            | Command::Verify { common, .. }
            | Command::Gioia { common } => common.clone(),
        };
        setup_threads(common.jobs)?;
        std::fs::create_dir_all(&common.out)?;
        match cli.command {
            Command::Energy { field, params, .. } => run::energy(&common, field, params),
            Command::Minimize { .. } => run::minimize(&common, false),
            Command::Minimize3d { .. } => run::minimize(&common, true),
            Command::Sweep { eps, lambda, gamma, radius, .. } => run::sweep(&common, eps, lambda, gamma, radius),
            Command::Verify { suite, cases, .. } => run::verify(&common, suite, cases),
            Command::Gioia { .. } => run::gioia(&common),
        }
    })();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
