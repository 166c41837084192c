mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Grid;
use crate::config::{Overrides, RunConfig};

/// Numerical checks of the first-eigenvalue bound on plane quartics.
#[derive(Parser)]
#[command(name = "quartic", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// klein, fermat, cubic, conic, or a curve JSON file.
    #[arg(long)]
    curve: Option<String>,
    /// Refinement level of the base sphere.
    #[arg(long)]
    level: Option<u32>,
    /// Test-map parameter, default the minimizer (4 - √7)/9.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    /// induced, random, hyperbolic, or a conformal factor JSON file.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the embedding identities and the Gauss-Bonnet integrals.
    Verify {
        /// Verify a saved mesh instead of building one.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate F(a) in closed form and on the mesh.
    ScanEnergy {
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Find the projective transformation balancing the test map.
    Balance {
        #[command(flatten)]
        common: Common,
    },
    /// Lowest Laplace eigenvalues of the chosen metric.
    Spectrum {
        /// Number of eigenvalues, counting the zero eigenvalue.
        #[arg(long, default_value_t = 6)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Solve for the constant-curvature metric in the conformal class.
    Uniformize {
        #[arg(long, visible_alias = "targetK", default_value_t = -1.0, allow_hyphen_values = true)]
        target_k: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Table of the exact constants.
    BoundReport {
        #[command(flatten)]
        common: Common,
    },
    /// Run the chain lambda_1·Area <= Rayleigh quotient <= F(a1) on one or more metrics.
    FullTheorem {
        /// Number of metrics, with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[command(flatten)]
        common: Common,
    },
}

impl Common {
    fn config(&self) -> anyhow::Result<RunConfig> {
        RunConfig::load(
            self.config.as_deref(),
            Overrides {
                curve: self.curve.clone(),
                level: self.level,
                a: self.a,
                metric: self.metric.clone(),
                seed: self.seed,
                out: self.out.clone(),
            },
        )
    }
}

fn run(cli: Cli) -> anyhow::Result<commands::Failures> {
    match cli.command {
        Command::Verify { mesh, common } => commands::verify(&common.config()?, mesh.as_deref()),
        Command::ScanEnergy { from, to, step, common } => {
            commands::scan_energy(&common.config()?, Grid { from, to, step })
        }
        Command::Balance { common } => commands::balance(&common.config()?),
        Command::Spectrum { count, common } => commands::spectrum(&common.config()?, count),
        Command::Uniformize { target_k, common } => commands::uniformize(&common.config()?, target_k),
        Command::BoundReport { common } => commands::bound_report(&common.config()?),
        Command::FullTheorem { batch, common } => commands::full_theorem(&common.config()?, batch),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(fails) if fails.is_empty() => ExitCode::SUCCESS,
        Ok(fails) => {
            for f in fails {
                eprintln!("FAILED: {f}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
