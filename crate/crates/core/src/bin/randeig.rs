use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use randeig::experiment::{run_experiment, verify_suite, ExperimentConfig, Format};

#[derive(Parser)]
#[command(
    name = "randeig",
    version,
    about = "Random eigenpairs of monotone maps on cones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every seed of the sweep and write report.json and CSV curves.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.dir` in the config.
        #[arg(long, env = "RANDEIG_OUT_DIR")]
        out: Option<PathBuf>,
        /// Comma-separated master seeds; overrides the sweep block.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        tol: Option<f64>,
        /// Only write this format (csv or json).
        #[arg(long)]
        format: Option<Format>,
    },
    /// Run the property checks and print one line per check.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> randeig::Result<i32> {
    match cli.command {
        Command::Solve {
            config,
            out,
            seeds,
            tol,
            format,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seeds) = seeds {
                cfg.sweep.seeds = Some(seeds);
            }
            if let Some(tol) = tol {
                cfg.solver.tol = tol;
            }
            if let Some(f) = format {
                cfg.output.formats = vec![f];
            }
            cfg.validate()?;
            let report = run_experiment(&cfg, out.as_deref())?;
            for r in &report.runs {
                let status = if r.converged {
                    "converged"
                } else {
                    "not converged"
                };
                let mut line = format!(
                    "seed {} base {}: {status} at depth {}",
                    r.seed, r.base, r.depth_reached
                );
                if let Some(l) = r.lyapunov {
                    line += &format!(", lyapunov {:.6} +/- {:.1e}", l.mean, l.stderr);
                }
                if let Some(reason) = &r.reason {
                    line += &format!(" ({reason})");
                }
                println!("{line}");
            }
            println!(
                "{}/{} runs converged",
                report.summary.converged, report.summary.runs
            );
            Ok(report.exit_code())
        }
        Command::Verify { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = verify_suite(&cfg)?;
            for c in &summary.checks {
                println!("{c}");
            }
            Ok(summary.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
