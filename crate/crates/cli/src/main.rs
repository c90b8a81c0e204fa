use std::io;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use commands::{Report, Sweep};

#[derive(Parser, Debug)]
#[command(name = "linesearch", version, about = "Optimal strategies for bounded search on a line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Smallest ratio Lambda / lambda of a log-spaced sweep.
    #[arg(long, requires_all = ["rho_max", "points"])]
    rho_min: Option<f64>,
    #[arg(long, requires = "rho_min")]
    rho_max: Option<f64>,
    #[arg(long, requires = "rho_min")]
    points: Option<usize>,
}

impl SweepArgs {
    fn sweep(&self) -> Option<Sweep> {
        Some(Sweep {
            rho_min: self.rho_min?,
            rho_max: self.rho_max?,
            points: self.points?,
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal turn points and competitive ratio.
    Optimal {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long = "Lambda", required_unless_present_any = ["log2_rho", "rho_min"])]
        upper: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// Give the ratio as log2(Lambda / lambda); reports the ratio only.
        #[arg(long, conflicts_with_all = ["upper", "rho_min"])]
        log2_rho: Option<f64>,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Largest Lambda reachable within a ratio budget.
    Reach {
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Cross-check the optimum against the simulator and baseline strategies.
    Verify {
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long = "Lambda", required_unless_present = "rho_min")]
        upper: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        grid_points: usize,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Feasibility and worst-case ratio of an m-ray family member.
    Mray {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Defaults to the point where a = 0 is within 1e-6 of its limit.
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn emit(report: &Report, format: Format) -> Result<()> {
    let stdout = io::stdout().lock();
    match format {
        Format::Json => output::write_json(stdout, &report.record)?,
        Format::Csv => output::write_csv(stdout, &report.header, &report.rows)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    let (report, format) = match cli.command {
        Command::Optimal { lambda, upper, eps, log2_rho, sweep, format } => {
            if let Some(sweep) = sweep.sweep() {
                (commands::optimal_sweep(lambda, eps, sweep)?, format.unwrap_or(Format::Csv))
            } else if let Some(l) = log2_rho {
                (commands::optimal_log2(l, eps)?, format.unwrap_or(Format::Json))
            } else if let Some(upper) = upper {
                (commands::optimal(lambda, upper, eps)?, format.unwrap_or(Format::Json))
            } else {
                bail!("one of --Lambda, --log2-rho or --rho-min is required");
            }
        }
        Command::Reach { ratio, lambda, format } => (commands::reach(ratio, lambda)?, format.unwrap_or(Format::Json)),
        Command::Verify { lambda, upper, eps, grid_points, sweep, format } => {
            if let Some(sweep) = sweep.sweep() {
                (commands::verify_sweep(lambda, eps, grid_points, sweep)?, format.unwrap_or(Format::Csv))
            } else if let Some(upper) = upper {
                (commands::verify(lambda, upper, eps, grid_points)?, format.unwrap_or(Format::Json))
            } else {
                bail!("one of --Lambda or --rho-min is required");
            }
        }
        Command::Mray { m, a, b, lambda, horizon, format } => {
            let report = commands::mray(m, a, b, lambda, horizon)?;
            if let Some(err) = report.record.diagnostics.get("error").and_then(|e| e.as_str()) {
                eprintln!("error: {err}");
            }
            (report, format.unwrap_or(Format::Json))
        }
    };
    emit(&report, format)?;
    Ok(report.ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LINESEARCH_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
