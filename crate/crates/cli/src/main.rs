use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curvswim::scenarios::TriangleSpec;
use curvswim_cli::checks::{run_suite, CheckOptions};
use curvswim_cli::commands::{self, SweepVariable};
use curvswim_cli::config::{Format, RunConfig};
use curvswim_cli::record::{emit, to_json};
use curvswim_cli::CliError;

#[derive(Parser)]
#[command(name = "curvswim", version, about = "Swimming of point-mass bodies on curved surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Io {
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to the config's `outputs.path`, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Infinitesimal-stroke holonomy for the configured loop area.
    Holonomy {
        #[command(flatten)]
        io: Io,
    },
    /// Integrate one finite stroke.
    Integrate {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Formula and integrator over a list of values, as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        variable: SweepVariable,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        values: Vec<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form triangle swimmer.
    Triangle {
        #[arg(long = "M", default_value_t = 1.0)]
        total_mass: f64,
        #[arg(long, default_value_t = 0.25)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long = "R", default_value_t = 1.0, allow_hyphen_values = true)]
        r: f64,
        #[arg(long, default_value_t = 0.1)]
        db: f64,
        #[arg(long, default_value_t = 0.1)]
        dh: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split-and-recombine swimmer on a ring.
    Ring {
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        #[arg(long)]
        m1: f64,
        #[arg(long)]
        m2: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Check {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Perturb a Killing field; the Killing check must then fail.
        #[arg(long)]
        fault_injection: bool,
        /// Only the checks on the flat plane.
        #[arg(long)]
        flat: bool,
    },
}

fn resolve(io: &Io, cfg: &RunConfig) -> (Format, Option<PathBuf>) {
    let format = io.format.or(cfg.format()).unwrap_or_default();
    let out = io.out.clone().or_else(|| cfg.output_path().map(PathBuf::from));
    (format, out)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Holonomy { io } => {
            let cfg = RunConfig::load(&io.config)?;
            let (format, out) = resolve(&io, &cfg);
            let rec = commands::holonomy(&cfg)?;
            emit(&commands::render_holonomy(&rec, format)?, out.as_deref())
        }
        Command::Integrate { io, steps } => {
            let cfg = RunConfig::load(&io.config)?;
            let (format, out) = resolve(&io, &cfg);
            emit(&commands::integrate(&cfg, steps, format)?, out.as_deref())
        }
        Command::Sweep { config, variable, values, steps, out } => {
            let cfg = RunConfig::load(&config)?;
            let out = out.or_else(|| cfg.output_path().map(PathBuf::from));
            emit(&commands::sweep(&cfg, variable, &values, steps)?, out.as_deref())
        }
        Command::Triangle { total_mass, m, h, b, r, db, dh, out } => {
            let t = TriangleSpec { total_mass, base_mass: m, height: h, base: b };
            emit(&to_json(&commands::triangle(&t, r, db, dh)?)?, out.as_deref())
        }
        Command::Ring { length, m1, m2, out } => {
            emit(&to_json(&commands::ring(length, m1, m2)?)?, out.as_deref())
        }
        Command::Check { seed, fault_injection, flat } => {
            let opts = CheckOptions { seed, fault_injection, flat_only: flat };
            let outcomes = run_suite(&opts);
            for o in &outcomes {
                println!("{}", o.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed > 0 {
                return Err(CliError::ChecksFailed { failed, total: outcomes.len() });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("curvswim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
