//! Command-line front end: JSON configurations in, JSON reports and CSV
//! tables out.

pub mod commands;
pub mod config;
mod error;

use std::path::PathBuf;

use clap::Parser;

pub use commands::{run_command, Command, Options, Outcome};
pub use config::{parse_config, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "vortex-images", version, about = "Point-vortex flows past circular cylinders")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Truncation level N.
    #[arg(long, conflicts_with = "tol")]
    pub level: Option<usize>,
    /// Target error; picks the smallest certified level.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Boundary distance used by the error certificate.
    #[arg(long)]
    pub min_distance: Option<f64>,
    /// Evaluation points as JSON, e.g. '[[0.5,-1.5],[2.5,3.5]]'.
    #[arg(long)]
    pub points: Option<String>,
    /// Grid box `xmin,xmax,ymin,ymax`.
    #[arg(long, allow_hyphen_values = true)]
    pub bbox: Option<String>,
    /// Grid resolution `NX,NY`.
    #[arg(long)]
    pub res: Option<String>,
    /// Quadrature nodes per contour.
    #[arg(long)]
    pub nq: Option<usize>,
    /// Advection time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of advection steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Worker threads for data-parallel steps. Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Refuse configurations without a convergence guarantee.
    #[arg(long)]
    pub strict: bool,
    /// Include velocities in `eval` and `grid` output.
    #[arg(long)]
    pub velocity: bool,
    /// Write the primary output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

fn parse_list<T: std::str::FromStr, const N: usize>(flag: &str, text: &str) -> Result<[T; N], CliError> {
    let parts: Vec<T> = text
        .split(',')
        .map(|s| s.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("--{flag}: cannot parse {text:?}")))?;
    parts
        .try_into()
        .map_err(|_| usage(format!("--{flag}: expected {N} comma-separated values, got {text:?}")))
}

impl Cli {
    pub fn options(&self) -> Result<Options, CliError> {
        let positive = |flag: &str, v: Option<f64>| match v {
            Some(x) if !(x > 0.0 && x.is_finite()) => Err(usage(format!("--{flag} must be positive"))),
            _ => Ok(v),
        };
        let points = match &self.points {
            Some(text) => Some(
                serde_json::from_str::<Vec<[f64; 2]>>(text)
                    .map_err(|e| usage(format!("--points: {e}")))?,
            ),
            None => None,
        };
        let bbox = match &self.bbox {
            Some(t) => {
                let b = parse_list::<f64, 4>("bbox", t)?;
                config::check_bbox(&b).map_err(|m| usage(format!("--bbox: {m}")))?;
                Some(b)
            }
            None => None,
        };
        let res = match &self.res {
            Some(t) => {
                let r = parse_list::<usize, 2>("res", t)?;
                config::check_resolution(&r).map_err(|m| usage(format!("--res: {m}")))?;
                Some(r)
            }
            None => None,
        };
        if self.nq == Some(0) || self.steps == Some(0) || self.threads == Some(0) {
            return Err(usage("--nq, --steps and --threads must be positive".into()));
        }
        Ok(Options {
            level: self.level,
            tol: positive("tol", self.tol)?,
            min_distance: positive("min-distance", self.min_distance)?,
            points,
            bbox,
            res,
            nq: self.nq,
            dt: positive("dt", self.dt)?,
            steps: self.steps,
            strict: self.strict,
            velocity: self.velocity,
        })
    }
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let opts = cli.options()?;
    let config = cli.config.as_ref().map(load_config).transpose()?;
    let outcome = run_command(cli.command, config.as_ref(), &opts)?;
    if let Some(path) = &cli.out {
        std::fs::write(path, &outcome.output).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(outcome)
}

/// Runs one invocation and returns the process exit code: 0 on success, 1
/// for computation failures, 2 for input errors.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        // only fails if a pool already exists, in which case it is reused
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(outcome) => {
            if cli.out.is_none() {
                print!("{}", outcome.output);
            }
            for d in &outcome.diagnostics {
                eprintln!("{d}");
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
