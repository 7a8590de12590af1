use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use binbond::curve::compute_curve;
use binbond::error::{CliError, Result};
use binbond::presets::{preset, preset_text};
use binbond::price::{price_scenario, render_jsonl, render_text};
use binbond::scenario::Scenario;
use binbond::validate::{render_table, validate_scenario, ValidateOptions};
use binbond_core::mc::SimConfig;
use binbond_core::pricer::PricerConfig;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "binbond", version, about = "Defaultable zero-coupon bond pricing under discrete default information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price the scenario at each evaluation time
    Price {
        /// Scenario file
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write a (t, quantity) curve per sweep value as CSV
    Curve {
        /// Scenario file (required with `--figure custom`)
        file: Option<PathBuf>,
        /// Figure preset 1..18, or `custom` to use FILE
        #[arg(long, default_value = "custom")]
        figure: String,
        /// Output path (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the closed form with the PDE and Monte Carlo oracles
    Validate {
        /// Scenario file
        file: PathBuf,
        /// Spatial nodes of the PDE grid
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        /// PDE time steps per interval (defaults to --grid)
        #[arg(long)]
        time_steps: Option<usize>,
        /// Monte Carlo paths
        #[arg(long, default_value_t = 1_000_000)]
        paths: u64,
        /// Monte Carlo seed
        #[arg(long, default_value_t = SimConfig::default().seed)]
        seed: u64,
        /// Disable antithetic pairing
        #[arg(long)]
        no_antithetic: bool,
        /// Largest accepted |closed - PDE|
        #[arg(long, default_value_t = 1e-3)]
        pde_tol: f64,
        /// Largest accepted |closed - MC| in standard errors
        #[arg(long, default_value_t = 3.0)]
        sigmas: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the bundled scenario for a figure
    Preset {
        /// Figure number 1..18
        figure: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = PricerConfig::default();
    match cli.command {
        Command::Price { file, format } => {
            let records = price_scenario(&Scenario::load(&file)?, &cfg)?;
            let text = match format {
                Format::Text => render_text(&records),
                Format::Jsonl => render_jsonl(&records),
            };
            write_out(None, &text)
        }
        Command::Curve { file, figure, output } => {
            let scenario = match (figure.as_str(), file) {
                ("custom", Some(f)) => Scenario::load(&f)?,
                ("custom", None) => return Err(CliError::Scenario("`--figure custom` needs a scenario file".into())),
                (n, None) => {
                    let n = n.parse().map_err(|_| CliError::Scenario(format!("unknown figure `{n}`")))?;
                    preset(n)?
                }
                (_, Some(_)) => {
                    return Err(CliError::Scenario("give either a scenario file or a figure preset, not both".into()));
                }
            };
            let curve = compute_curve(&scenario, &cfg)?;
            for w in &curve.warnings {
                eprintln!("warning: {w}");
            }
            write_out(output.as_ref(), &curve.to_csv()?)
        }
        Command::Validate { file, grid, time_steps, paths, seed, no_antithetic, pde_tol, sigmas, format } => {
            if paths == 0 {
                return Err(CliError::Scenario("--paths must be positive".into()));
            }
            let opts = ValidateOptions {
                n_space: grid,
                n_time: time_steps.unwrap_or(grid),
                sim: SimConfig { n_paths: paths, seed, antithetic: !no_antithetic, ..SimConfig::default() },
                pde_tolerance: pde_tol,
                sigmas,
            };
            let rows = validate_scenario(&Scenario::load(&file)?, &opts, &cfg)?;
            let text = match format {
                Format::Text => render_table(&rows, &opts),
                Format::Jsonl => {
                    rows.iter().map(|r| serde_json::to_string(r).expect("rows serialize") + "\n").collect()
                }
            };
            write_out(None, &text)?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(CliError::Accuracy(format!("{failed} of {} comparisons outside tolerance", rows.len())));
            }
            Ok(())
        }
        Command::Preset { figure } => write_out(None, preset_text(figure)?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.to_record()).expect("error record serializes"));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
