use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use exergy::error::Error;
use exergy::fluid_state::{celsius_to_kelvin, DeadState};
use exergy::plant_file;
use exergy::report::{self, OutputFormat};

#[derive(Parser)]
#[command(name = "exergy", version, about = "Exergy analysis of component-network thermodynamic plants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a plant file and print the exergy report.
    Analyze {
        plant_file: PathBuf,
        #[command(flatten)]
        format: FormatArg,
        /// Override the dead-state temperature (degC).
        #[arg(long = "t0-c", allow_negative_numbers = true)]
        t0_c: Option<f64>,
        /// Override the dead-state pressure (kPa).
        #[arg(long = "p0-kpa")]
        p0_kpa: Option<f64>,
    },
    /// Analyze across a range of dead-state temperatures.
    Sweep {
        plant_file: PathBuf,
        #[arg(long = "t0-from-c", allow_negative_numbers = true)]
        t0_from_c: f64,
        #[arg(long = "t0-to-c", allow_negative_numbers = true)]
        t0_to_c: f64,
        #[arg(long = "t0-step-c", allow_negative_numbers = true)]
        t0_step_c: f64,
        /// Dead-state pressure held fixed over the sweep (kPa).
        #[arg(long = "p0-kpa")]
        p0_kpa: Option<f64>,
        #[command(flatten)]
        format: FormatArg,
    },
    /// List all validation findings for a plant file.
    Validate { plant_file: PathBuf },
}

#[derive(Args)]
struct FormatArg {
    /// Output format: table, csv or json.
    #[arg(long, default_value = "table")]
    format: String,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io { .. } | Error::Parse { .. } | Error::UnknownFormat(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run() -> exergy::Result<ExitCode> {
    match Cli::parse().command {
        Command::Analyze {
            plant_file,
            format,
            t0_c,
            p0_kpa,
        } => {
            let format: OutputFormat = format.format.parse()?;
            let loaded = plant_file::load_plant(&plant_file)?;
            let baseline = *loaded.plant.dead_state();
            let plant = match (t0_c, p0_kpa) {
                (None, None) => loaded.plant,
                (t0, p0) => {
                    let dead_state = DeadState::new(
                        p0.unwrap_or(baseline.p0_kpa),
                        t0.map(celsius_to_kelvin).unwrap_or(baseline.t0_k),
                    )?;
                    if dead_state == baseline {
                        loaded.plant
                    } else {
                        report::reevaluate_at(&loaded.plant, &loaded.tables, dead_state)?
                    }
                }
            };
            let rendered = report::render_report(&plant.analyze()?, format)?;
            print!("{rendered}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            plant_file,
            t0_from_c,
            t0_to_c,
            t0_step_c,
            p0_kpa,
            format,
        } => {
            let format: OutputFormat = format.format.parse()?;
            let loaded = plant_file::load_plant(&plant_file)?;
            if !(t0_step_c > 0.0) {
                return Err(Error::UnorderedSweep);
            }
            let mut t0s = Vec::new();
            let mut i = 0u32;
            loop {
                let t_c = t0_from_c + t0_step_c * f64::from(i);
                if t_c > t0_to_c + 1e-9 {
                    break;
                }
                t0s.push(celsius_to_kelvin(t_c));
                i += 1;
            }
            let p0 = p0_kpa.unwrap_or(loaded.plant.dead_state().p0_kpa);
            let series = report::sweep_dead_state(&loaded.plant, &loaded.tables, &t0s, p0)?;
            let rendered = report::render_sweep(&series, format)?;
            print!("{rendered}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { plant_file } => {
            let file = plant_file::parse_plant_file(&plant_file)?;
            let findings = plant_file::diagnose(&file);
            if findings.is_empty() {
                println!("ok: no violations");
                Ok(ExitCode::SUCCESS)
            } else {
                for finding in &findings {
                    println!("violation: {finding}");
                }
                Ok(ExitCode::from(1))
            }
        }
    }
}
