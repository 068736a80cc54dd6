use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use pnp_microgrid::harness::{self, tools};
use pnp_microgrid::plant::PlantModel;

/// Plug-and-play microgrid control toolkit.
#[derive(Parser)]
#[command(name = "pnpmg", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Qsl,
    Fullbus,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the reduced load-connected network as CSV.
    Reduce { scenario: String },
    /// Synthesize gains for the initial configuration.
    Design {
        scenario: String,
        /// Write gains.csv here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a scenario and write timeseries.csv, summary.csv, gains.csv.
    Run {
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        /// Exit nonzero if any acceptance check fails.
        #[arg(long)]
        check: bool,
    },
    /// Closed-loop attenuation at dq-frame frequencies (Hz).
    Analyze {
        scenario: String,
        #[arg(long, value_delimiter = ',', required = true)]
        freqs: Vec<f64>,
    },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Reduce { scenario } => {
            print!("{}", tools::reduce_csv(&harness::load(&scenario)?)?);
        }
        Cmd::Design { scenario, out } => {
            let gains = tools::design(&harness::load(&scenario)?)?;
            let csv = harness::gains_csv(&gains);
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join("gains.csv"), csv)?;
                }
                None => print!("{csv}"),
            }
        }
        Cmd::Run { scenario, out, dt, duration, model, check } => {
            let mut sc = harness::load(&scenario)?;
            if let Some(dt) = dt {
                sc.sim.dt_s = dt;
            }
            if let Some(d) = duration {
                sc.sim.duration_s = d;
            }
            if let Some(m) = model {
                sc.sim.model = match m {
                    ModelArg::Qsl => PlantModel::Qsl,
                    ModelArg::Fullbus => PlantModel::FullBus,
                };
            }
            sc.validate()?;
            let mut sim = harness::Simulation::new(&sc)?;
            let aborted = sim.run_to_end().err().map(|e| e.to_string());
            let gains = sim.gain_table();
            let output = harness::RunOutput {
                log: sim.log().clone(),
                outcomes: sim.outcomes().to_vec(),
                flags: sim.flags().to_vec(),
                initial_certified: sim.initial_certified(),
                aborted: aborted.clone(),
            };
            let rep = harness::report(&output, &sc);
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            harness::emit_csv(&output.log, &out.join("timeseries.csv"))?;
            std::fs::write(out.join("summary.csv"), rep.to_csv_string())?;
            std::fs::write(out.join("gains.csv"), harness::gains_csv(&gains))?;
            if let Some(a) = aborted {
                eprintln!("run aborted: {a}");
            }
            let fails = rep.failures();
            for f in &fails {
                eprintln!("FAIL {} [{}] = {}", f.metric, f.scope, f.value);
            }
            println!("{} checks, {} failed", rep.rows.iter().filter(|r| r.status != harness::report::Status::Info).count(), fails.len());
            if check && !fails.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Analyze { scenario, freqs } => {
            let rows = tools::analyze(&harness::load(&scenario)?, &freqs)?;
            print!("{}", tools::attenuation_csv(&rows));
        }
    }
    Ok(ExitCode::SUCCESS)
}
