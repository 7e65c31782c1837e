//! Command-line front end: run scenarios, sweep parameters, validate
//! configs, and emit kernel tables.

use clap::{Parser, Subcommand};

use qdsim::error::Result;
use qdsim::scenario::{self, Mode, SweepAxis};

#[derive(Parser)]
#[command(
    name = "qdsim",
    version,
    about = "Phonon-dressed exciton-photon dynamics of a driven quantum dot",
    after_help = concat!(
        "CONFIG accepts a JSON file path or a built-in preset name.\n",
        "The QDSIM_OUT_DIR environment variable overrides the output directory."
    )
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write CSV + manifest outputs.
    Run {
        /// Config file path or preset name.
        config: String,
    },
    /// Run a scenario once per value of one parameter axis.
    Sweep {
        /// Config file path or preset name.
        config: String,
        /// Axis to vary: A, a, delta, g, T, or n_trunc.
        #[arg(long)]
        axis: String,
        /// Comma-separated values, e.g. `0,0.5,1`.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
    },
    /// Validate a config and print resolved units without running.
    Check {
        /// Config file path or preset name.
        config: String,
    },
    /// Build (or load from cache) the bath kernel table and write it as CSV.
    Kernel {
        /// Config file path or preset name.
        config: String,
    },
    /// List built-in presets.
    Presets,
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => {
            let c = scenario::load(&config)?;
            let (manifest, _) = scenario::run(&c)?;
            for w in &manifest.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{}: wrote {} in {} ({:.2} s, invariants {})",
                manifest.name,
                manifest.outputs.join(", "),
                scenario::out_dir(&c).display(),
                manifest.wall_time_s,
                if manifest.passed { "ok" } else { "EXCEEDED" }
            );
            Ok(())
        }
        Command::Sweep { config, axis, values } => {
            let c = scenario::load(&config)?;
            let axis = SweepAxis::parse(&axis)?;
            let (manifests, summary) = scenario::sweep(&c, axis, &values)?;
            println!("{} runs, summary {}", manifests.len(), summary.display());
            Ok(())
        }
        Command::Check { config } => {
            let c = scenario::load(&config)?;
            let report = scenario::check(&c);
            for line in &report.findings {
                println!("{line}");
            }
            for w in &report.warnings {
                println!("warning: {w}");
            }
            if report.valid {
                Ok(())
            } else {
                // findings already carry the detail; exit as a config error
                Err(qdsim::error::Error::Config {
                    field: "config".into(),
                    reason: "validation failed (see findings above)".into(),
                })
            }
        }
        Command::Kernel { config } => {
            let mut c = scenario::load(&config)?;
            c.mode = Mode::KernelOnly;
            c.pulse = None;
            c.system = None;
            let (manifest, _) = scenario::run(&c)?;
            println!(
                "{}: wrote {} in {}",
                manifest.name,
                manifest.outputs.join(", "),
                scenario::out_dir(&c).display()
            );
            Ok(())
        }
        Command::Presets => {
            for name in scenario::preset_names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}
