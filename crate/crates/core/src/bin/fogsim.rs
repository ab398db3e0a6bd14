use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fogsim_core::cli::{self, Axis, SweepOptions};
use fogsim_core::config::{PolicySel, ReservationSel};

#[derive(Parser)]
#[command(name = "fogsim", version, about = "Fog task-offloading simulator")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one config and write report.csv and report.json.
    Run {
        config: PathBuf,
        /// Output directory [default: $FOGSIM_OUT_DIR or ./out]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep one axis over several seeds and write sweep-<axis>.csv.
    Sweep {
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long, default_value_t = 20)]
        seeds: u32,
        /// Output directory [default: $FOGSIM_OUT_DIR or ./out]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, value_enum, default_value = "both")]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value = "both")]
        reservation: ReservationArg,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum PolicyArg {
    Mc,
    Baseline,
    Both,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ReservationArg {
    On,
    Off,
    Both,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.cmd {
        Cmd::Run { config, out } => {
            let out = cli::resolve_out(out);
            cli::run_scenario(&config, &out).map(|rows| {
                println!("wrote {} rows to {}", rows.len(), out.display());
            })
        }
        Cmd::Sweep {
            config,
            axis,
            seeds,
            out,
            workers,
            policy,
            reservation,
        } => {
            let opts = SweepOptions {
                axis,
                seeds,
                out: cli::resolve_out(out),
                workers,
                policy: match policy {
                    PolicyArg::Mc => PolicySel::Mc,
                    PolicyArg::Baseline => PolicySel::Baseline,
                    PolicyArg::Both => PolicySel::Both,
                },
                reservation: match reservation {
                    ReservationArg::On => ReservationSel::On,
                    ReservationArg::Off => ReservationSel::Off,
                    ReservationArg::Both => ReservationSel::Both,
                },
            };
            cli::sweep(&config, &opts).map(|r| {
                println!(
                    "wrote {} rows and {} means to {}",
                    r.rows.len(),
                    r.means.len(),
                    opts.out.display()
                );
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
