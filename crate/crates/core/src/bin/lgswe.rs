use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lgswe::cli::{cmd_eoc, cmd_run, cmd_sweep_c0, RunConfig};
use lgswe::Error;

#[derive(Parser)]
#[command(name = "lgswe", version, about = "Lagrange-Galerkin shallow water solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation; writes timeseries.csv, run.json and snapshots.
    Run(Common),
    /// Convergence study over [eoc] n_list; writes eoc.csv.
    Eoc(Common),
    /// One run per [sweep] c0_values; writes c0_sweep.csv.
    #[command(name = "sweep-c0")]
    SweepC0(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides [output] out_dir.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Single-threaded execution; CSV output is byte-identical across runs.
    #[arg(long)]
    deterministic: bool,
    /// Mesh jitter seed; overrides [run] seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut rc = RunConfig::load(&self.config)?;
        if let Some(dir) = &self.out_dir {
            rc.out_dir = dir.clone();
        }
        rc.deterministic |= self.deterministic;
        if let Some(seed) = self.seed {
            rc.scenario.seed = seed;
        }
        Ok(rc)
    }
}

fn execute(command: &Command) -> Result<String, Error> {
    match command {
        Command::Run(c) => {
            let rc = c.resolve()?;
            let out = cmd_run(&rc)?;
            let last = out.report.series.last().copied().unwrap_or(out.report.initial);
            Ok(format!(
                "{} steps, t = {:.6e}, |eta|_L2 = {:.6e}, mass = {:.6e}, {} snapshot(s) in {}",
                out.report.steps(),
                last.t,
                last.l2_eta,
                last.mass_eta,
                out.snapshots.len(),
                rc.out_dir.display()
            ))
        }
        Command::Eoc(c) => {
            let rc = c.resolve()?;
            let tables = cmd_eoc(&rc)?;
            Ok(format!("{} table(s) written to {}", tables.len(), rc.out_dir.join("eoc.csv").display()))
        }
        Command::SweepC0(c) => {
            let rc = c.resolve()?;
            let sweep = cmd_sweep_c0(&rc)?;
            Ok(format!(
                "argmin c0 = {} (unimodal: {}), table in {}",
                sweep.argmin,
                sweep.is_unimodal(),
                rc.out_dir.join("c0_sweep.csv").display()
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let report = serde_json::json!({ "error": e.code(), "message": e.to_string() });
            eprintln!("{report}");
            match e {
                Error::Parse { .. } | Error::Input(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
