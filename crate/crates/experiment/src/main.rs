use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use csst_experiment::{ExpError, ExperimentConfig, Pipeline, Profile, Result};

#[derive(Parser)]
#[command(name = "csst", version, about = "Compressed sensing shadow tomography experiments")]
struct Cli {
    /// JSON config; overrides --profile
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "desk")]
    profile: ProfileArg,
    /// Master seed override
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: config `out`, else runs/<profile>)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Desk,
    Paper,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact Lindblad evolution and the truth signal matrix
    Simulate,
    /// Shadow datasets and estimates on one sampled mask
    Shadows(CellArgs),
    /// LASSO reconstruction with an alpha sweep for one (shots, m) cell
    Reconstruct(CellArgs),
    /// Every (shots, m) cell, then the report
    Sweep,
    /// Theory calculator table
    Theory,
    /// Figure tables from completed cells
    Report,
}

#[derive(clap::Args)]
struct CellArgs {
    /// Snapshots per timestep (default: first configured value)
    #[arg(long)]
    shots_per_timestep: Option<usize>,
    /// Number of sampled timesteps (default: first configured value)
    #[arg(long)]
    mask_size: Option<usize>,
}

fn run(cli: Cli) -> Result<()> {
    let (mut cfg, name) = match &cli.config {
        Some(p) => (ExperimentConfig::load(p)?, "custom"),
        None => match cli.profile {
            ProfileArg::Desk => (ExperimentConfig::preset(Profile::Desk), "desk"),
            ProfileArg::Paper => (ExperimentConfig::preset(Profile::Paper), "paper"),
        },
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if let Some(k) = cli.jobs {
        if k == 0 {
            return Err(ExpError::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| ExpError::Config(e.to_string()))?;
    }
    let out = cli
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(name));
    let cell = |a: &CellArgs, cfg: &ExperimentConfig| {
        (
            a.shots_per_timestep.unwrap_or(cfg.shots[0]),
            a.mask_size.unwrap_or(cfg.masks[0]),
        )
    };
    let mut pipe = Pipeline::new(cfg.clone(), out)?;
    match &cli.cmd {
        Cmd::Simulate => pipe.cmd_simulate(),
        Cmd::Shadows(a) => {
            let (n, m) = cell(a, &cfg);
            pipe.cmd_shadows(n, m)
        }
        Cmd::Reconstruct(a) => {
            let (n, m) = cell(a, &cfg);
            pipe.cmd_reconstruct(n, m)
        }
        Cmd::Sweep => pipe.cmd_sweep(),
        Cmd::Report => pipe.cmd_report(),
        Cmd::Theory => {
            let rows = pipe.cmd_theory()?;
            let width = rows.iter().map(|r| r.quantity.len()).max().unwrap_or(0);
            for r in rows {
                let note = if r.note.is_empty() { String::new() } else { format!("  # {}", r.note) };
                println!("{:width$}  {:>24}  [{}]{note}", r.quantity, r.value, r.inputs);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("csst: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
