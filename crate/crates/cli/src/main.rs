use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use surflab_cli::config::ConfigError;
use surflab_cli::runner::{execute, load_config, RunError, RunOptions};
use surflab_cli::{corpus, ExperimentKind};

#[derive(Parser)]
#[command(name = "surflab", version, about = "Random surface experiments driven by TOML configs")]
struct Cli {
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; falls back to the config, then $SURFLAB_OUT.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent replicas; outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Validate and resolve the output directory without running.
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run any experiment config.
    Run { config: PathBuf },
    /// List built-in potentials, mixing measures and small mixtures.
    ListCorpus {
        #[arg(long)]
        json: bool,
    },
    /// Split a potential into a Gaussian mixture part and a monotone remainder.
    Decompose { config: PathBuf },
    /// Run Gibbs chains on lattice boxes.
    Sample { config: PathBuf },
    /// Effective resistance to the boundary over nested boxes.
    ResistanceProfile { config: PathBuf },
    /// Bond percolation on a box at several densities.
    Percolate { config: PathBuf },
    /// Check the correlation inequalities on the small-mixture corpus.
    VerifyInequalities { config: PathBuf },
    /// Fit the tail of |phi| at the probe.
    Tails { config: PathBuf },
    /// Normalized maxima of |phi| across box sizes.
    MaxScaling { config: PathBuf },
    /// Variance at the origin against log L.
    VarianceGrowth { config: PathBuf },
}

fn run(path: &Path, expect: Option<ExperimentKind>, opts: &RunOptions) -> Result<(), RunError> {
    let cfg = load_config(path)?;
    if let Some(k) = expect {
        if cfg.kind != k {
            return Err(ConfigError { field: "kind".into(), reason: format!("`{}` given to the {} command", cfg.kind.name(), k.name()) }.into());
        }
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| cfg.kind.name().into());
    let summary = execute(cfg, opts, &name)?;
    match summary.manifest {
        Some(m) => println!("{} ({} files, {:.2} s)", summary.out_dir.display(), m.files.len(), m.wall_time_s),
        None => println!("config ok; output would go to {}", summary.out_dir.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions { seed: cli.seed, out: cli.out, threads: cli.threads, dry_run: cli.dry_run };
    let (path, kind) = match cli.command {
        Command::ListCorpus { json } => {
            let items = corpus::registry();
            if json {
                println!("{}", serde_json::to_string_pretty(&items).expect("json"));
            } else {
                for i in items {
                    println!("{:<14} {:<28} {}", i.category, i.name, i.statement);
                }
            }
            return ExitCode::SUCCESS;
        }
        Command::Run { config } => (config, None),
        Command::Decompose { config } => (config, Some(ExperimentKind::Decompose)),
        Command::Sample { config } => (config, Some(ExperimentKind::Sample)),
        Command::ResistanceProfile { config } => (config, Some(ExperimentKind::ResistanceProfile)),
        Command::Percolate { config } => (config, Some(ExperimentKind::Percolate)),
        Command::VerifyInequalities { config } => (config, Some(ExperimentKind::VerifyInequalities)),
        Command::Tails { config } => (config, Some(ExperimentKind::Tails)),
        Command::MaxScaling { config } => (config, Some(ExperimentKind::MaxScaling)),
        Command::VarianceGrowth { config } => (config, Some(ExperimentKind::VarianceGrowth)),
    };
    match run(&path, kind, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
