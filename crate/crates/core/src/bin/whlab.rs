use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use whlab::harness::{exit_code, experiment_registry, registry_entry, run_experiment, RunOptions};
use whlab::Error;

/// Run a registered experiment from a TOML config.
#[derive(Parser, Debug)]
#[command(name = "whlab", version, about)]
struct Cli {
    /// Experiment name (`list` prints the registry).
    experiment: String,

    /// Config file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output root; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (default: WHLAB_THREADS, then all cores).
    #[arg(long, env = "WHLAB_THREADS")]
    threads: Option<usize>,

    /// Print the default config of the experiment and exit.
    #[arg(long)]
    print_default: bool,
}

fn run(cli: &Cli) -> Result<(), Error> {
    if cli.experiment == "list" {
        for e in experiment_registry() {
            println!("{:<16} {}", e.name, e.reproduces);
        }
        return Ok(());
    }
    let entry = registry_entry(&cli.experiment)
        .ok_or_else(|| Error::config("experiment", format!("unknown experiment `{}`", cli.experiment)))?;
    if cli.print_default {
        print!("{}", entry.default_config);
        return Ok(());
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config("threads", e.to_string()))?;
    }
    let path = cli.config.as_ref().ok_or_else(|| Error::config("--config", "required"))?;
    let cfg_name = whlab::harness::ExperimentConfig::load(path)?.experiment;
    if cfg_name != cli.experiment {
        return Err(Error::config(
            "experiment",
            format!("config is for `{cfg_name}`, command line asked for `{}`", cli.experiment),
        ));
    }
    let art = run_experiment(
        path,
        &RunOptions {
            out: cli.out.clone(),
            seed: cli.seed,
        },
    )?;
    println!("{}", art.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("whlab: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
