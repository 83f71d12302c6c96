use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use klearning::harness::{
    aggregate, format_summary, read_records, run_experiment, run_experiment_with_threads, write_records,
    write_summary, ExperimentConfig, RECORDS_FILE, SUMMARY_FILE,
};
use klearning::Error;

#[derive(Parser)]
#[command(name = "klearning", version, about = "Seeded regret experiments for K-learning and baselines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write records.csv into the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output`, then `results`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        /// Worker threads for independent runs.
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Summarize records.csv from a run directory and write summary.csv next to it.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn run(config: &Path, out: Option<PathBuf>, seed: Option<u64>, runs: Option<usize>, parallel: Option<usize>) -> klearning::Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(runs) = runs {
        cfg.runs = runs;
    }
    cfg.validate()?;
    let dir = out
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    std::fs::create_dir_all(&dir)?;
    let records = match parallel {
        Some(n) => run_experiment_with_threads(&cfg, n)?,
        None => run_experiment(&cfg)?,
    };
    let path = dir.join(RECORDS_FILE);
    write_records(&path, &records)?;
    eprintln!("wrote {} records to {}", records.len(), path.display());
    Ok(())
}

fn report(dir: &Path) -> klearning::Result<()> {
    let records = read_records(&dir.join(RECORDS_FILE))?;
    let summary = aggregate(&records)?;
    print!("{}", format_summary(&summary));
    write_summary(&dir.join(SUMMARY_FILE), &summary)?;
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    if err.is_numeric() {
        3
    } else if matches!(err, Error::Io(_)) {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            seed,
            runs,
            parallel,
        } => run(&config, out, seed, runs, parallel),
        Command::Report { input } => report(&input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
