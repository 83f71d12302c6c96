//! Seeded regret experiments: config, run loop, aggregation and CSV output.

mod aggregate;
mod config;
mod records;
mod run;

pub use aggregate::{aggregate, format_summary, FinalRow, Summary, SummaryRow};
pub use config::{
    AgentConfig, BanditConfig, EnvConfig, ExperimentConfig, LogCadence, PriorOverride, RandomMdpSpec, ScalarOrVec,
};
pub use records::{
    read_records, read_records_from, write_records, write_records_to, write_summary, write_summary_to, CSV_HEADER,
    RECORDS_FILE, SUMMARY_FILE,
};
pub use run::{bandit_regret_bound, run_experiment, run_experiment_with_threads, run_single, seed_for, LogRow, RunRecord};
