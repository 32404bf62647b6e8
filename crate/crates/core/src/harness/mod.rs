//! Experiment configuration and the commands behind the command-line tool.

mod config;
pub mod fit;
mod report;
mod run;
mod verify;

pub use config::{Algo, ExperimentConfig};
pub use report::{
    cmd_report_tradeoff, fit_sweep, growth_forms, ordering_flags, AlgoSweep, SweepPoint,
    TradeoffReport, DEFECTIVE_COLOR_CONSTANT,
};
pub use run::{
    cmd_dynamic, cmd_gen, cmd_run, run_seed, DynamicOutput, DynamicRun, RunOutput, SeedRun,
    RUN_CSV_HEADER,
};
pub use verify::{
    check_all_colorings, check_coloring_corpus, check_exhaustive, check_interval_schedules,
    cmd_verify, Check, VerifyReport,
};
