//! Experiment runner: multi-seed runs, grid tuning, theorem verification
//! and CSV output.

mod config;
mod csv;
mod run;
mod tune;
mod verify;

pub use config::{
    parse_config_text, read_config_file, render_pairs, Budget, ExperimentConfig, InitialPoint,
    OracleSpec, ProblemSpec,
};
pub use csv::{
    emit_metadata, emit_run_csv, emit_verify_csv, fmt_sig9, metadata_path, run_csv_string,
    verify_csv_string, RunMetadata, RUN_HEADER, VERIFY_HEADER,
};
pub use run::{
    iterations_per_epoch, run_experiment, run_experiment_on, run_metadata, summarize,
    total_iterations, Checkpoint, LoadedProblem, RunRecord, RunSummary,
};
pub use tune::{tune_grid, GridRow, TuneGrid, TuneResult};
pub use verify::{
    derive_theorem_inputs, lemma1_case_check, verify_theorem, Lemma1CaseReport, VerifyReport,
    VerifyRow, VerifySpec,
};
