//! The Lorenz 96 twin experiment: configuration, orchestration, and output
//! files.

mod compare;
mod config;
mod experiment;
mod output;

pub use compare::{compare_runs, Comparison, RatioEntry};
pub use config::ExperimentConfig;
pub use experiment::{
    assimilate, generate_truth, observe_all, run_twin_experiment, spin_up, ExperimentResult,
    SPINUP_PERTURBATION,
};
pub use output::{
    read_csv_matrix, read_manifest, sha256_hex, verify_manifest, write_outputs, Manifest,
    ManifestEntry, MANIFEST_FILE, SUMMARY_FILE,
};
