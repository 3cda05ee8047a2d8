//! Full twin experiment at two observation accuracies, written to disk and
//! compared.
//!
//!     cargo run --release --example twin_experiment [out_dir]

use model_error::harness::{compare_runs, run_twin_experiment, write_outputs, ExperimentConfig};
use model_error::Result;

fn main() -> Result<()> {
    let root =
        std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/twin".into()));
    for (name, r) in [("coarse", 1e-3), ("fine", 1e-8)] {
        let cfg = ExperimentConfig {
            r_variance: r,
            ..ExperimentConfig::default()
        };
        let run = run_twin_experiment(&cfg)?;
        let manifest = write_outputs(&run, root.join(name))?;
        println!(
            "{name}: R = {r:e}, rms |x_t - x_a| = {:.3e}, {} files",
            run.rms_analysis_error(),
            manifest.files.len()
        );
    }
    let cmp = compare_runs(root.join("coarse"), root.join("fine"))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&cmp).expect("serializes")
    );
    Ok(())
}
