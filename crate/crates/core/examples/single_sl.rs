//! Monte Carlo check of the single-DNF switching lemma: depth of the
//! canonical tree of a random 2-DNF under a p-random restriction.

use switchlab::lab::{run_experiment, ExperimentConfig};

fn main() -> switchlab::Result<()> {
    let cfg = ExperimentConfig { trials: 20_000, ..ExperimentConfig::single_sl() };
    let r = run_experiment(&cfg)?;
    println!("depth histogram: {:?}", r.depth_histogram);
    for row in &r.rows {
        println!(
            "t={} failures={} estimate={:.2e} upper={:.2e} bound={:.2e} {}",
            row.t,
            row.failures,
            row.estimate,
            row.upper,
            row.bound,
            if row.pass { "ok" } else { "FAIL" }
        );
    }
    Ok(())
}
