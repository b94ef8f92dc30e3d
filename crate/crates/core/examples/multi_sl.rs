//! The multi-switching lemma for a family of DNFs: depth of the common
//! partial decision tree after a p-random restriction.

use switchlab::lab::{run_experiment, ExperimentConfig};

fn main() -> switchlab::Result<()> {
    let cfg = ExperimentConfig { trials: 5_000, ..ExperimentConfig::multi_sl() };
    let r = run_experiment(&cfg)?;
    println!("family of {} DNFs, l={}, p={}", cfg.s, cfg.l, cfg.p);
    println!("depth histogram: {:?}", r.depth_histogram);
    for row in &r.rows {
        let bound = if row.vacuous { "vacuous".to_string() } else { format!("{:.2e}", row.bound) };
        println!("t={} estimate={:.2e} upper={:.2e} bound={bound}", row.t, row.estimate, row.upper);
    }
    Ok(())
}
