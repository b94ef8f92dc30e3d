//! The grid multi-switching lemma: DNFs over edges of the 48 x 48 torus
//! under grid restrictions. At this size the bound is far above 1, so the
//! run reports the measured depths next to a vacuous bound.

use switchlab::lab::{run_experiment, EdgePool, ExperimentConfig};

fn main() -> switchlab::Result<()> {
    for pool in [EdgePool::Paths, EdgePool::All] {
        let cfg = ExperimentConfig { trials: 300, edge_pool: pool, ..ExperimentConfig::grid_sl() };
        let r = run_experiment(&cfg)?;
        println!("edges drawn from {pool:?}: depth histogram {:?}", r.depth_histogram);
        for row in &r.rows {
            println!("  t={} estimate={:.3} vacuous={}", row.t, row.estimate, row.vacuous);
        }
    }
    Ok(())
}
