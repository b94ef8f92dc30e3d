//! Moments of negative binomial counts and tails of geometric sums against
//! their closed-form bounds.

use switchlab::lab::{run_tails, TailsConfig};

fn main() -> switchlab::Result<()> {
    let r = run_tails(&TailsConfig { trials: 100_000, ..Default::default() })?;
    for m in &r.moments {
        println!("q={} s={} t={}: E[X^t]={:.3} bound={:.3}", m.q, m.s, m.t, m.mean, m.bound);
    }
    for g in &r.geo_sums {
        println!("p={} n={} d={}: Pr ~ {:.2e} (upper {:.2e}) bound {:.2e}", g.p, g.n, g.d, g.estimate, g.upper, g.bound);
    }
    Ok(())
}
