//! Draw a uniform p-random restriction and a grid restriction, and show
//! what each leaves alive.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use switchlab::boolcore::{Assign, VarId};
use switchlab::gridgraph::dimacs;
use switchlab::restrictions::{sample_uniform, GridParams, GridSampler};

fn main() -> switchlab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let rho = sample_uniform((0..20).map(VarId), 0.25, &mut rng);
    let row: String = (0..20)
        .map(|v| match rho.get(VarId(v)) {
            Assign::Star => '*',
            Assign::Zero => '0',
            Assign::One => '1',
        })
        .collect();
    println!("uniform p=1/4 on 20 vars: {row}");

    let sampler = GridSampler::new(GridParams::new(48, 2)?)?;
    let grid = sampler.sample(&mut rng)?;
    println!(
        "grid restriction n=48 delta=2: {} of {} edges live, {} new variables",
        grid.live_edges().count(),
        grid.num_original_edges(),
        grid.num_new_vars()
    );
    for s in 0..sampler.params().num_subgrids() {
        let c = grid.chosen_center(s);
        println!("  subgrid {s}: center {} at {:?}", c.k, sampler.params().center_pos(c));
    }
    let projected = grid.new_instance();
    println!("projected instance header: {}", dimacs(&projected)?.lines().next().unwrap_or(""));
    Ok(())
}
