//! Canonical decision trees of small DNFs, and the common partial decision
//! tree of a family under a random restriction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use switchlab::boolcore::{branches, restrict_tree_simple, Dnf, Literal, VarId};
use switchlab::canonical::{build_ccdt, build_cdt, TreeFamily, DEFAULT_BLOCK_CAP};
use switchlab::restrictions::sample_uniform;

fn main() -> switchlab::Result<()> {
    // (x1 ∧ x2) ∨ (¬x2 ∧ x3) ∨ x4
    let f = Dnf::from_literals(vec![
        vec![Literal::pos(1), Literal::pos(2)],
        vec![Literal::neg(2), Literal::pos(3)],
        vec![Literal::pos(4)],
    ])?;
    let cdt = build_cdt(&f);
    println!("CDT depth {} with {} leaves", cdt.depth(), cdt.num_leaves());
    for b in branches(&cdt, Some(true)) {
        println!("  1-branch {:?}", b.steps.iter().map(|&(v, x)| (v.0, x as u8)).collect::<Vec<_>>());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = sample_uniform((0..6).map(VarId), 0.5, &mut rng);
    println!("restricted CDT depth {}", restrict_tree_simple(&cdt, &rho).depth());

    let g = Dnf::from_literals(vec![vec![Literal::pos(0), Literal::neg(5)], vec![Literal::pos(3)]])?;
    let family = TreeFamily::restricted(&[f, g], &rho);
    for l in 0..3 {
        let ccdt = build_ccdt(&family, l, DEFAULT_BLOCK_CAP)?;
        println!("l={l}: common tree depth {} with {} leaves", ccdt.depth(), ccdt.num_leaves());
    }
    Ok(())
}
