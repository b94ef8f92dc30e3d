//! Restrict an independent decision tree over torus edges, first by a small
//! partial restriction with closure and then by a full grid restriction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use switchlab::boolcore::{branches, DecisionTree, Restriction};
use switchlab::gridgraph::build_grid;
use switchlab::lab::path_edges_around;
use switchlab::restrictions::{GridParams, GridSampler};
use switchlab::treeops::{
    check_survival_full, is_good_tree, map_branch_back, restrict_tree_full, restrict_tree_partial, GoodTreeContext,
};

fn chain(vars: &[switchlab::boolcore::VarId]) -> DecisionTree {
    vars.iter().rev().fold(DecisionTree::leaf(false), |t, &e| DecisionTree::node(e, t, DecisionTree::leaf(true)))
}

fn main() -> switchlab::Result<()> {
    // three edges at a vertex set to 0 force the fourth
    let g = build_grid(5)?;
    let ctx = GoodTreeContext::torus(&g, 6);
    let at = g.edges_at(2, 2);
    let beta = Restriction::from_bits(at[..3].iter().map(|&e| (e, false)));
    let t = chain(&[at[3], g.edges_at(0, 0)[0]]);
    println!("partial: depth {} -> {}", t.depth(), restrict_tree_partial(&t, &beta, &ctx)?.depth());

    let sampler = GridSampler::new(GridParams::new(48, 2)?)?;
    let ctx = GoodTreeContext::torus(sampler.grid(), 6);
    let pool = path_edges_around(&sampler, 4);
    let t = chain(&[pool[0], pool[pool.len() / 2], pool[pool.len() - 1]]);
    assert!(is_good_tree(&t, &ctx));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let rho = sampler.sample(&mut rng)?;
    let r = restrict_tree_full(&t, &rho, &ctx)?;
    println!("full: depth {} -> {}, relabelled over new variables", t.depth(), r.depth());
    let report = check_survival_full(&t, &rho, &ctx)?;
    println!("survival: {} of {} branches survive, characterization holds: {}", report.surviving, report.branches, report.pass());
    for pi in branches(&r, None) {
        let back = map_branch_back(&t, &rho, &ctx, &pi)?;
        println!("  {:?} comes from {:?}", pi.steps, back.steps);
    }
    Ok(())
}
