//! The length of a random walk on a restricted tree has exactly the law of
//! a thinned walk on the original tree. Checked over every proper tree on
//! three variables, with exact rationals.

use switchlab::boolcore::VarId;
use switchlab::lab::{
    all_proper_trees, exact_length_distribution_restricted, exact_length_distribution_thinned, Dyadic,
};

fn main() -> switchlab::Result<()> {
    let vars: Vec<VarId> = (0..3).map(VarId).collect();
    let trees = all_proper_trees(&vars);
    for p in [Dyadic::half(), Dyadic::quarter()] {
        let mut agree = 0;
        for t in &trees {
            let a = exact_length_distribution_restricted(t, &vars, p)?;
            let b = exact_length_distribution_thinned(t, &vars, p)?;
            agree += usize::from(a == b);
        }
        println!("p={p}: {agree} of {} trees agree", trees.len());
    }
    let deepest = trees.iter().max_by_key(|t| t.depth()).expect("nonempty");
    let dist = exact_length_distribution_thinned(deepest, &vars, Dyadic::quarter())?;
    println!("depth-{} tree at p=1/4: {}", deepest.depth(), dist.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", "));
    Ok(())
}
