//! A decision tree of depth below m has zero correlation with the parity of
//! m bits, while a full-depth tree can compute it exactly.

use switchlab::boolcore::{DecisionTree, VarId};
use switchlab::lab::correlation_with_parity;

fn parity_tree(vars: &[VarId], acc: bool) -> DecisionTree {
    match vars.split_first() {
        None => DecisionTree::leaf(acc),
        Some((&v, rest)) => DecisionTree::node(v, parity_tree(rest, acc), parity_tree(rest, !acc)),
    }
}

fn main() -> switchlab::Result<()> {
    let vars: Vec<VarId> = (0..4).map(VarId).collect();
    let full = parity_tree(&vars, false);
    let shallow = parity_tree(&vars[..3], false);
    println!("depth 4 parity tree: {}", correlation_with_parity(&full, &vars)?);
    println!("depth 3 tree: {}", correlation_with_parity(&shallow, &vars)?);
    Ok(())
}
