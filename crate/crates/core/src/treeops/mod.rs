//! Restricting independent decision trees over Tseitin variables: by a
//! small partial restriction (with closure) and by a full grid restriction
//! (with relabelling and pruning), plus checkers for the branch lemmas and
//! the consistency predicates between trees.

mod consistency;
mod full;
mod partial;

use crate::boolcore::{Branch, DecisionTree, VarId};
use crate::gridgraph::{is_independent, Charge, LiveGraph, TorusGrid};

pub use consistency::{check_consistent, check_neg_consistent, check_represents};
pub use full::{
    check_survival_full, decompose_branch, map_branch_back, restrict_tree_full, restrict_tree_full_traced, survival_report,
    FullOptions,
};
pub use partial::{check_survival_partial, restrict_tree_partial, restrict_tree_partial_traced};

/// The graph, charge and strict depth bound trees are checked against.
#[derive(Clone, Debug)]
pub struct GoodTreeContext {
    pub graph: LiveGraph,
    pub charge: Charge,
    pub depth_bound: usize,
}

impl GoodTreeContext {
    pub fn new(graph: LiveGraph, charge: Charge, depth_bound: usize) -> Self {
        GoodTreeContext { graph, charge, depth_bound }
    }

    /// The full torus with its standard odd charge.
    pub fn torus(grid: &TorusGrid, depth_bound: usize) -> Self {
        GoodTreeContext::new(grid.full(), grid.standard_charge(), depth_bound)
    }
}

/// Depth below the bound and every branch's queried set independent.
pub fn is_good_tree(t: &DecisionTree, ctx: &GoodTreeContext) -> bool {
    fn go(t: &DecisionTree, ctx: &GoodTreeContext, path: &mut Vec<VarId>) -> bool {
        match t {
            DecisionTree::Leaf(_) => is_independent(&ctx.graph, path).unwrap_or(false),
            DecisionTree::Node { var, zero, one } => {
                path.push(*var);
                let ok = go(zero, ctx, path) && go(one, ctx, path);
                path.pop();
                ok
            }
        }
    }
    t.depth() < ctx.depth_bound && go(t, ctx, &mut Vec::new())
}

/// A restricted tree together with, for each of its leaves in branch
/// order, the branch of the input tree that leaf came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Traced {
    pub tree: DecisionTree,
    pub origins: Vec<Branch>,
}

impl Traced {
    pub fn survives(&self, b: &Branch) -> bool {
        self.origins.contains(b)
    }
}

/// Outcome of checking a survival characterization over every branch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurvivalReport {
    pub branches: usize,
    pub surviving: usize,
    /// Branches where survival and the characterization disagree.
    pub mismatches: Vec<Branch>,
}

impl SurvivalReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridgraph::build_grid;

    #[test]
    fn good_tree_examples() {
        let g = build_grid(5).unwrap();
        let ctx = GoodTreeContext::torus(&g, 5);
        assert!(is_good_tree(&DecisionTree::leaf(true), &GoodTreeContext::torus(&g, 1)));
        let at = g.edges_at(2, 2);
        let chain = at.iter().rev().fold(DecisionTree::leaf(true), |t, &e| DecisionTree::node(e, t.clone(), t));
        assert_eq!(chain.depth(), 4);
        assert!(!is_good_tree(&chain, &ctx));
        let three = at[..3].iter().rev().fold(DecisionTree::leaf(true), |t, &e| DecisionTree::node(e, t.clone(), t));
        assert!(is_good_tree(&three, &ctx));
        assert!(!is_good_tree(&three, &GoodTreeContext::torus(&g, 3)));
    }
}
