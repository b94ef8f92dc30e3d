use crate::boolcore::{Assign, Branch, DecisionTree, Restriction, VarId};
use crate::error::{Error, Result};
use crate::gridgraph::{
    bridge_splits, closure_with_graph, components, pushes_contradiction, restrict_charge, Charge,
    LiveGraph,
};

use super::{GoodTreeContext, SurvivalReport, Traced};

struct State {
    rho: Restriction,
    graph: LiveGraph,
    charge: Charge,
}

fn has_giant(g: &LiveGraph) -> bool {
    components(g).sizes.iter().any(|&s| 2 * s > g.num_vertices())
}

impl State {
    /// `cl(ρ ∘ e → b)` from a closed `ρ`: remove `e`, then force every bridge
    /// of what is left.
    fn extend(&self, e: VarId, b: bool) -> Result<State> {
        let mut rho = self.rho.with(e, b);
        let mut charge = self.charge.clone();
        if b {
            let (u, v) = self.graph.base().ends(e);
            charge.toggle(u);
            charge.toggle(v);
        }
        let h = self.graph.minus([e])?;
        let splits = bridge_splits(&h);
        for s in &splits {
            let forced = charge.parity_over(&s.small_side);
            rho.set(s.edge, Assign::bit(forced));
            if forced {
                let (u, v) = h.base().ends(s.edge);
                charge.toggle(u);
                charge.toggle(v);
            }
        }
        let graph = h.minus(splits.iter().map(|s| s.edge))?;
        if !has_giant(&graph) {
            return Err(Error::NoGiant);
        }
        Ok(State { rho, graph, charge })
    }
}

/// `T↾β`: restrict by the closure of `β`, and keep closing as the tree
/// queries further edges.
pub fn restrict_tree_partial(t: &DecisionTree, beta: &Restriction, ctx: &GoodTreeContext) -> Result<DecisionTree> {
    restrict_tree_partial_traced(t, beta, ctx).map(|x| x.tree)
}

pub fn restrict_tree_partial_traced(t: &DecisionTree, beta: &Restriction, ctx: &GoodTreeContext) -> Result<Traced> {
    if !pushes_contradiction(&ctx.graph, &ctx.charge, beta)? {
        return Err(Error::NotPushing);
    }
    let (rho, graph) = closure_with_graph(&ctx.graph, &ctx.charge, beta)?;
    if !has_giant(&graph) {
        return Err(Error::NoGiant);
    }
    let charge = restrict_charge(&ctx.charge, &rho, &ctx.graph)?;
    let mut origins = Vec::new();
    let mut steps = Vec::new();
    let tree = go(t, &State { rho, graph, charge }, &mut steps, &mut origins)?;
    Ok(Traced { tree, origins })
}

fn go(t: &DecisionTree, st: &State, steps: &mut Vec<(VarId, bool)>, origins: &mut Vec<Branch>) -> Result<DecisionTree> {
    match t {
        DecisionTree::Leaf(b) => {
            origins.push(Branch { steps: steps.clone(), leaf: *b });
            Ok(DecisionTree::Leaf(*b))
        }
        DecisionTree::Node { var, zero, one } => {
            if let Some(b) = st.rho.fixed(*var) {
                steps.push((*var, b));
                let out = go(if b { one } else { zero }, st, steps, origins);
                steps.pop();
                return out;
            }
            let mut kids = Vec::with_capacity(2);
            for (b, child) in [(false, zero), (true, one)] {
                let next = st.extend(*var, b)?;
                steps.push((*var, b));
                kids.push(go(child, &next, steps, origins)?);
                steps.pop();
            }
            let one = kids.pop().expect("two children");
            let zero = kids.pop().expect("two children");
            Ok(DecisionTree::node(*var, zero, one))
        }
    }
}

/// For every branch `π` of `T`: `π` survives `T↾β` exactly when it agrees
/// with `β` and `β ∘ π` pushes the contradiction.
pub fn check_survival_partial(t: &DecisionTree, beta: &Restriction, ctx: &GoodTreeContext) -> Result<SurvivalReport> {
    let traced = restrict_tree_partial_traced(t, beta, ctx)?;
    let mut report = SurvivalReport::default();
    for b in crate::boolcore::branches(t, None) {
        let expected = match beta.compose(&b.restriction()) {
            Ok(joint) => pushes_contradiction(&ctx.graph, &ctx.charge, &joint)?,
            Err(_) => false,
        };
        let got = traced.survives(&b);
        report.branches += 1;
        report.surviving += usize::from(got);
        if got != expected {
            report.mismatches.push(b);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolcore::branches;
    use crate::gridgraph::build_grid;

    fn chain(vars: &[VarId]) -> DecisionTree {
        vars.iter().rev().fold(DecisionTree::leaf(false), |t, &e| DecisionTree::node(e, t.clone(), DecisionTree::leaf(true)))
    }

    #[test]
    fn empty_beta_is_identity() {
        let g = build_grid(5).unwrap();
        let ctx = GoodTreeContext::torus(&g, 6);
        let t = chain(&[VarId(0), VarId(7), VarId(13)]);
        assert_eq!(restrict_tree_partial(&t, &Restriction::new(), &ctx).unwrap(), t);
    }

    #[test]
    fn star_forces_fourth_edge() {
        let g = build_grid(5).unwrap();
        let ctx = GoodTreeContext::torus(&g, 6);
        let at = g.edges_at(2, 2);
        let beta = Restriction::from_bits(at[..3].iter().map(|&e| (e, false)));
        let t = DecisionTree::node(at[3], DecisionTree::leaf(false), DecisionTree::node(VarId(0), DecisionTree::leaf(true), DecisionTree::leaf(false)));
        let r = restrict_tree_partial(&t, &beta, &ctx).unwrap();
        assert_eq!(r, DecisionTree::node(VarId(0), DecisionTree::leaf(true), DecisionTree::leaf(false)));
    }

    #[test]
    fn surviving_branches_push() {
        let g = build_grid(5).unwrap();
        let ctx = GoodTreeContext::torus(&g, 6);
        let at = g.edges_at(1, 1);
        let nb = g.edges_at(3, 3);
        let t = chain(&[at[0], at[1], nb[0], nb[1], at[2]]);
        let beta = Restriction::from_bits([(at[3], true)]);
        let traced = restrict_tree_partial_traced(&t, &beta, &ctx).unwrap();
        let closed = closure_with_graph(&ctx.graph, &ctx.charge, &beta).unwrap().0;
        for b in branches(&traced.tree, None) {
            let joint = closed.compose(&b.restriction()).unwrap();
            assert!(pushes_contradiction(&ctx.graph, &ctx.charge, &joint).unwrap());
        }
        let report = check_survival_partial(&t, &beta, &ctx).unwrap();
        assert!(report.pass(), "{report:?}");
        assert!(report.surviving < report.branches);
    }

    #[test]
    fn non_pushing_beta_is_rejected() {
        let g = build_grid(3).unwrap();
        let ctx = GoodTreeContext::torus(&g, 3);
        let beta = Restriction::from_bits(g.edges_at(0, 0).map(|e| (e, false)));
        assert_eq!(restrict_tree_partial(&DecisionTree::leaf(true), &beta, &ctx), Err(Error::NotPushing));
    }
}
