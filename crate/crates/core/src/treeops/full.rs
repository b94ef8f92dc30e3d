use crate::boolcore::{branches, Branch, DecisionTree, Restriction, VarId};
use crate::error::{Error, Result};
use crate::gridgraph::{closure_restriction, is_nice, pushes_contradiction, split, Charge, LiveGraph};
use crate::restrictions::{GridAssign, GridRestriction};

use super::{is_good_tree, GoodTreeContext, SurvivalReport, Traced};

/// Switches for [`restrict_tree_full_traced`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FullOptions {
    /// Treat every new variable as a non-bridge. Only useful to show that
    /// the survival check notices missing pruning.
    pub skip_pruning: bool,
}

struct State {
    assigned: Vec<Option<bool>>,
    graph: LiveGraph,
    charge: Charge,
}

impl State {
    fn assign(&self, v: VarId, y: bool) -> Result<State> {
        let mut assigned = self.assigned.clone();
        assigned[v.index()] = Some(y);
        let mut charge = self.charge.clone();
        if y {
            let (a, b) = self.graph.base().ends(v);
            charge.toggle(a);
            charge.toggle(b);
        }
        Ok(State { assigned, graph: self.graph.minus([v])?, charge })
    }
}

/// `T↾ρ` for a full grid restriction: fixed edges are followed, live edges
/// become their new variable (negative polarity swaps the children), repeated
/// new variables follow their earlier value, and a new variable that is a
/// bridge of the shrinking `m × m` grid keeps only the child that pushes the
/// contradiction.
pub fn restrict_tree_full(t: &DecisionTree, rho: &GridRestriction, ctx: &GoodTreeContext) -> Result<DecisionTree> {
    restrict_tree_full_traced(t, rho, ctx, FullOptions::default()).map(|x| x.tree)
}

pub fn restrict_tree_full_traced(
    t: &DecisionTree,
    rho: &GridRestriction,
    ctx: &GoodTreeContext,
    opts: FullOptions,
) -> Result<Traced> {
    if !is_good_tree(t, ctx) {
        return Err(Error::Contract("tree is not good for the context".into()));
    }
    let small = rho.small_grid();
    let st = State {
        assigned: vec![None; rho.num_new_vars()],
        graph: small.full(),
        charge: Charge::ones(small.graph().num_vertices()),
    };
    let mut origins = Vec::new();
    let tree = go(t, rho, opts, &st, &mut Vec::new(), &mut origins)?;
    Ok(Traced { tree, origins })
}

fn go(
    t: &DecisionTree,
    rho: &GridRestriction,
    opts: FullOptions,
    st: &State,
    steps: &mut Vec<(VarId, bool)>,
    origins: &mut Vec<Branch>,
) -> Result<DecisionTree> {
    let DecisionTree::Node { var: e, zero, one } = t else {
        let leaf = t.is_leaf().expect("not a node");
        origins.push(Branch { steps: steps.clone(), leaf });
        return Ok(DecisionTree::Leaf(leaf));
    };
    let child = |x: bool| if x { one.as_ref() } else { zero.as_ref() };
    let (v, positive) = match rho.apply(*e) {
        GridAssign::Fixed(x) => {
            steps.push((*e, x));
            let out = go(child(x), rho, opts, st, steps, origins);
            steps.pop();
            return out;
        }
        GridAssign::Mapped { var, positive } => (var, positive),
    };
    let follow = |y: bool, st: &State, steps: &mut Vec<(VarId, bool)>, origins: &mut Vec<Branch>| {
        let x = y == positive;
        steps.push((*e, x));
        let out = go(child(x), rho, opts, st, steps, origins);
        steps.pop();
        out
    };
    if let Some(y) = st.assigned[v.index()] {
        return follow(y, st, steps, origins);
    }
    if opts.skip_pruning || split(&st.graph, v).is_none() {
        let zero = follow(false, &st.assign(v, false)?, steps, origins)?;
        let one = follow(true, &st.assign(v, true)?, steps, origins)?;
        return Ok(DecisionTree::node(v, zero, one));
    }
    let mut keep = None;
    for y in [false, true] {
        let next = st.assign(v, y)?;
        if is_nice(&next.graph, &next.charge) {
            if keep.is_some() {
                return Err(Error::Invariant(format!("both values of bridge {v:?} keep the pair nice")));
            }
            keep = Some((y, next));
        }
    }
    let (y, next) = keep.ok_or(Error::PruneAbort(v))?;
    follow(y, &next, steps, origins)
}

/// Splits a branch of `T` into its part inside `ρ` and an assignment to new
/// variables; `None` when a fixed edge disagrees with `ρ` or two edges of one
/// path ask for different values of its variable.
pub fn decompose_branch(b: &Branch, rho: &GridRestriction) -> Option<Restriction> {
    let mut out = Restriction::new();
    for &(e, x) in &b.steps {
        match rho.apply(e) {
            GridAssign::Fixed(f) if f != x => return None,
            GridAssign::Fixed(_) => {}
            GridAssign::Mapped { var, positive } => {
                let y = x == positive;
                match out.fixed(var) {
                    Some(prev) if prev != y => return None,
                    _ => out = out.with(var, y),
                }
            }
        }
    }
    Some(out)
}

/// Compares survival in `T↾ρ` with the decomposition characterization for
/// every branch of `T`: a branch survives exactly when it splits into a
/// part of `ρ` and an assignment to new variables that pushes the
/// contradiction on the small grid.
pub fn check_survival_full(t: &DecisionTree, rho: &GridRestriction, ctx: &GoodTreeContext) -> Result<SurvivalReport> {
    let traced = restrict_tree_full_traced(t, rho, ctx, FullOptions::default())?;
    survival_report(&traced, t, rho)
}

/// The survival comparison for an already restricted tree.
pub fn survival_report(traced: &Traced, t: &DecisionTree, rho: &GridRestriction) -> Result<SurvivalReport> {
    let small = rho.small_grid().full();
    let ones = Charge::ones(small.num_vertices());
    let mut report = SurvivalReport::default();
    for b in branches(t, None) {
        let expected = match decompose_branch(&b, rho) {
            Some(newvars) => pushes_contradiction(&small, &ones, &newvars)?,
            None => false,
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

/// The unique branch of `T` lying inside `ρ ∘ cl(π')` for a branch `π'` of
/// `T↾ρ`. Errors when `π'` is not a branch, and reports an invariant
/// violation when no branch or more than one qualifies, when leaf values
/// differ, or when the answer disagrees with the branch `π'` was built from.
pub fn map_branch_back(t: &DecisionTree, rho: &GridRestriction, ctx: &GoodTreeContext, pi: &Branch) -> Result<Branch> {
    let traced = restrict_tree_full_traced(t, rho, ctx, FullOptions::default())?;
    let idx = branches(&traced.tree, None).iter().position(|b| b == pi).ok_or(Error::NotABranch)?;
    let small = rho.small_grid().full();
    let closed = closure_restriction(&small, &Charge::ones(small.num_vertices()), &pi.restriction())?;
    let value = |e: VarId| match rho.apply(e) {
        GridAssign::Fixed(x) => Some(x),
        GridAssign::Mapped { var, positive } => closed.fixed(var).map(|y| y == positive),
    };
    let mut found: Vec<Branch> =
        branches(t, None).into_iter().filter(|b| b.steps.iter().all(|&(e, x)| value(e) == Some(x))).collect();
    if found.len() != 1 {
        return Err(Error::Invariant(format!("{} branches lie inside ρ ∘ cl(π')", found.len())));
    }
    let b = found.pop().expect("one branch");
    if b.leaf != pi.leaf {
        return Err(Error::Invariant("mapped branch has a different leaf value".into()));
    }
    if b != traced.origins[idx] {
        return Err(Error::Invariant("mapped branch differs from the branch it was built from".into()));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridgraph::TorusGrid;
    use crate::restrictions::{GridParams, GridSampler};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (GridSampler, GridRestriction, GoodTreeContext) {
        let s = GridSampler::new(GridParams::new(48, 2).unwrap()).unwrap();
        let rho = s.sample(&mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let ctx = GoodTreeContext::torus(&TorusGrid::with_side(48).unwrap(), 6);
        (s, rho, ctx)
    }

    #[test]
    fn fixed_only_tree_collapses() {
        let (_, rho, ctx) = setup();
        let fixed: Vec<VarId> = (0..200).map(VarId).filter(|&e| !rho.is_live(e)).take(3).collect();
        let t = fixed.iter().rev().fold(DecisionTree::leaf(true), |t, &e| DecisionTree::node(e, DecisionTree::leaf(false), t));
        let traced = restrict_tree_full_traced(&t, &rho, &ctx, FullOptions::default()).unwrap();
        let want = fixed.iter().all(|&e| rho.aux_value(e));
        assert_eq!(traced.tree, DecisionTree::leaf(want));
        assert_eq!(traced.origins.len(), 1);
        assert!(check_survival_full(&t, &rho, &ctx).unwrap().pass());
    }

    #[test]
    fn relabels_with_polarity() {
        let (_, rho, ctx) = setup();
        let v = VarId(3);
        let path = rho.path_of(v).to_vec();
        let e = path[path.len() / 2];
        let t = DecisionTree::node(e, DecisionTree::leaf(false), DecisionTree::leaf(true));
        let out = restrict_tree_full(&t, &rho, &ctx).unwrap();
        let GridAssign::Mapped { positive, .. } = rho.apply(e) else { panic!("live") };
        let want = DecisionTree::node(v, DecisionTree::leaf(!positive), DecisionTree::leaf(positive));
        assert_eq!(out, want);
        // a second edge of the same path is answered by the first query
        let f = path[path.len() / 2 + 1];
        let t2 = DecisionTree::node(e, DecisionTree::node(f, DecisionTree::leaf(false), DecisionTree::leaf(true)), DecisionTree::leaf(true));
        assert_eq!(restrict_tree_full(&t2, &rho, &ctx).unwrap().depth(), 1);
    }

    fn star_tree(rho: &GridRestriction, vars: &[VarId]) -> DecisionTree {
        let edges: Vec<VarId> = vars.iter().map(|&v| rho.path_of(v)[rho.path_of(v).len() / 2]).collect();
        fn build(edges: &[VarId], i: usize) -> DecisionTree {
            if i == edges.len() {
                return DecisionTree::leaf(i % 2 == 0);
            }
            DecisionTree::node(edges[i], build(edges, i + 1), build(edges, i + 1))
        }
        build(&edges, 0)
    }

    #[test]
    fn fourth_edge_at_a_small_vertex_is_pruned() {
        let (_, rho, ctx) = setup();
        let at = rho.small_grid().edges_at(1, 1);
        let t = star_tree(&rho, &at);
        let traced = restrict_tree_full_traced(&t, &rho, &ctx, FullOptions::default()).unwrap();
        assert_eq!(traced.tree.depth(), 3);
        assert_eq!(traced.tree.num_leaves(), 8);
        let report = survival_report(&traced, &t, &rho).unwrap();
        assert!(report.pass(), "{report:?}");
        assert_eq!(report.surviving, 8);
        let loose = restrict_tree_full_traced(&t, &rho, &ctx, FullOptions { skip_pruning: true }).unwrap();
        assert!(!survival_report(&loose, &t, &rho).unwrap().pass());
        for b in branches(&traced.tree, None) {
            let back = map_branch_back(&t, &rho, &ctx, &b).unwrap();
            assert_eq!(back.leaf, b.leaf);
        }
        assert_eq!(map_branch_back(&t, &rho, &ctx, &Branch { steps: vec![], leaf: true }), Err(Error::NotABranch));
    }
}
