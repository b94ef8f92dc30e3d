//! Generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::Rng;
use switchlab::boolcore::{DecisionTree, VarId};
use switchlab::gridgraph::is_independent;
use switchlab::treeops::GoodTreeContext;

/// A random tree of depth at most `max_depth` whose every branch queries an
/// independent set of edges drawn from `pool`.
pub fn random_good_tree<R: Rng + ?Sized>(ctx: &GoodTreeContext, pool: &[VarId], max_depth: usize, rng: &mut R) -> DecisionTree {
    fn go<R: Rng + ?Sized>(ctx: &GoodTreeContext, pool: &[VarId], path: &mut Vec<VarId>, left: usize, rng: &mut R) -> DecisionTree {
        if left == 0 || (!path.is_empty() && rng.random_bool(0.2)) {
            return DecisionTree::leaf(rng.random());
        }
        for _ in 0..20 {
            let e = *pool.choose(rng).expect("nonempty pool");
            if path.contains(&e) {
                continue;
            }
            path.push(e);
            if is_independent(&ctx.graph, path).unwrap() {
                let zero = go(ctx, pool, path, left - 1, rng);
                let one = go(ctx, pool, path, left - 1, rng);
                path.pop();
                return DecisionTree::node(e, zero, one);
            }
            path.pop();
        }
        DecisionTree::leaf(rng.random())
    }
    go(ctx, pool, &mut Vec::new(), max_depth, rng)
}

/// Every proper tree over `vars` of depth at most `depth`, leaves labelled
/// both ways.
pub fn labelled_trees(vars: &[VarId], depth: usize) -> Vec<DecisionTree> {
    let mut out = vec![DecisionTree::leaf(false), DecisionTree::leaf(true)];
    if depth == 0 {
        return out;
    }
    for (i, &v) in vars.iter().enumerate() {
        let rest: Vec<VarId> = vars.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &w)| w).collect();
        let subs = labelled_trees(&rest, depth - 1);
        for a in &subs {
            for b in &subs {
                out.push(DecisionTree::node(v, a.clone(), b.clone()));
            }
        }
    }
    out
}
