//! Canonical decision trees of DNFs and canonical common partial decision
//! trees of ordered families.

mod ccdt;

use serde::{Deserialize, Serialize};

use crate::boolcore::{restrict_tree_simple, DecisionTree, Dnf, Restriction, Term, VarId};
use crate::error::{Error, Result};
use crate::treeops::{restrict_tree_partial, GoodTreeContext};

pub use ccdt::{
    build_ccdt, ccdt_depth, CachedFamily, known_new_values, leftmost_path, responsible_subfamily, walk_under_grid, Ccdt, FamilyView,
    GridFamily, IndependentFamily, SubFamily, TreeFamily, DEFAULT_BLOCK_CAP,
};

/// An ordered list of DNFs sharing a width bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DnfFamily {
    pub dnfs: Vec<Dnf>,
    pub width_bound: usize,
}

impl DnfFamily {
    pub fn new(dnfs: Vec<Dnf>, width_bound: usize) -> Result<Self> {
        if let Some(f) = dnfs.iter().find(|f| f.terms().iter().any(|t| t.width() > width_bound)) {
            let width = f.terms().iter().map(Term::width).max().unwrap_or(0);
            return Err(Error::WidthExceeded { width, bound: width_bound });
        }
        Ok(DnfFamily { dnfs, width_bound })
    }

    pub fn len(&self) -> usize {
        self.dnfs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dnfs.is_empty()
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.dnfs.iter().flat_map(Dnf::vars).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Queries the literals of `t` in order until one fails (leaf 0) or all
/// hold (leaf 1).
pub fn term_tree(t: &Term) -> DecisionTree {
    t.literals().iter().rev().fold(DecisionTree::leaf(true), |rest, l| {
        if l.positive {
            DecisionTree::node(l.var, DecisionTree::leaf(false), rest)
        } else {
            DecisionTree::node(l.var, rest, DecisionTree::leaf(false))
        }
    })
}

/// Replaces every 0-leaf of `t`, reached by branch `σ`, with `attach(σ)`.
fn graft(
    t: &DecisionTree,
    steps: &mut Vec<(VarId, bool)>,
    attach: &mut dyn FnMut(&[(VarId, bool)]) -> Result<DecisionTree>,
) -> Result<DecisionTree> {
    match t {
        DecisionTree::Leaf(true) => Ok(DecisionTree::Leaf(true)),
        DecisionTree::Leaf(false) => attach(steps),
        DecisionTree::Node { var, zero, one } => {
            steps.push((*var, false));
            let z = graft(zero, steps, attach)?;
            steps.last_mut().expect("pushed").1 = true;
            let o = graft(one, steps, attach)?;
            steps.pop();
            Ok(DecisionTree::node(*var, z, o))
        }
    }
}

fn cdt_from(
    terms: &[Term],
    pi: &Restriction,
    restrict: &dyn Fn(&DecisionTree, &Restriction) -> Result<DecisionTree>,
) -> Result<DecisionTree> {
    for (i, term) in terms.iter().enumerate() {
        let s = restrict(&term_tree(term), pi)?;
        if !s.has_leaf(true) {
            continue;
        }
        let rest = &terms[i + 1..];
        return graft(&s, &mut Vec::new(), &mut |steps| {
            let mut next = pi.clone();
            for &(v, b) in steps {
                next = next.with(v, b);
            }
            cdt_from(rest, &next, restrict)
        });
    }
    Ok(DecisionTree::leaf(false))
}

/// The canonical decision tree: each term's tree, restricted by the branch
/// so far, is attached at every 0-leaf unless it has no 1-leaf left.
pub fn build_cdt(f: &Dnf) -> DecisionTree {
    build_cdt_under(f, &Restriction::new())
}

/// The canonical decision tree of `F↾π`, where `π` fixes variables.
pub fn build_cdt_under(f: &Dnf, pi: &Restriction) -> DecisionTree {
    cdt_from(f.terms(), pi, &|t, r| Ok(restrict_tree_simple(t, r))).expect("simple restriction cannot fail")
}

/// The canonical decision tree with every term tree restricted by the
/// closure-based partial restriction, so branches stay independent in
/// `G − supp(π)`.
pub fn build_cdt_independent(f: &Dnf, ctx: &GoodTreeContext, pi: &Restriction) -> Result<DecisionTree> {
    cdt_from(f.terms(), pi, &|t, r| restrict_tree_partial(t, r, ctx))
}
