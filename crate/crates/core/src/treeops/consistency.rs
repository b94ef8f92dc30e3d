//! Local consistency between good trees. "`T↾π = b`" is read as: after the
//! partial restriction by `π`, every leaf of `T` is `b`.

use crate::boolcore::{branches, DecisionTree};
use crate::error::Result;

use super::{restrict_tree_partial, GoodTreeContext};

fn forces(t: &DecisionTree, by: &DecisionTree, flip: bool, ctx: &GoodTreeContext) -> Result<bool> {
    for b in branches(by, None) {
        if !restrict_tree_partial(t, &b.restriction(), ctx)?.is_constant(b.leaf ^ flip) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every `b`-branch of either tree restricts the other to `b`.
pub fn check_consistent(t1: &DecisionTree, t2: &DecisionTree, ctx: &GoodTreeContext) -> Result<bool> {
    Ok(forces(t2, t1, false, ctx)? && forces(t1, t2, false, ctx)?)
}

/// Every `b`-branch of either tree restricts the other to `¬b`.
pub fn check_neg_consistent(t1: &DecisionTree, t2: &DecisionTree, ctx: &GoodTreeContext) -> Result<bool> {
    Ok(forces(t2, t1, true, ctx)? && forces(t1, t2, true, ctx)?)
}

/// `T` represents the disjunction of `parts`: a 0-branch of `T` restricts
/// every part to 0, a 1-branch restricts some part to 1.
pub fn check_represents(t: &DecisionTree, parts: &[DecisionTree], ctx: &GoodTreeContext) -> Result<bool> {
    for b in branches(t, None) {
        let beta = b.restriction();
        let mut restricted = parts.iter().map(|p| restrict_tree_partial(p, &beta, ctx));
        let ok = if b.leaf {
            let mut any = false;
            for r in restricted {
                if r?.is_constant(true) {
                    any = true;
                    break;
                }
            }
            any
        } else {
            restricted.try_fold(true, |acc, r| Ok::<_, crate::error::Error>(acc && r?.is_constant(false)))?
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
