use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::boolcore::{restrict_tree_simple, DecisionTree, Dnf, Restriction, VarId};
use crate::error::{Error, Result};
use crate::restrictions::{GridAssign, GridRestriction};
use crate::treeops::GoodTreeContext;

use super::{build_cdt, build_cdt_independent};

/// Blocks allowed on one CCDT branch before giving up.
pub const DEFAULT_BLOCK_CAP: usize = 64;

/// How the members of an ordered family look after a path `π` of the
/// common tree has been fixed.
pub trait FamilyView {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The tree of member `i` under `π`.
    fn member_tree(&self, i: usize, pi: &Restriction) -> Result<DecisionTree>;
}

/// Explicit trees restricted by plain substitution.
#[derive(Clone, Debug)]
pub struct TreeFamily {
    pub trees: Vec<DecisionTree>,
}

impl TreeFamily {
    pub fn new(trees: Vec<DecisionTree>) -> Self {
        TreeFamily { trees }
    }

    /// `CDT(F_i)↾ρ` for every member.
    pub fn restricted(dnfs: &[Dnf], rho: &Restriction) -> Self {
        TreeFamily::new(dnfs.iter().map(|f| restrict_tree_simple(&build_cdt(f), rho)).collect())
    }
}

impl FamilyView for TreeFamily {
    fn len(&self) -> usize {
        self.trees.len()
    }

    fn member_tree(&self, i: usize, pi: &Restriction) -> Result<DecisionTree> {
        Ok(restrict_tree_simple(&self.trees[i], pi))
    }
}

/// DNFs over Tseitin variables whose member trees are the independent
/// canonical trees `CDT(F_i↾π)`.
#[derive(Clone, Debug)]
pub struct IndependentFamily {
    pub dnfs: Vec<Dnf>,
    pub ctx: GoodTreeContext,
}

impl FamilyView for IndependentFamily {
    fn len(&self) -> usize {
        self.dnfs.len()
    }

    fn member_tree(&self, i: usize, pi: &Restriction) -> Result<DecisionTree> {
        build_cdt_independent(&self.dnfs[i], &self.ctx, pi)
    }
}

/// DNFs over the big torus seen through a grid restriction `ρ`. Member `i`
/// under `π` is `CDT(F_i↾π)` walked along `ρ`: fixed edges are followed, and
/// a live edge is queried only when its path variable is not yet known from
/// `π` or from the walk so far. Nodes keep the original edge as label.
#[derive(Clone, Debug)]
pub struct GridFamily {
    pub dnfs: Vec<Dnf>,
    pub ctx: GoodTreeContext,
    pub rho: GridRestriction,
}

impl FamilyView for GridFamily {
    fn len(&self) -> usize {
        self.dnfs.len()
    }

    fn member_tree(&self, i: usize, pi: &Restriction) -> Result<DecisionTree> {
        let t = build_cdt_independent(&self.dnfs[i], &self.ctx, pi)?;
        Ok(walk_under_grid(&t, &self.rho, pi))
    }
}

/// New-variable values implied by the live edges `π` fixes.
pub fn known_new_values(rho: &GridRestriction, pi: &Restriction) -> Vec<Option<bool>> {
    let mut known = vec![None; rho.num_new_vars()];
    for (e, x) in pi.fixed_vars() {
        if let GridAssign::Mapped { var, positive } = rho.apply(e) {
            known[var.index()] = Some(x == positive);
        }
    }
    known
}

/// `t` walked along `ρ`, querying each unknown path variable once, through
/// the first of its edges met.
pub fn walk_under_grid(t: &DecisionTree, rho: &GridRestriction, pi: &Restriction) -> DecisionTree {
    fn go(t: &DecisionTree, rho: &GridRestriction, known: &mut Vec<Option<bool>>) -> DecisionTree {
        let DecisionTree::Node { var: e, zero, one } = t else {
            return t.clone();
        };
        let child = |x: bool| if x { one.as_ref() } else { zero.as_ref() };
        match rho.apply(*e) {
            GridAssign::Fixed(x) => go(child(x), rho, known),
            GridAssign::Mapped { var, positive } => match known[var.index()] {
                Some(y) => go(child(y == positive), rho, known),
                None => {
                    let mut side = |x: bool| {
                        known[var.index()] = Some(x == positive);
                        let out = go(child(x), rho, known);
                        known[var.index()] = None;
                        out
                    };
                    let z = side(false);
                    let o = side(true);
                    DecisionTree::node(*e, z, o)
                }
            },
        }
    }
    go(t, rho, &mut known_new_values(rho, pi))
}

/// A common partial decision tree whose queries remember which member
/// asked for them. Leaves carry no value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ccdt {
    Leaf,
    Node { var: VarId, owner: usize, zero: Box<Ccdt>, one: Box<Ccdt> },
}

impl Ccdt {
    pub fn depth(&self) -> usize {
        match self {
            Ccdt::Leaf => 0,
            Ccdt::Node { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn num_leaves(&self) -> usize {
        match self {
            Ccdt::Leaf => 1,
            Ccdt::Node { zero, one, .. } => zero.num_leaves() + one.num_leaves(),
        }
    }

    /// Root-to-leaf paths, child 0 first, as `(var, value)` steps.
    pub fn paths(&self) -> Vec<Vec<(VarId, bool)>> {
        fn go(t: &Ccdt, cur: &mut Vec<(VarId, bool)>, out: &mut Vec<Vec<(VarId, bool)>>) {
            match t {
                Ccdt::Leaf => out.push(cur.clone()),
                Ccdt::Node { var, zero, one, .. } => {
                    cur.push((*var, false));
                    go(zero, cur, out);
                    cur.last_mut().expect("pushed").1 = true;
                    go(one, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Owners along a path, one per step.
    pub fn owners_along(&self, path: &[(VarId, bool)]) -> Option<Vec<usize>> {
        let mut t = self;
        let mut owners = Vec::with_capacity(path.len());
        for &(v, b) in path {
            match t {
                Ccdt::Node { var, owner, zero, one } if *var == v => {
                    owners.push(*owner);
                    t = if b { one } else { zero };
                }
                _ => return None,
            }
        }
        Some(owners)
    }
}

/// The first `len` steps of the leftmost path of `t` that is at least that
/// long, exploring child 0 first.
pub fn leftmost_path(t: &DecisionTree, len: usize) -> Option<Vec<(VarId, bool)>> {
    fn go(t: &DecisionTree, len: usize, cur: &mut Vec<(VarId, bool)>) -> bool {
        if cur.len() == len {
            return true;
        }
        let DecisionTree::Node { var, zero, one } = t else { return false };
        for (b, c) in [(false, zero), (true, one)] {
            cur.push((*var, b));
            if go(c, len, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::new();
    go(t, len, &mut cur).then_some(cur)
}

/// The next block from member `i` on: the first member whose tree under `π`
/// is deeper than `ℓ`, with the leftmost path of `ℓ + 1` steps in it.
fn next_block<V: FamilyView + ?Sized>(
    view: &V,
    l: usize,
    mut i: usize,
    pi: &Restriction,
) -> Result<Option<(usize, Vec<VarId>)>> {
    while i < view.len() {
        let t = view.member_tree(i, pi)?;
        if t.depth() > l {
            let eta = leftmost_path(&t, l + 1).expect("deep enough");
            return Ok(Some((i, eta.into_iter().map(|(v, _)| v).collect())));
        }
        i += 1;
    }
    Ok(None)
}

/// The block tree querying `vars` in order, with `leaf(σ)` at each leaf.
fn block_tree(
    vars: &[VarId],
    owner: usize,
    pi: &Restriction,
    leaf: &mut dyn FnMut(&Restriction) -> Result<Ccdt>,
) -> Result<Ccdt> {
    let Some((&v, rest)) = vars.split_first() else { return leaf(pi) };
    let zero = block_tree(rest, owner, &pi.with(v, false), leaf)?;
    let one = block_tree(rest, owner, &pi.with(v, true), leaf)?;
    Ok(Ccdt::Node { var: v, owner, zero: Box::new(zero), one: Box::new(one) })
}

/// The canonical common partial decision tree of depth parameter `ℓ`.
/// A member no deeper than `ℓ` is dropped for good; otherwise the leftmost
/// `ℓ + 1` queries of its tree are asked exhaustively and the whole family
/// is restricted by each answer.
pub fn build_ccdt<V: FamilyView + ?Sized>(view: &V, l: usize, block_cap: usize) -> Result<Ccdt> {
    fn go<V: FamilyView + ?Sized>(
        view: &V,
        l: usize,
        i: usize,
        pi: &Restriction,
        blocks: usize,
        cap: usize,
    ) -> Result<Ccdt> {
        let Some((owner, vars)) = next_block(view, l, i, pi)? else { return Ok(Ccdt::Leaf) };
        if blocks == cap {
            return Err(Error::RecursionCap(cap));
        }
        block_tree(&vars, owner, pi, &mut |next| go(view, l, owner, next, blocks + 1, cap))
    }
    go(view, l, 0, &Restriction::new(), 0, block_cap)
}

/// Depth of the CCDT without materializing it. With `stop_at`, returns as
/// soon as some branch is known to reach that depth.
pub fn ccdt_depth<V: FamilyView + ?Sized>(view: &V, l: usize, stop_at: Option<usize>) -> Result<usize> {
    fn go<V: FamilyView + ?Sized>(
        view: &V,
        l: usize,
        i: usize,
        pi: &Restriction,
        so_far: usize,
        stop: usize,
    ) -> Result<usize> {
        if so_far >= stop {
            return Ok(so_far);
        }
        let Some((owner, vars)) = next_block(view, l, i, pi)? else { return Ok(so_far) };
        if so_far / (l + 1) >= DEFAULT_BLOCK_CAP {
            return Err(Error::RecursionCap(DEFAULT_BLOCK_CAP));
        }
        let mut best = so_far + vars.len();
        for bits in 0u64..(1 << vars.len()) {
            let mut next = pi.clone();
            for (j, &v) in vars.iter().enumerate() {
                next = next.with(v, bits >> (vars.len() - 1 - j) & 1 == 1);
            }
            best = best.max(go(view, l, owner, &next, so_far + vars.len(), stop)?);
            if best >= stop {
                break;
            }
        }
        Ok(best)
    }
    go(view, l, 0, &Restriction::new(), 0, stop_at.unwrap_or(usize::MAX))
}

/// The members owning at least one query along `path` (a prefix of a CCDT
/// branch), in order of first appearance. Errors with `NotABranch` when the
/// path leaves the tree.
pub fn responsible_subfamily<V: FamilyView + ?Sized>(view: &V, l: usize, path: &[(VarId, bool)]) -> Result<Vec<usize>> {
    let mut owners: Vec<usize> = Vec::new();
    let mut pi = Restriction::new();
    let mut i = 0;
    let mut pos = 0;
    while pos < path.len() {
        let (owner, vars) = next_block(view, l, i, &pi)?.ok_or(Error::NotABranch)?;
        for &v in &vars {
            let Some(&(pv, b)) = path.get(pos) else { break };
            if pv != v {
                return Err(Error::NotABranch);
            }
            pi = pi.with(v, b);
            pos += 1;
        }
        if !owners.contains(&owner) {
            owners.push(owner);
        }
        i = owner;
    }
    Ok(owners)
}

/// The members of `inner` listed in `members`, in that order.
pub struct SubFamily<'a, V: FamilyView + ?Sized> {
    pub inner: &'a V,
    pub members: Vec<usize>,
}

impl<V: FamilyView + ?Sized> FamilyView for SubFamily<'_, V> {
    fn len(&self) -> usize {
        self.members.len()
    }

    fn member_tree(&self, i: usize, pi: &Restriction) -> Result<DecisionTree> {
        self.inner.member_tree(self.members[i], pi)
    }
}

/// Memoizes `member_tree` of a view whose trees depend only on `(i, π)`.
/// Shared across threads; a hit returns a clone.
pub struct CachedFamily<V> {
    inner: V,
    cache: Mutex<HashMap<(usize, Restriction), DecisionTree>>,
}

impl<V: FamilyView> CachedFamily<V> {
    pub fn new(inner: V) -> Self {
        CachedFamily { inner, cache: Mutex::new(HashMap::new()) }
    }

    pub fn inner(&self) -> &V {
        &self.inner
    }

    /// Number of distinct `(i, π)` pairs seen so far.
    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

impl<V: FamilyView> FamilyView for CachedFamily<V> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn member_tree(&self, i: usize, pi: &Restriction) -> Result<DecisionTree> {
        let key = (i, pi.clone());
        if let Some(t) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(t.clone());
        }
        let t = self.inner.member_tree(i, pi)?;
        self.cache.lock().expect("cache lock").insert(key, t.clone());
        Ok(t)
    }
}
