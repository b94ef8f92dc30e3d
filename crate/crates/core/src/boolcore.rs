//! Variables, terms, DNFs, restrictions and proper decision trees.
//!
//! Everything here is a plain value type. Trees are total (every leaf carries
//! a bit) and proper (no variable repeats on a root-to-leaf path).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense index of an edge variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub var: VarId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var: VarId(var), positive: true }
    }

    pub fn neg(var: u32) -> Self {
        Literal { var: VarId(var), positive: false }
    }

    /// The value of the variable that satisfies this literal.
    pub fn satisfying_value(self) -> bool {
        self.positive
    }
}

/// A conjunction of literals over distinct variables. Literal order is kept
/// because the canonical decision tree queries a term's variables in order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    literals: Vec<Literal>,
}

impl Term {
    pub fn new(literals: Vec<Literal>) -> Result<Self> {
        for (i, a) in literals.iter().enumerate() {
            if literals[..i].iter().any(|b| b.var == a.var) {
                return Err(Error::DuplicateVar(a.var));
            }
        }
        Ok(Term { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn eval(&self, assignment: impl Fn(VarId) -> bool) -> bool {
        self.literals.iter().all(|l| assignment(l.var) == l.positive)
    }
}

/// Result of restricting a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermRestriction {
    Zero,
    One,
    Term(Term),
}

/// An ordered disjunction of terms. The empty DNF is the constant 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dnf {
    terms: Vec<Term>,
    width_bound: usize,
}

impl Dnf {
    pub fn new(terms: Vec<Term>, width_bound: usize) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.width() > width_bound) {
            return Err(Error::WidthExceeded { width: t.width(), bound: width_bound });
        }
        Ok(Dnf { terms, width_bound })
    }

    /// Builds a DNF from literal lists, using the widest term as the bound.
    pub fn from_literals(terms: Vec<Vec<Literal>>) -> Result<Self> {
        let width = terms.iter().map(Vec::len).max().unwrap_or(0);
        let terms = terms.into_iter().map(Term::new).collect::<Result<Vec<_>>>()?;
        Dnf::new(terms, width)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn width_bound(&self) -> usize {
        self.width_bound
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, assignment: impl Fn(VarId) -> bool + Copy) -> bool {
        self.terms.iter().any(|t| t.eval(assignment))
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut v: Vec<VarId> = self.terms.iter().flat_map(|t| t.literals.iter().map(|l| l.var)).collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Result of restricting a DNF. A `Dnf` with no terms is the constant 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DnfRestriction {
    One,
    Dnf(Dnf),
}

/// Value assigned to a variable by a restriction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Assign {
    Zero,
    One,
    Star,
}

impl Assign {
    pub fn bit(b: bool) -> Self {
        if b {
            Assign::One
        } else {
            Assign::Zero
        }
    }

    pub fn as_bit(self) -> Option<bool> {
        match self {
            Assign::Zero => Some(false),
            Assign::One => Some(true),
            Assign::Star => None,
        }
    }
}

/// A partial assignment to `{0, 1, *}` with explicit support. Variables
/// outside the support are implicitly `*`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Restriction {
    map: BTreeMap<VarId, Assign>,
}

impl Restriction {
    pub fn new() -> Self {
        Restriction::default()
    }

    /// A restriction fixing each listed variable to the given bit.
    pub fn from_bits(pairs: impl IntoIterator<Item = (VarId, bool)>) -> Self {
        let mut r = Restriction::new();
        for (v, b) in pairs {
            r.map.insert(v, Assign::bit(b));
        }
        r
    }

    pub fn get(&self, v: VarId) -> Assign {
        self.map.get(&v).copied().unwrap_or(Assign::Star)
    }

    pub fn fixed(&self, v: VarId) -> Option<bool> {
        self.get(v).as_bit()
    }

    /// Sets a variable, overwriting any previous value.
    pub fn set(&mut self, v: VarId, a: Assign) {
        self.map.insert(v, a);
    }

    pub fn with(&self, v: VarId, b: bool) -> Self {
        let mut r = self.clone();
        r.set(v, Assign::bit(b));
        r
    }

    /// Explicitly supported variables, with their values, in variable order.
    pub fn support(&self) -> impl Iterator<Item = (VarId, Assign)> + '_ {
        self.map.iter().map(|(v, a)| (*v, *a))
    }

    /// Variables fixed to a bit, in variable order.
    pub fn fixed_vars(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.map.iter().filter_map(|(v, a)| a.as_bit().map(|b| (*v, b)))
    }

    /// Number of variables fixed to a bit.
    pub fn num_fixed(&self) -> usize {
        self.map.values().filter(|a| **a != Assign::Star).count()
    }

    pub fn is_empty(&self) -> bool {
        self.map.values().all(|a| *a == Assign::Star)
    }

    /// True when no variable is fixed to different bits by the two.
    pub fn compatible(&self, other: &Restriction) -> bool {
        self.fixed_vars().all(|(v, b)| other.fixed(v).is_none_or(|c| c == b))
    }

    /// `self ∘ other`: fixes every variable fixed by either. Errors when the
    /// two fix some variable differently.
    pub fn compose(&self, other: &Restriction) -> Result<Restriction> {
        let mut out = self.clone();
        for (v, a) in other.support() {
            match (self.get(v), a) {
                (_, Assign::Star) => {
                    out.map.entry(v).or_insert(Assign::Star);
                }
                (Assign::Star, _) => {
                    out.map.insert(v, a);
                }
                (x, y) if x == y => {}
                _ => return Err(Error::Incompatible(v)),
            }
        }
        Ok(out)
    }

    /// True when every variable fixed by `other` is fixed the same way here.
    pub fn extends(&self, other: &Restriction) -> bool {
        other.fixed_vars().all(|(v, b)| self.fixed(v) == Some(b))
    }
}

impl FromIterator<(VarId, Assign)> for Restriction {
    fn from_iter<I: IntoIterator<Item = (VarId, Assign)>>(iter: I) -> Self {
        Restriction { map: iter.into_iter().collect() }
    }
}

pub fn restrict_term(t: &Term, beta: &Restriction) -> TermRestriction {
    let mut rest = Vec::with_capacity(t.width());
    for l in &t.literals {
        match beta.fixed(l.var) {
            Some(b) if b != l.positive => return TermRestriction::Zero,
            Some(_) => {}
            None => rest.push(*l),
        }
    }
    if rest.is_empty() {
        TermRestriction::One
    } else {
        TermRestriction::Term(Term { literals: rest })
    }
}

pub fn restrict_dnf(f: &Dnf, beta: &Restriction) -> DnfRestriction {
    let mut terms = Vec::new();
    for t in &f.terms {
        match restrict_term(t, beta) {
            TermRestriction::One => return DnfRestriction::One,
            TermRestriction::Zero => {}
            TermRestriction::Term(t) => terms.push(t),
        }
    }
    DnfRestriction::Dnf(Dnf { terms, width_bound: f.width_bound })
}

/// A total, proper binary decision tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionTree {
    Leaf(bool),
    Node { var: VarId, zero: Box<DecisionTree>, one: Box<DecisionTree> },
}

impl DecisionTree {
    pub fn leaf(b: bool) -> Self {
        DecisionTree::Leaf(b)
    }

    pub fn node(var: VarId, zero: DecisionTree, one: DecisionTree) -> Self {
        DecisionTree::Node { var, zero: Box::new(zero), one: Box::new(one) }
    }

    /// `node` with the children given by their query value.
    pub fn query(var: VarId, child: impl Fn(bool) -> DecisionTree) -> Self {
        DecisionTree::node(var, child(false), child(true))
    }

    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 0,
            DecisionTree::Node { zero, one, .. } => 1 + zero.depth().max(one.depth()),
        }
    }

    pub fn num_leaves(&self) -> usize {
        match self {
            DecisionTree::Leaf(_) => 1,
            DecisionTree::Node { zero, one, .. } => zero.num_leaves() + one.num_leaves(),
        }
    }

    pub fn is_leaf(&self) -> Option<bool> {
        match self {
            DecisionTree::Leaf(b) => Some(*b),
            DecisionTree::Node { .. } => None,
        }
    }

    /// True when some leaf carries `b`.
    pub fn has_leaf(&self, b: bool) -> bool {
        match self {
            DecisionTree::Leaf(c) => *c == b,
            DecisionTree::Node { zero, one, .. } => zero.has_leaf(b) || one.has_leaf(b),
        }
    }

    /// True when every leaf carries `b`.
    pub fn is_constant(&self, b: bool) -> bool {
        !self.has_leaf(!b)
    }

    pub fn child(&self, b: bool) -> Option<&DecisionTree> {
        match self {
            DecisionTree::Leaf(_) => None,
            DecisionTree::Node { zero, one, .. } => Some(if b { one } else { zero }),
        }
    }

    pub fn eval(&self, assignment: impl Fn(VarId) -> bool) -> bool {
        let mut t = self;
        loop {
            match t {
                DecisionTree::Leaf(b) => return *b,
                DecisionTree::Node { var, zero, one } => t = if assignment(*var) { one } else { zero },
            }
        }
    }

    /// All variables queried anywhere, sorted.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        fn go(t: &DecisionTree, out: &mut Vec<VarId>) {
            if let DecisionTree::Node { var, zero, one } = t {
                out.push(*var);
                go(zero, out);
                go(one, out);
            }
        }
        go(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// True when no variable repeats on a root-to-leaf path.
    pub fn is_proper(&self) -> bool {
        fn go(t: &DecisionTree, path: &mut Vec<VarId>) -> bool {
            match t {
                DecisionTree::Leaf(_) => true,
                DecisionTree::Node { var, zero, one } => {
                    if path.contains(var) {
                        return false;
                    }
                    path.push(*var);
                    let ok = go(zero, path) && go(one, path);
                    path.pop();
                    ok
                }
            }
        }
        go(self, &mut Vec::new())
    }

    /// Follows a branch's steps from the root, returning the reached subtree.
    pub fn follow(&self, steps: &[(VarId, bool)]) -> Option<&DecisionTree> {
        let mut t = self;
        for &(v, b) in steps {
            match t {
                DecisionTree::Node { var, zero, one } if *var == v => t = if b { one } else { zero },
                _ => return None,
            }
        }
        Some(t)
    }
}

/// A root-to-leaf path: the queried variables with the values taken, and the
/// leaf bit reached.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub steps: Vec<(VarId, bool)>,
    pub leaf: bool,
}

impl Branch {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn restriction(&self) -> Restriction {
        Restriction::from_bits(self.steps.iter().copied())
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.steps.iter().map(|s| s.0).collect()
    }
}

/// Standard restriction: a starred node is kept, a fixed node is replaced by
/// the matching child.
pub fn restrict_tree_simple(t: &DecisionTree, beta: &Restriction) -> DecisionTree {
    match t {
        DecisionTree::Leaf(b) => DecisionTree::Leaf(*b),
        DecisionTree::Node { var, zero, one } => match beta.fixed(*var) {
            Some(false) => restrict_tree_simple(zero, beta),
            Some(true) => restrict_tree_simple(one, beta),
            None => DecisionTree::node(*var, restrict_tree_simple(zero, beta), restrict_tree_simple(one, beta)),
        },
    }
}

/// Branches ending in leaf `b` (or all branches for `None`), child 0 first,
/// depth first.
pub fn branches(t: &DecisionTree, b: Option<bool>) -> Vec<Branch> {
    let mut out = Vec::new();
    let mut steps = Vec::new();
    fn go(t: &DecisionTree, b: Option<bool>, steps: &mut Vec<(VarId, bool)>, out: &mut Vec<Branch>) {
        match t {
            DecisionTree::Leaf(c) => {
                if b.is_none_or(|b| b == *c) {
                    out.push(Branch { steps: steps.clone(), leaf: *c });
                }
            }
            DecisionTree::Node { var, zero, one } => {
                steps.push((*var, false));
                go(zero, b, steps, out);
                steps.last_mut().expect("pushed above").1 = true;
                go(one, b, steps, out);
                steps.pop();
            }
        }
    }
    go(t, b, &mut steps, &mut out);
    out
}

/// Whether every node has a leaf within `k` queries below it.
pub fn is_k_clipped(t: &DecisionTree, k: usize) -> bool {
    // returns the distance to the nearest leaf, or None once a node fails
    fn nearest(t: &DecisionTree, k: usize) -> Option<usize> {
        match t {
            DecisionTree::Leaf(_) => Some(0),
            DecisionTree::Node { zero, one, .. } => {
                let d = 1 + nearest(zero, k)?.min(nearest(one, k)?);
                (d <= k).then_some(d)
            }
        }
    }
    nearest(t, k).is_some()
}

/// Draws a branch from W(T): a fair coin at every node.
pub fn sample_walk<R: Rng + ?Sized>(t: &DecisionTree, rng: &mut R) -> Branch {
    let mut steps = Vec::new();
    let mut node = t;
    loop {
        match node {
            DecisionTree::Leaf(b) => return Branch { steps, leaf: *b },
            DecisionTree::Node { var, zero, one } => {
                let b: bool = rng.random();
                steps.push((*var, b));
                node = if b { one } else { zero };
            }
        }
    }
}

pub const MAX_EXACT_LEAVES: usize = 1 << 20;

/// The exact law of W(T), in branch enumeration order.
pub fn exact_walk_distribution(t: &DecisionTree) -> Result<Vec<(Branch, BigRational)>> {
    if t.num_leaves() > MAX_EXACT_LEAVES {
        return Err(Error::TooManyLeaves(MAX_EXACT_LEAVES));
    }
    Ok(branches(t, None)
        .into_iter()
        .map(|b| {
            let mass = BigRational::new(BigInt::one(), BigInt::one() << b.len());
            (b, mass)
        })
        .collect())
}

/// Sum of masses of an exact distribution, for normalisation checks.
pub fn total_mass(dist: &[(Branch, BigRational)]) -> BigRational {
    dist.iter().fold(BigRational::zero(), |acc, (_, m)| acc + m)
}

pub fn complement_tree(t: &DecisionTree) -> DecisionTree {
    match t {
        DecisionTree::Leaf(b) => DecisionTree::Leaf(!b),
        DecisionTree::Node { var, zero, one } => DecisionTree::node(*var, complement_tree(zero), complement_tree(one)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(i: u32) -> VarId {
        VarId(i)
    }

    fn term(lits: &[Literal]) -> Term {
        Term::new(lits.to_vec()).unwrap()
    }

    #[test]
    fn term_restriction_cases() {
        let t = term(&[Literal::pos(1), Literal::neg(2)]);
        let r = restrict_term(&t, &Restriction::from_bits([(x(1), true)]));
        assert_eq!(r, TermRestriction::Term(term(&[Literal::neg(2)])));
        assert_eq!(restrict_term(&t, &Restriction::from_bits([(x(2), true)])), TermRestriction::Zero);
        assert_eq!(restrict_term(&t, &Restriction::from_bits([(x(1), true), (x(2), false)])), TermRestriction::One);
    }

    #[test]
    fn dnf_restriction_cases() {
        let f = Dnf::from_literals(vec![vec![Literal::pos(1)], vec![Literal::pos(2), Literal::pos(3)]]).unwrap();
        assert_eq!(restrict_dnf(&f, &Restriction::from_bits([(x(1), true)])), DnfRestriction::One);
        match restrict_dnf(&f, &Restriction::from_bits([(x(1), false)])) {
            DnfRestriction::Dnf(g) => assert_eq!(g.terms(), &[term(&[Literal::pos(2), Literal::pos(3)])]),
            other => panic!("{other:?}"),
        }
        match restrict_dnf(&f, &Restriction::from_bits([(x(1), false), (x(2), false)])) {
            DnfRestriction::Dnf(g) => assert!(g.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicate_and_width_checks() {
        assert!(Term::new(vec![Literal::pos(1), Literal::neg(1)]).is_err());
        let t = term(&[Literal::pos(1), Literal::pos(2)]);
        assert!(Dnf::new(vec![t], 1).is_err());
    }

    #[test]
    fn simple_tree_restriction() {
        let t = DecisionTree::node(x(1), DecisionTree::leaf(false), DecisionTree::leaf(true));
        assert_eq!(restrict_tree_simple(&t, &Restriction::from_bits([(x(1), true)])), DecisionTree::leaf(true));
        assert_eq!(restrict_tree_simple(&t, &Restriction::new()), t);
        let t = DecisionTree::node(
            x(1),
            DecisionTree::node(x(2), DecisionTree::leaf(false), DecisionTree::leaf(true)),
            DecisionTree::leaf(true),
        );
        let r = restrict_tree_simple(&t, &Restriction::from_bits([(x(2), false)]));
        assert_eq!(r, DecisionTree::node(x(1), DecisionTree::leaf(false), DecisionTree::leaf(true)));
    }

    fn complete(depth: u32, offset: u32) -> DecisionTree {
        if depth == 0 {
            DecisionTree::leaf(offset % 2 == 1)
        } else {
            DecisionTree::node(x(depth), complete(depth - 1, 2 * offset), complete(depth - 1, 2 * offset + 1))
        }
    }

    #[test]
    fn branch_enumeration() {
        let b = branches(&DecisionTree::leaf(true), None);
        assert_eq!(b, vec![Branch { steps: vec![], leaf: true }]);
        let t = DecisionTree::node(x(1), DecisionTree::leaf(false), DecisionTree::leaf(true));
        let b = branches(&t, None);
        assert_eq!(
            b,
            vec![Branch { steps: vec![(x(1), false)], leaf: false }, Branch { steps: vec![(x(1), true)], leaf: true }]
        );
        assert_eq!(branches(&complete(3, 0), None).len(), 8);
        assert_eq!(branches(&complete(3, 0), Some(true)).len(), 4);
    }

    #[test]
    fn clipping() {
        assert!(is_k_clipped(&complete(3, 0), 3));
        assert!(!is_k_clipped(&complete(3, 0), 2));
        assert!(is_k_clipped(&DecisionTree::leaf(false), 0));
    }

    #[test]
    fn walk_masses() {
        let leaf = DecisionTree::leaf(false);
        let d = exact_walk_distribution(&leaf).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].1.is_one());
        let t = DecisionTree::node(
            x(1),
            DecisionTree::leaf(false),
            DecisionTree::node(x(2), DecisionTree::leaf(false), DecisionTree::leaf(true)),
        );
        let d = exact_walk_distribution(&t).unwrap();
        let masses: Vec<BigRational> = d.iter().map(|p| p.1.clone()).collect();
        let q = |n: i64, m: i64| BigRational::new(n.into(), m.into());
        assert_eq!(masses, vec![q(1, 2), q(1, 4), q(1, 4)]);
        assert!(total_mass(&d).is_one());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_walk(&leaf, &mut rng).is_empty());
    }

    #[test]
    fn complement_involution() {
        let t = complete(3, 0);
        assert_eq!(complement_tree(&DecisionTree::leaf(false)), DecisionTree::leaf(true));
        assert_eq!(complement_tree(&complement_tree(&t)), t);
        let c = complement_tree(&t);
        let a: Vec<_> = branches(&c, Some(true)).into_iter().map(|b| b.steps).collect();
        let b: Vec<_> = branches(&t, Some(false)).into_iter().map(|b| b.steps).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn composition_requires_compatibility() {
        let a = Restriction::from_bits([(x(1), true)]);
        let b = Restriction::from_bits([(x(1), false)]);
        assert!(!a.compatible(&b));
        assert_eq!(a.compose(&b), Err(Error::Incompatible(x(1))));
        let c = Restriction::from_bits([(x(2), false)]);
        let ac = a.compose(&c).unwrap();
        assert!(ac.extends(&a) && ac.extends(&c));
    }
}
