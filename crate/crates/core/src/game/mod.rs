//! The sampling game for grid restrictions and the random-path algorithms
//! `A` (driven by a fixed restriction and bit streams) and `Ã` (driven by
//! random walks and a sampler), plus a stochastic dominance test.

mod sampler;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolcore::{Assign, DecisionTree, Restriction, VarId};
use crate::canonical::{known_new_values, Ccdt, FamilyView};
use crate::error::{Error, Result};
use crate::restrictions::{GridAssign, GridRestriction};

pub use sampler::{GameState, StarDecision, StarTag, StepRecord, Strategy};

/// The restriction algorithm `A` follows.
#[derive(Clone, Copy, Debug)]
pub enum Env<'a> {
    Uniform(&'a Restriction),
    /// Stars are counted once per new variable.
    Grid(&'a GridRestriction),
}

/// One exhaustive block attached to the common tree: the queried
/// variables, the member that asked for them, and the bits taken from `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub owner: usize,
    pub vars: Vec<VarId>,
    pub bits: Vec<bool>,
}

/// What either algorithm returns: the partial common tree, built from its
/// blocks, and the path `π` through it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutput {
    pub blocks: Vec<Block>,
    pub pi: Vec<(VarId, bool)>,
    pub iterations: usize,
}

impl RunOutput {
    pub fn pi_len(&self) -> usize {
        self.pi.len()
    }

    /// Each block queries its variables exhaustively; only the child on
    /// `π` continues.
    pub fn tree(&self) -> Ccdt {
        fn exhaustive(block: &Block, vi: usize, rest: &dyn Fn() -> Ccdt) -> Ccdt {
            let Some(&var) = block.vars.get(vi) else { return rest() };
            let child = |b: bool| {
                if block.bits.get(vi) == Some(&b) {
                    exhaustive(block, vi + 1, rest)
                } else {
                    exhaustive(block, vi + 1, &|| Ccdt::Leaf)
                }
            };
            Ccdt::Node { var, owner: block.owner, zero: Box::new(child(false)), one: Box::new(child(true)) }
        }
        fn go(blocks: &[Block]) -> Ccdt {
            match blocks.split_first() {
                None => Ccdt::Leaf,
                Some((b, rest)) => exhaustive(b, 0, &|| go(rest)),
            }
        }
        go(&self.blocks)
    }
}

/// The stars met in one iteration of `Ã`, with their classification in
/// grid mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub owner: usize,
    pub stars: Vec<(VarId, Option<StarTag>)>,
    /// Whether the segment became a block of the common tree.
    pub attached: bool,
}

/// Everything `Ã` saw: `π` and every segment `η_{i,π}`, kept or not.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub pi: Vec<(VarId, bool)>,
    pub segments: Vec<Segment>,
    /// Subgrid of the associated center of every bad star, in order.
    pub bad_subgrids: Vec<usize>,
}

impl PathRecord {
    /// `|η|`, the total length of all segments.
    pub fn eta_len(&self) -> usize {
        self.segments.iter().map(|s| s.stars.len()).sum()
    }

    pub fn count(&self, tag: StarTag) -> usize {
        self.segments.iter().flat_map(|s| &s.stars).filter(|(_, t)| *t == Some(tag)).count()
    }

    /// `|η_res| ≤ 3(|η_good| + |η_bad|)`.
    pub fn residual_within_bound(&self) -> bool {
        self.count(StarTag::Residual) <= 3 * (self.count(StarTag::Good) + self.count(StarTag::Bad))
    }

    /// Bad stars charge the eliminations of their subgrid; the charges are
    /// disjoint when no two bad stars share a subgrid.
    pub fn bad_charges_disjoint(&self) -> bool {
        let mut s = self.bad_subgrids.clone();
        s.sort_unstable();
        s.windows(2).all(|w| w[0] != w[1])
    }
}

enum WalkEnd {
    Leaf,
    Stars(Vec<VarId>),
    Dry,
}

fn walk_a(
    t: &DecisionTree,
    env: Env<'_>,
    known: &mut [Option<bool>],
    x: &[bool],
    xc: &mut usize,
    l: usize,
) -> WalkEnd {
    let mut node = t;
    let mut stars = Vec::new();
    loop {
        let DecisionTree::Node { var: e, zero, one } = node else { return WalkEnd::Leaf };
        let given = match env {
            Env::Uniform(rho) => rho.fixed(*e),
            Env::Grid(rho) => match rho.apply(*e) {
                GridAssign::Fixed(b) => Some(b),
                GridAssign::Mapped { var, positive } => known[var.index()].map(|y| y == positive),
            },
        };
        let b = match given {
            Some(b) => b,
            None => {
                let Some(&b) = x.get(*xc) else { return WalkEnd::Dry };
                *xc += 1;
                if let Env::Grid(rho) = env {
                    if let GridAssign::Mapped { var, positive } = rho.apply(*e) {
                        known[var.index()] = Some(b == positive);
                    }
                }
                stars.push(*e);
                if stars.len() == l + 1 {
                    return WalkEnd::Stars(stars);
                }
                b
            }
        };
        node = if b { one } else { zero };
    }
}

fn attach(out: &mut RunOutput, pi: &mut Restriction, owner: usize, vars: Vec<VarId>, y: &[bool], yc: &mut usize) {
    let take = vars.len().min(y.len() - *yc);
    let bits = y[*yc..*yc + take].to_vec();
    *yc += take;
    for (&v, &b) in vars.iter().zip(&bits) {
        *pi = pi.with(v, b);
        out.pi.push((v, b));
    }
    out.blocks.push(Block { owner, vars, bits });
}

/// Algorithm `A`: walk each member's tree under `π` along `ρ`, reading `x`
/// at stars; a leaf rewinds `x` and moves to the next member, `ℓ + 1` stars
/// become a block whose branch is read from `y`. Halts when the members or
/// either stream run out.
pub fn run_algorithm_a<V: FamilyView + ?Sized>(
    view: &V,
    env: Env<'_>,
    x: &[bool],
    y: &[bool],
    l: usize,
) -> Result<RunOutput> {
    let mut out = RunOutput { blocks: Vec::new(), pi: Vec::new(), iterations: 0 };
    let mut pi = Restriction::new();
    let (mut i, mut xc, mut yc) = (0, 0, 0);
    while i < view.len() && xc < x.len() && yc < y.len() {
        out.iterations += 1;
        let t = view.member_tree(i, &pi)?;
        let mut known = match env {
            Env::Grid(rho) => known_new_values(rho, &pi),
            Env::Uniform(_) => Vec::new(),
        };
        let start = xc;
        match walk_a(&t, env, &mut known, x, &mut xc, l) {
            WalkEnd::Leaf => {
                xc = start;
                i += 1;
            }
            WalkEnd::Dry => break,
            WalkEnd::Stars(vars) => attach(&mut out, &mut pi, i, vars, y, &mut yc),
        }
    }
    Ok(out)
}

/// How `Ã` decides which variables on a random walk are stars.
pub enum Tilde<'a> {
    /// Independently with probability `p`.
    Uniform { p: f64 },
    /// By playing the sampling game; star counting is per subgrid pair.
    Grid { game: &'a mut GameState },
}

/// Algorithm `Ã`: take a random walk down each member's tree under `π`,
/// deciding stars on the way until `ℓ + 1` are found or a leaf is reached.
pub fn run_algorithm_a_tilde<V: FamilyView + ?Sized, R: Rng + ?Sized>(
    view: &V,
    mut mode: Tilde<'_>,
    y: &[bool],
    l: usize,
    rng: &mut R,
) -> Result<(RunOutput, PathRecord)> {
    let mut out = RunOutput { blocks: Vec::new(), pi: Vec::new(), iterations: 0 };
    let mut record = PathRecord::default();
    let mut pi = Restriction::new();
    let (mut i, mut yc) = (0, 0);
    while i < view.len() && yc < y.len() {
        out.iterations += 1;
        let t = view.member_tree(i, &pi)?;
        let stars = match &mut mode {
            Tilde::Uniform { p } => walk_uniform(&t, *p, l, rng),
            Tilde::Grid { game } => walk_grid(&t, game, &out.pi, l, &mut record, rng)?,
        };
        let attached = stars.len() > l;
        record.segments.push(Segment { owner: i, stars: stars.clone(), attached });
        if attached {
            attach(&mut out, &mut pi, i, stars.into_iter().map(|(v, _)| v).collect(), y, &mut yc);
        } else {
            i += 1;
        }
    }
    record.pi = out.pi.clone();
    if record.pi.len() > record.eta_len() {
        return Err(Error::Invariant("|π| exceeds |η|".into()));
    }
    Ok((out, record))
}

fn walk_uniform<R: Rng + ?Sized>(t: &DecisionTree, p: f64, l: usize, rng: &mut R) -> Vec<(VarId, Option<StarTag>)> {
    let p = p.clamp(0.0, 1.0);
    let mut node = t;
    let mut stars = Vec::new();
    while let DecisionTree::Node { var, zero, one } = node {
        if rng.random_bool(p) {
            stars.push((*var, None));
            if stars.len() == l + 1 {
                break;
            }
        }
        node = if rng.random() { one } else { zero };
    }
    stars
}

fn walk_grid<R: Rng + ?Sized>(
    t: &DecisionTree,
    game: &mut GameState,
    pi: &[(VarId, bool)],
    l: usize,
    record: &mut PathRecord,
    rng: &mut R,
) -> Result<Vec<(VarId, Option<StarTag>)>> {
    let mut counted: Vec<usize> = pi.iter().filter_map(|&(e, _)| game.slot_of(e)).collect();
    let mut node = t;
    let mut stars = Vec::new();
    while let DecisionTree::Node { var: e, zero, one } = node {
        let decided = match game.value(*e) {
            Some(Assign::Star) => StarDecision::Star,
            Some(a) => StarDecision::Value(a.as_bit().expect("not a star")),
            None => game.sampler_step(*e, rng)?,
        };
        let b = match decided {
            StarDecision::Value(b) => b,
            StarDecision::Star => {
                let slot = game.slot_of(*e).ok_or_else(|| Error::Invariant(format!("star {e:?} on no path")))?;
                if !counted.contains(&slot) {
                    counted.push(slot);
                    let tag = game.tag(*e);
                    if tag == Some(StarTag::Bad) {
                        let step = game.steps().iter().rev().find(|s| s.edge == *e);
                        if let Some(c) = step.and_then(|s| s.center) {
                            record.bad_subgrids.push(c.subgrid);
                        }
                    }
                    stars.push((*e, tag));
                    if stars.len() == l + 1 {
                        break;
                    }
                }
                rng.random()
            }
        };
        node = if b { one } else { zero };
    }
    Ok(stars)
}

/// A JSON-friendly dump of one `Ã` run in grid mode.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Transcript {
    pub output: RunOutput,
    pub record: PathRecord,
    pub steps: Vec<StepRecord>,
    pub chosen: Vec<Option<usize>>,
}

impl Transcript {
    pub fn new(output: RunOutput, record: PathRecord, game: &GameState) -> Self {
        Transcript { output, record, steps: game.steps().to_vec(), chosen: game.chosen().to_vec() }
    }
}

/// Smallest sample accepted by [`dominance_test`] on either side.
pub const MIN_DOMINANCE_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub pass: bool,
    /// Largest `Ŝ_A(t) − Ŝ_B(t)` over thresholds `t`.
    pub max_gap: f64,
    /// Threshold where the largest gap occurs.
    pub at: u64,
    /// Allowed gap: the one-sided two-sample band at the given level.
    pub band: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Whether `B` stochastically dominates `A`: passes unless the empirical
/// survival function of `B` falls below that of `A` at some threshold by
/// more than a simultaneous one-sided band of confidence `level`.
pub fn dominance_test(a: &[u64], b: &[u64], level: f64) -> Result<DominanceVerdict> {
    for s in [a, b] {
        if s.len() < MIN_DOMINANCE_SAMPLES {
            return Err(Error::SampleTooSmall(s.len(), MIN_DOMINANCE_SAMPLES));
        }
    }
    if !(0.0..1.0).contains(&level) {
        return Err(Error::Config(format!("confidence level {level} outside [0, 1)")));
    }
    let survival = |s: &[u64]| {
        let mut v = s.to_vec();
        v.sort_unstable();
        v
    };
    let (sa, sb) = (survival(a), survival(b));
    let frac_at_least = |v: &[u64], t: u64| (v.len() - v.partition_point(|&x| x < t)) as f64 / v.len() as f64;
    let mut thresholds: Vec<u64> = sa.iter().chain(&sb).copied().collect();
    thresholds.sort_unstable();
    thresholds.dedup();
    let (mut max_gap, mut at) = (f64::NEG_INFINITY, 0);
    for &t in &thresholds {
        let gap = frac_at_least(&sa, t) - frac_at_least(&sb, t);
        if gap > max_gap {
            max_gap = gap;
            at = t;
        }
    }
    let (n, m) = (a.len() as f64, b.len() as f64);
    let band = (-(1.0 - level).ln() * (n + m) / (2.0 * n * m)).sqrt();
    Ok(DominanceVerdict { pass: max_gap <= band, max_gap, at, band, n_a: a.len(), n_b: b.len() })
}
