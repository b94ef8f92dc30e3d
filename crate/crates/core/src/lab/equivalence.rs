use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{path_edges_around, random_dnf, run_trials, trial_rng, DEFAULT_LEVEL};
use crate::boolcore::{branches, DecisionTree, VarId};
use crate::canonical::{CachedFamily, IndependentFamily};
use crate::error::{Error, Result};
use crate::game::{
    dominance_test, run_algorithm_a, run_algorithm_a_tilde, DominanceVerdict, Env, GameState, Strategy, Tilde,
    MIN_DOMINANCE_SAMPLES,
};
use crate::restrictions::{GridParams, GridSampler};
use crate::treeops::GoodTreeContext;

/// A probability `num / 2^log2_den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dyadic {
    pub num: u64,
    pub log2_den: u32,
}

impl Dyadic {
    pub fn new(num: u64, log2_den: u32) -> Result<Self> {
        if log2_den > 32 || num > 1u64 << log2_den {
            return Err(Error::Config(format!("{num}/2^{log2_den} is not a probability")));
        }
        Ok(Dyadic { num, log2_den })
    }

    pub fn half() -> Self {
        Dyadic { num: 1, log2_den: 1 }
    }

    pub fn quarter() -> Self {
        Dyadic { num: 1, log2_den: 2 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.log2_den) as f64
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, 1u64 << self.log2_den)
    }
}

/// Every tree over `vars` that never queries a variable twice on a path.
/// Leaves are all 0: the walk-length distributions ignore labels.
pub fn all_proper_trees(vars: &[VarId]) -> Vec<DecisionTree> {
    let mut out = vec![DecisionTree::leaf(false)];
    for (i, &v) in vars.iter().enumerate() {
        let rest: Vec<VarId> = vars.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &w)| w).collect();
        let subs = all_proper_trees(&rest);
        for z in &subs {
            for o in &subs {
                out.push(DecisionTree::node(v, z.clone(), o.clone()));
            }
        }
    }
    out
}

/// Numerators over a common power of two, indexed by `|π|`.
struct Exact {
    nums: Vec<u128>,
    log2_den: u32,
}

impl Exact {
    fn to_rationals(&self) -> Vec<BigRational> {
        let den = BigInt::from(1u8) << self.log2_den;
        self.nums.iter().map(|&n| BigRational::new(BigInt::from(n), den.clone())).collect()
    }
}

fn denominator_exp(nvars: usize, p: Dyadic) -> Result<u32> {
    let d = nvars as u32 * (p.log2_den + 2);
    if d > 120 {
        return Err(Error::Config(format!("{nvars} variables at p = {p} exceed exact precision")));
    }
    Ok(d)
}

fn var_slots(t: &DecisionTree, vars: &[VarId]) -> Result<Vec<Option<usize>>> {
    let top = vars.iter().chain(&t.vars()).map(|v| v.index()).max().map_or(0, |m| m + 1);
    let mut slot = vec![None; top];
    for (i, v) in vars.iter().enumerate() {
        slot[v.index()] = Some(i);
    }
    if let Some(v) = t.vars().into_iter().find(|v| slot[v.index()].is_none()) {
        return Err(Error::Config(format!("tree queries {v:?}, which is not listed")));
    }
    Ok(slot)
}

/// `ρ ~ R_p` over `vars`, then a uniform walk in `T↾ρ`.
fn restricted_walks(t: &DecisionTree, vars: &[VarId], p: Dyadic) -> Result<Exact> {
    let nv = vars.len();
    let log2_den = denominator_exp(nv, p)?;
    let slot = var_slots(t, vars)?;
    let star = 2 * p.num as u128;
    let fixed = (1u128 << p.log2_den) - p.num as u128;
    let mut nums = vec![0u128; nv + 1];
    // codes: 0, 1 fixed; 2 star
    let mut code = vec![0u8; nv];
    fn walk(t: &DecisionTree, slot: &[Option<usize>], code: &[u8], len: usize, w: u128, nums: &mut [u128]) {
        match t {
            DecisionTree::Leaf(_) => nums[len] += w,
            DecisionTree::Node { var, zero, one } => match code[slot[var.index()].expect("checked")] {
                0 => walk(zero, slot, code, len, w, nums),
                1 => walk(one, slot, code, len, w, nums),
                _ => {
                    walk(zero, slot, code, len + 1, w / 2, nums);
                    walk(one, slot, code, len + 1, w / 2, nums);
                }
            },
        }
    }
    for mut c in 0..3usize.pow(nv as u32) {
        let mut w: u128 = 1;
        for x in code.iter_mut() {
            *x = (c % 3) as u8;
            c /= 3;
            w *= if *x == 2 { star } else { fixed };
        }
        // spare factor 2^nv pays for the walk's halvings
        walk(t, &slot, &code, 0, w << nv, &mut nums);
    }
    Ok(Exact { nums, log2_den })
}

/// `σ ~ W(T)`, then each variable of `σ` kept with probability `p`.
fn thinned_walks(t: &DecisionTree, vars: &[VarId], p: Dyadic) -> Result<Exact> {
    let nv = vars.len();
    let log2_den = denominator_exp(nv, p)?;
    var_slots(t, vars)?;
    let keep = p.num as u128;
    let drop = (1u128 << p.log2_den) - keep;
    let mut nums = vec![0u128; nv + 1];
    for b in branches(t, None) {
        let len = b.len();
        let mut binom: u128 = 1;
        for j in 0..=len {
            let w = binom * keep.pow(j as u32) * drop.pow((len - j) as u32);
            nums[j] += w << (log2_den - (p.log2_den + 1) * len as u32);
            binom = binom * (len - j) as u128 / (j + 1) as u128;
        }
    }
    Ok(Exact { nums, log2_den })
}

/// Exact distribution of `|π|` for `π ~ W(T↾ρ)`, `ρ ~ R_p` on `vars`.
pub fn exact_length_distribution_restricted(t: &DecisionTree, vars: &[VarId], p: Dyadic) -> Result<Vec<BigRational>> {
    Ok(restricted_walks(t, vars, p)?.to_rationals())
}

/// Exact distribution of `|π|` for `π` a `p`-thinning of `σ ~ W(T)`.
pub fn exact_length_distribution_thinned(t: &DecisionTree, vars: &[VarId], p: Dyadic) -> Result<Vec<BigRational>> {
    Ok(thinned_walks(t, vars, p)?.to_rationals())
}

/// Grid-mode comparison of `A` and `Ã` on a fixed random family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceConfig {
    pub n: usize,
    pub delta: usize,
    pub k: usize,
    pub l: usize,
    pub s: usize,
    pub terms: usize,
    /// Length of the bit streams.
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
    pub level: f64,
    pub strategy: Strategy,
}

impl Default for DominanceConfig {
    fn default() -> Self {
        DominanceConfig {
            n: 48,
            delta: 2,
            k: 2,
            l: 1,
            s: 4,
            terms: 4,
            t: 6,
            trials: MIN_DOMINANCE_SAMPLES,
            seed: 0,
            level: DEFAULT_LEVEL,
            strategy: Strategy::II,
        }
    }
}

/// Runs `A` on fresh grid restrictions and `Ã` through fresh sampling
/// games, `trials` times each, and tests whether `Ã`'s `|π|` dominates.
/// Returns the verdict and both samples.
pub fn run_grid_dominance(cfg: &DominanceConfig) -> Result<(DominanceVerdict, Vec<u64>, Vec<u64>)> {
    let sampler = GridSampler::new(GridParams::new(cfg.n, cfg.delta)?)?;
    let ctx = GoodTreeContext::torus(sampler.grid(), usize::MAX);
    let pool = path_edges_around(&sampler, 0);
    let mut rng = trial_rng(cfg.seed, u64::MAX);
    let dnfs = (0..cfg.s).map(|_| random_dnf(&pool, cfg.terms, cfg.k, &mut rng)).collect::<Result<Vec<_>>>()?;
    let view = CachedFamily::new(IndependentFamily { dnfs, ctx });
    let bits = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<bool> { (0..cfg.t).map(|_| rng.random()).collect() };
    let a = run_trials(cfg.trials, cfg.seed, |rng| {
        let rho = sampler.sample(rng)?;
        let (x, y) = (bits(rng), bits(rng));
        Ok(run_algorithm_a(&view, Env::Grid(&rho), &x, &y, cfg.l)?.pi_len() as u64)
    })?;
    let b = run_trials(cfg.trials, cfg.seed ^ 0x5eed_0fa7, |rng| {
        let mut game = GameState::new(&sampler, cfg.strategy);
        let y = bits(rng);
        let (out, _) = run_algorithm_a_tilde(&view, Tilde::Grid { game: &mut game }, &y, cfg.l, rng)?;
        Ok(out.pi_len() as u64)
    })?;
    Ok((dominance_test(&a, &b, cfg.level)?, a, b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub vars: usize,
    pub ps: Vec<Dyadic>,
    /// `None` skips the grid comparison.
    pub dominance: Option<DominanceConfig>,
}

impl Default for EquivalenceConfig {
    fn default() -> Self {
        EquivalenceConfig {
            vars: 4,
            ps: vec![Dyadic::half(), Dyadic::quarter()],
            dominance: Some(DominanceConfig::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub p: String,
    pub trees: usize,
    pub mismatches: usize,
    /// Distribution of `|π|` for the deepest path tree, as fractions.
    pub example: Vec<String>,
    pub first_mismatch: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub exact: Vec<ExactRow>,
    pub dominance: Option<DominanceVerdict>,
    pub pass: bool,
}

/// Exact comparison of the two ways of sampling `|π|` over every proper
/// tree on `vars` variables, then the grid dominance test.
pub fn run_equivalence_suite(cfg: &EquivalenceConfig) -> Result<EquivalenceReport> {
    let vars: Vec<VarId> = (0..cfg.vars as u32).map(VarId).collect();
    let trees = all_proper_trees(&vars);
    let mut exact = Vec::new();
    for &p in &cfg.ps {
        let outcomes = trees
            .par_iter()
            .map(|t| {
                let one = restricted_walks(t, &vars, p)?;
                let two = thinned_walks(t, &vars, p)?;
                let total = 1u128 << one.log2_den;
                let ok = one.nums == two.nums && one.nums.iter().sum::<u128>() == total;
                Ok(ok)
            })
            .collect::<Result<Vec<bool>>>()?;
        let mismatches = outcomes.iter().filter(|&&ok| !ok).count();
        let first_mismatch = outcomes.iter().position(|&ok| !ok).map(|i| format!("{:?}", trees[i]));
        let deepest = trees.iter().max_by_key(|t| t.depth()).expect("the leaf is always present");
        let example = exact_length_distribution_thinned(deepest, &vars, p)?.iter().map(|r| r.to_string()).collect();
        exact.push(ExactRow { p: p.to_string(), trees: trees.len(), mismatches, example, first_mismatch });
    }
    let dominance = cfg.dominance.as_ref().map(|d| run_grid_dominance(d).map(|r| r.0)).transpose()?;
    let pass = exact.iter().all(|r| r.mismatches == 0) && dominance.as_ref().is_none_or(|d| d.pass);
    Ok(EquivalenceReport { exact, dominance, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (0..4).map(|v| all_proper_trees(&(0..v).map(VarId).collect::<Vec<_>>()).len()).collect();
        assert_eq!(counts, vec![1, 2, 9, 244]);
    }

    #[test]
    fn single_query_at_one_half() {
        let t = DecisionTree::node(VarId(0), DecisionTree::leaf(false), DecisionTree::leaf(true));
        for way in [exact_length_distribution_restricted, exact_length_distribution_thinned] {
            let d = way(&t, &[VarId(0)], Dyadic::half()).unwrap();
            assert_eq!(d, vec![q(1, 2), q(1, 2)]);
        }
    }

    #[test]
    fn unused_variables_do_not_matter() {
        let t = DecisionTree::node(VarId(1), DecisionTree::leaf(false), DecisionTree::leaf(true));
        let p = Dyadic::quarter();
        let d = exact_length_distribution_restricted(&t, &[VarId(0), VarId(1), VarId(2)], p).unwrap();
        assert_eq!(&d[..2], &[q(3, 4), q(1, 4)]);
        assert!(d[2..].iter().all(Zero::is_zero));
        assert!(exact_length_distribution_restricted(&t, &[VarId(0)], p).is_err());
    }

    #[test]
    fn both_ways_agree_on_three_variables() {
        let vars: Vec<VarId> = (0..3).map(VarId).collect();
        for p in [Dyadic::half(), Dyadic::quarter(), Dyadic::new(3, 3).unwrap()] {
            for t in all_proper_trees(&vars) {
                let one = exact_length_distribution_restricted(&t, &vars, p).unwrap();
                let two = exact_length_distribution_thinned(&t, &vars, p).unwrap();
                assert_eq!(one, two);
                assert!(one.iter().sum::<BigRational>().is_one());
            }
        }
    }

    #[test]
    fn suite_without_grid_part() {
        let cfg = EquivalenceConfig { vars: 3, dominance: None, ..Default::default() };
        let r = run_equivalence_suite(&cfg).unwrap();
        assert!(r.pass);
        assert_eq!(r.exact.len(), 2);
        assert_eq!(r.exact[1].p, "1/4");
        assert_eq!(r.exact[0].example, vec!["1/8", "3/8", "3/8", "1/8"]);
    }
}
