use rand::seq::IndexedRandom;
use rand::Rng;

use super::{run_trials, EdgePool, ExperimentConfig, ExperimentKind, ExperimentResult};
use crate::boolcore::{restrict_tree_simple, Dnf, Literal, VarId};
use crate::bounds::{bound_grid_msl, bound_multi_uniform, bound_single_sl};
use crate::canonical::{build_cdt, ccdt_depth, GridFamily, TreeFamily};
use crate::error::{Error, Result};
use crate::restrictions::{sample_uniform, GridParams, GridSampler};
use crate::treeops::GoodTreeContext;

/// `terms` terms of width exactly `k`, each on distinct variables drawn
/// uniformly from `pool`, with fair signs.
pub fn random_dnf<R: Rng + ?Sized>(pool: &[VarId], terms: usize, k: usize, rng: &mut R) -> Result<Dnf> {
    if k > pool.len() {
        return Err(Error::Config(format!("cannot draw {k} distinct variables from {}", pool.len())));
    }
    let lits = (0..terms)
        .map(|_| {
            pool.choose_multiple(rng, k)
                .map(|v| if rng.random() { Literal::pos(v.0) } else { Literal::neg(v.0) })
                .collect()
        })
        .collect();
    Dnf::from_literals(lits)
}

fn expect(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    cfg.validate()?;
    if cfg.kind != kind {
        return Err(Error::Config(format!("config is for {:?}, not {kind:?}", cfg.kind)));
    }
    Ok(())
}

/// Depth of `CDT(F)↾ρ` for a fresh random DNF and `ρ ~ R_p` per trial.
pub fn run_single_sl(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect(cfg, ExperimentKind::SingleSl)?;
    let pool: Vec<VarId> = (0..cfg.vars as u32).map(VarId).collect();
    let depths = run_trials(cfg.trials, cfg.seed, |rng| {
        let f = random_dnf(&pool, cfg.terms, cfg.k, rng)?;
        let rho = sample_uniform(pool.iter().copied(), cfg.p, rng);
        Ok(restrict_tree_simple(&build_cdt(&f), &rho).depth())
    })?;
    ExperimentResult::from_depths(cfg, &depths, |t| bound_single_sl(cfg.p, cfg.k, t))
}

/// Depth of the common `ℓ`-partial tree of `s` random DNFs under `R_p`.
pub fn run_multi_sl_uniform(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect(cfg, ExperimentKind::MultiSl)?;
    let pool: Vec<VarId> = (0..cfg.vars as u32).map(VarId).collect();
    let depths = run_trials(cfg.trials, cfg.seed, |rng| {
        let dnfs = (0..cfg.s).map(|_| random_dnf(&pool, cfg.terms, cfg.k, rng)).collect::<Result<Vec<_>>>()?;
        let rho = sample_uniform(pool.iter().copied(), cfg.p, rng);
        ccdt_depth(&TreeFamily::restricted(&dnfs, &rho), cfg.l, Some(cfg.max_t()))
    })?;
    ExperimentResult::from_depths(cfg, &depths, |t| bound_multi_uniform(cfg.s, cfg.l, cfg.p, cfg.k, t))
}

/// Edges on the paths joining `subgrid` to its four neighbours.
pub fn path_edges_around(sampler: &GridSampler, subgrid: usize) -> Vec<VarId> {
    let atlas = sampler.atlas();
    let p = sampler.params();
    let m = p.m();
    let (a, b) = (subgrid / m, subgrid % m);
    let slots = [
        2 * subgrid,
        2 * subgrid + 1,
        2 * p.subgrid_at(a + m - 1, b) + 1,
        2 * p.subgrid_at(a, b + m - 1),
    ];
    let mut out: Vec<VarId> = (0..atlas.paths().len())
        .filter(|&i| slots.contains(&atlas.slot_of_path(i)))
        .flat_map(|i| atlas.path(i).edges.iter().copied())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Depth of the common tree of `s` random DNFs over grid edges, built from
/// independent canonical trees and walked along `ρ ~ R^grid_Δ`.
pub fn run_grid_sl(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    expect(cfg, ExperimentKind::GridSl)?;
    let sampler = GridSampler::new(GridParams::new(cfg.n, cfg.delta)?)?;
    let ctx = GoodTreeContext::torus(sampler.grid(), usize::MAX);
    let pool: Vec<VarId> = match cfg.edge_pool {
        EdgePool::All => (0..sampler.grid().graph().num_edges() as u32).map(VarId).collect(),
        EdgePool::Paths => {
            let atlas = sampler.atlas();
            (0..sampler.grid().graph().num_edges() as u32).map(VarId).filter(|&e| atlas.on_any_path(e)).collect()
        }
    };
    let depths = run_trials(cfg.trials, cfg.seed, |rng| {
        let dnfs = (0..cfg.s).map(|_| random_dnf(&pool, cfg.terms, cfg.k, rng)).collect::<Result<Vec<_>>>()?;
        let rho = sampler.sample(rng)?;
        let view = GridFamily { dnfs, ctx: ctx.clone(), rho };
        ccdt_depth(&view, cfg.l, Some(cfg.max_t()))
    })?;
    ExperimentResult::from_depths(cfg, &depths, |t| bound_grid_msl(cfg.s, cfg.l, cfg.k, cfg.delta, t))
}
