//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs as a plain binary so the lines always reach the
//! test log.

mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use switchlab::boolcore::{branches, DecisionTree, Restriction, VarId};
use switchlab::gridgraph::{build_grid, closure_restriction, dimacs, pushes_contradiction, Charge, TseitinInstance};
use switchlab::lab::{
    self, correlation_with_parity, path_edges_around, run_equivalence_suite, run_grid_dominance, run_tails,
    with_threads, DominanceConfig, EquivalenceConfig, ExperimentConfig, ExperimentKind, TailsConfig,
};
use switchlab::restrictions::{build_path_atlas, validate_disjointness, GridParams, GridSampler};
use switchlab::treeops::{
    check_survival_full, check_survival_partial, is_good_tree, map_branch_back, restrict_tree_full,
    restrict_tree_partial, GoodTreeContext,
};
use switchlab::Error;

type Outcome = Result<String, String>;

fn exact_equivalence() -> Outcome {
    let start = Instant::now();
    let r = run_equivalence_suite(&EquivalenceConfig { dominance: None, ..Default::default() }).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rows: Vec<String> = r.exact.iter().map(|x| format!("p={} trees={} mismatches={}", x.p, x.trees, x.mismatches)).collect();
    let msg = format!("{} in {:.1?}", rows.join(", "), elapsed);
    if r.pass && r.exact.len() == 2 && elapsed < Duration::from_secs(60) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn experiment(kind: ExperimentKind, limit: Duration) -> Outcome {
    let cfg = ExperimentConfig::for_kind(kind);
    let start = Instant::now();
    let r = lab::run_experiment(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rows: Vec<String> = r
        .rows
        .iter()
        .map(|x| {
            let bound = if x.vacuous { "vacuous".to_string() } else { format!("{:.3e}", x.bound) };
            format!("t={} est={:.2e} upper={:.2e} bound={}", x.t, x.estimate, x.upper, bound)
        })
        .collect();
    let msg = format!("N={} {} in {:.1?}", cfg.trials, rows.join("; "), elapsed);
    if r.pass && elapsed < limit {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn atlas_validation() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for delta in [2, 3] {
        let params = GridParams::geometry(16 * delta * delta * 3, delta).map_err(|e| e.to_string())?;
        let atlas = build_path_atlas(&params).map_err(|e| e.to_string())?;
        let report = validate_disjointness(&atlas);
        let worst = report.shared.iter().map(|s| s.distance).max().unwrap_or(0);
        let within = report.shared.iter().all(|s| s.endpoint.is_some() && s.distance <= delta);
        ok &= report.pass && within;
        parts.push(format!(
            "delta={delta} n={} paths={} shared_edges={} max_distance={worst} violations={}",
            params.n,
            report.num_paths,
            report.shared.len(),
            report.violations().count()
        ));
    }
    let msg = parts.join(", ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn grid_soundness() -> Outcome {
    const SAMPLES: usize = 1000;
    const ASSIGNMENTS: usize = 100;
    let sampler = GridSampler::new(GridParams::new(48, 2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let grid = sampler.grid();
    let original = TseitinInstance::new(grid.full(), grid.standard_charge()).map_err(|e| e.to_string())?;
    let small = build_grid(3).map_err(|e| e.to_string())?;
    let expected = dimacs(&TseitinInstance::new(small.full(), Charge::ones(9)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let params = *sampler.params();
    let (subgrids, centers) = (params.num_subgrids(), params.delta);
    let mut counts = vec![vec![0usize; centers]; subgrids];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad_vertices = 0usize;
    let mut bad_instances = 0usize;
    for _ in 0..SAMPLES {
        let rho = sampler.sample(&mut rng).map_err(|e| e.to_string())?;
        for (s, row) in counts.iter_mut().enumerate() {
            row[rho.chosen_center(s).k] += 1;
        }
        let center_vertices: Vec<usize> = (0..subgrids)
            .map(|s| {
                let (i, j) = params.center_pos(rho.chosen_center(s));
                i * params.n + j
            })
            .collect();
        if dimacs(&rho.new_instance()).map_err(|e| e.to_string())? != expected {
            bad_instances += 1;
        }
        for _ in 0..ASSIGNMENTS {
            let y: Vec<bool> = (0..rho.num_new_vars()).map(|_| rng.random()).collect();
            let x = rho.back_substitute(&y);
            bad_vertices += (0..params.n * params.n)
                .filter(|v| !center_vertices.contains(v) && !original.vertex_satisfied(*v, &x))
                .count();
        }
    }
    let chi = ChiSquared::new((centers - 1) as f64).map_err(|e| e.to_string())?;
    let expect = SAMPLES as f64 / centers as f64;
    let min_p = counts
        .iter()
        .map(|row| {
            let stat: f64 = row.iter().map(|&c| (c as f64 - expect).powi(2) / expect).sum();
            1.0 - chi.cdf(stat)
        })
        .fold(1.0f64, f64::min);
    let msg = format!(
        "samples={SAMPLES} min chi-square p={min_p:.4} unsatisfied non-center vertices={bad_vertices} over {ASSIGNMENTS} assignments each, projected-instance mismatches={bad_instances}"
    );
    if min_p > 0.001 && bad_vertices == 0 && bad_instances == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn tree_lemmas() -> Outcome {
    const TREES: usize = 500;
    let sampler = GridSampler::new(GridParams::new(48, 2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let ctx = GoodTreeContext::torus(sampler.grid(), 6);
    let subgrids = sampler.params().num_subgrids();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut survival_bad, mut mapped, mut map_bad, mut checked) = (0, 0, 0, 0);
    for _ in 0..TREES {
        let pool = path_edges_around(&sampler, rng.random_range(0..subgrids));
        let t = common::random_good_tree(&ctx, &pool, 5, &mut rng);
        assert!(is_good_tree(&t, &ctx));
        let rho = sampler.sample(&mut rng).map_err(|e| e.to_string())?;
        let report = check_survival_full(&t, &rho, &ctx).map_err(|e| e.to_string())?;
        checked += report.branches;
        survival_bad += report.mismatches.len();
        let restricted = restrict_tree_full(&t, &rho, &ctx).map_err(|e| e.to_string())?;
        for pi in branches(&restricted, None) {
            mapped += 1;
            if map_branch_back(&t, &rho, &ctx, &pi).is_err() {
                map_bad += 1;
            }
        }
    }

    // the partial restriction on the 9 x 9 torus
    let g9 = build_grid(9).map_err(|e| e.to_string())?;
    let ctx9 = GoodTreeContext::torus(&g9, 6);
    let edges: Vec<VarId> = (0..g9.graph().num_edges() as u32).map(VarId).collect();
    let (mut partial_trees, mut partial_branches, mut not_pushing, mut partial_bad, mut too_deep, mut skipped) = (0, 0, 0, 0, 0, 0);
    while partial_trees < TREES {
        let t = common::random_good_tree(&ctx9, &edges, 5, &mut rng);
        let beta = loop {
            let size = rng.random_range(0..=3);
            let b = Restriction::from_bits(edges.choose_multiple(&mut rng, size).map(|&e| (e, rng.random())));
            if pushes_contradiction(&ctx9.graph, &ctx9.charge, &b).map_err(|e| e.to_string())? {
                break b;
            }
        };
        let restricted = match restrict_tree_partial(&t, &beta, &ctx9) {
            Ok(r) => r,
            Err(Error::NoGiant) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        partial_trees += 1;
        too_deep += usize::from(restricted.depth() > t.depth());
        let closed = closure_restriction(&ctx9.graph, &ctx9.charge, &beta).map_err(|e| e.to_string())?;
        for pi in branches(&restricted, None) {
            partial_branches += 1;
            let pushes = match closed.compose(&pi.restriction()) {
                Ok(joint) => pushes_contradiction(&ctx9.graph, &ctx9.charge, &joint).map_err(|e| e.to_string())?,
                Err(_) => false,
            };
            not_pushing += usize::from(!pushes);
        }
        partial_bad += check_survival_partial(&t, &beta, &ctx9).map_err(|e| e.to_string())?.mismatches.len();
    }
    let msg = format!(
        "full: {TREES} trees, {checked} branches, survival mismatches={survival_bad}, map-back failures={map_bad}/{mapped}; \
         partial on n=9: {partial_trees} trees ({skipped} skipped without a giant component), {partial_branches} branches, \
         not pushing={not_pushing}, deeper than input={too_deep}, survival mismatches={partial_bad}"
    );
    if survival_bad + map_bad + not_pushing + too_deep + partial_bad == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn dominance() -> Outcome {
    let cfg = DominanceConfig::default();
    let start = Instant::now();
    let (v, a, b) = run_grid_dominance(&cfg).map_err(|e| e.to_string())?;
    let msg = format!(
        "N={} per side, mean |pi| A={:.3} A~={:.3}, max gap={:.4} at {} band={:.4} in {:.1?}",
        cfg.trials,
        a.iter().sum::<u64>() as f64 / a.len() as f64,
        b.iter().sum::<u64>() as f64 / b.len() as f64,
        v.max_gap,
        v.at,
        v.band,
        start.elapsed()
    );
    if v.pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn tails() -> Outcome {
    let cfg = TailsConfig::default();
    let r = run_tails(&cfg).map_err(|e| e.to_string())?;
    let worst = r.moments.iter().map(|m| m.mean / m.bound).fold(0.0f64, f64::max);
    let geo: Vec<String> = r.geo_sums.iter().map(|g| format!("d={} upper={:.2e} bound={:.2e}", g.d, g.upper, g.bound)).collect();
    let msg = format!("N={} moments={} worst mean/bound={worst:.3}, {}", cfg.trials, r.moments.len(), geo.join("; "));
    if r.pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `Σ_x (−1)^(T(x) ⊕ x_1 ⊕ ... ⊕ x_m)` by evaluating every input.
fn parity_sum(t: &DecisionTree, m: usize) -> i64 {
    (0u32..1 << m)
        .map(|x| {
            let out = t.eval(|v| x >> v.0 & 1 == 1);
            if out == (x.count_ones() % 2 == 1) {
                1
            } else {
                -1
            }
        })
        .sum()
}

fn parity() -> Outcome {
    let mut parts = Vec::new();
    let mut bad = 0;
    for m in 1..=4usize {
        let vars: Vec<VarId> = (0..m as u32).map(VarId).collect();
        let trees = common::labelled_trees(&vars, m - 1);
        for t in &trees {
            let c = correlation_with_parity(t, &vars).map_err(|e| e.to_string())?;
            let brute = BigRational::new(BigInt::from(parity_sum(t, m)), BigInt::from(1u32 << m));
            if c != brute || parity_sum(t, m) != 0 {
                bad += 1;
            }
        }
        parts.push(format!("m={m}: {} trees", trees.len()));
    }
    let msg = format!("{}, nonzero correlations={bad}", parts.join(", "));
    if bad == 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn outputs(threads: usize) -> switchlab::Result<Vec<String>> {
    with_threads(Some(threads), || -> switchlab::Result<Vec<String>> {
        let mut out = Vec::new();
        let single = ExperimentConfig { trials: 20_000, seed: 11, ..ExperimentConfig::single_sl() };
        let multi = ExperimentConfig { trials: 2_000, seed: 12, ..ExperimentConfig::multi_sl() };
        let grid = ExperimentConfig { trials: 200, seed: 13, ..ExperimentConfig::grid_sl() };
        for cfg in [single, multi, grid] {
            let r = lab::run_experiment(&cfg)?;
            out.push(lab::to_json(&cfg, &r)?);
            out.push(lab::to_csv(&r.rows)?);
        }
        let tails = TailsConfig { trials: 50_000, seed: 14, ..Default::default() };
        let r = run_tails(&tails)?;
        out.push(lab::to_json(&tails, &r)?);
        out.push(lab::to_csv(&r.moments)?);
        let eq = EquivalenceConfig { vars: 3, dominance: None, ..Default::default() };
        out.push(lab::to_json(&eq, &run_equivalence_suite(&eq)?)?);
        Ok(out)
    })?
}

fn determinism() -> Outcome {
    let one = outputs(1).map_err(|e| e.to_string())?;
    let four = outputs(4).map_err(|e| e.to_string())?;
    let again = outputs(1).map_err(|e| e.to_string())?;
    let same = one.iter().zip(&four).filter(|(a, b)| a == b).count();
    let msg = format!("{same}/{} JSON and CSV outputs byte-identical between 1 and 4 threads", one.len());
    if one == four && one == again {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    // `cargo test` passes harness flags such as `--nocapture`; a filter
    // argument that names nothing here skips the run.
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    if filter.as_deref().is_some_and(|f| !"acceptance".contains(f)) {
        return;
    }
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("exact equivalence of restricted and thinned walks", Box::new(exact_equivalence)),
        ("single-DNF switching lemma", Box::new(|| experiment(ExperimentKind::SingleSl, Duration::from_secs(300)))),
        ("multi-DNF switching lemma", Box::new(|| experiment(ExperimentKind::MultiSl, Duration::from_secs(600)))),
        ("path atlas disjointness", Box::new(atlas_validation)),
        ("grid restriction soundness", Box::new(grid_soundness)),
        ("tree restriction lemmas", Box::new(tree_lemmas)),
        ("grid dominance of the sampling game", Box::new(dominance)),
        ("negative binomial and geometric tails", Box::new(tails)),
        ("parity has no correlation with shallow trees", Box::new(parity)),
        ("determinism across thread counts", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
