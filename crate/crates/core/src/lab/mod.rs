//! Monte Carlo harness: configurations, parallel trials with counter-seeded
//! generators, Clopper–Pearson limits, bound comparisons and persistence.

mod equivalence;
mod experiments;
mod parity;
mod tails;

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::bounds::LogProb;
use crate::error::{Error, Result};

pub use equivalence::{
    all_proper_trees, exact_length_distribution_restricted, exact_length_distribution_thinned, run_equivalence_suite,
    run_grid_dominance, Dyadic, DominanceConfig, EquivalenceConfig, EquivalenceReport, ExactRow,
};
pub use experiments::{path_edges_around, random_dnf, run_grid_sl, run_multi_sl_uniform, run_single_sl};
pub use parity::correlation_with_parity;
pub use tails::{run_tails, GeoRow, MomentRow, TailsConfig, TailsReport};

/// Version of the JSON and CSV layouts written by [`write_json`] and
/// [`write_csv`].
pub const SCHEMA_VERSION: u32 = 1;

/// Desk-scale limits; larger runs need `override_caps`.
pub const MAX_N: usize = 120;
pub const MAX_DELTA: usize = 3;
pub const MAX_TRIALS: usize = 1_000_000;

pub const DEFAULT_LEVEL: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SingleSl,
    MultiSl,
    GridSl,
}

/// Where grid-mode terms draw their edges from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgePool {
    /// Every edge of the torus.
    All,
    /// Edges lying on some atlas path.
    Paths,
}

/// A replayable experiment. Thread count is deliberately not part of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Number of variables for uniform restrictions.
    pub vars: usize,
    /// Torus side for grid restrictions.
    pub n: usize,
    pub delta: usize,
    pub p: f64,
    /// Term width.
    pub k: usize,
    pub l: usize,
    /// Number of DNFs in the family.
    pub s: usize,
    /// Terms per DNF.
    pub terms: usize,
    pub t_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub level: f64,
    pub edge_pool: EdgePool,
    #[serde(default)]
    pub override_caps: bool,
}

impl ExperimentConfig {
    pub fn single_sl() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::SingleSl,
            vars: 20,
            n: 48,
            delta: 2,
            p: 1.0 / 32.0,
            k: 2,
            l: 1,
            s: 1,
            terms: 6,
            t_values: vec![2, 3, 4],
            trials: 100_000,
            seed: 0,
            level: DEFAULT_LEVEL,
            edge_pool: EdgePool::Paths,
            override_caps: false,
        }
    }

    pub fn multi_sl() -> Self {
        ExperimentConfig { kind: ExperimentKind::MultiSl, p: 1.0 / 64.0, l: 2, s: 4, t_values: vec![3, 6], ..Self::single_sl() }
    }

    pub fn grid_sl() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::GridSl,
            l: 1,
            s: 4,
            terms: 4,
            t_values: vec![1, 2, 3, 4],
            trials: 1_000,
            ..Self::single_sl()
        }
    }

    pub fn for_kind(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::SingleSl => Self::single_sl(),
            ExperimentKind::MultiSl => Self::multi_sl(),
            ExperimentKind::GridSl => Self::grid_sl(),
        }
    }

    pub fn max_t(&self) -> usize {
        self.t_values.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} is not in [0, 1]", self.p));
        }
        if self.k == 0 || self.l == 0 || self.s == 0 || self.terms == 0 {
            return bad("k, l, s and terms must be positive".into());
        }
        if self.t_values.is_empty() || self.t_values.contains(&0) {
            return bad("t values must be positive and non-empty".into());
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(0.0 < self.level && self.level < 1.0) {
            return bad(format!("level {} is not in (0, 1)", self.level));
        }
        match self.kind {
            ExperimentKind::SingleSl | ExperimentKind::MultiSl if self.k > self.vars => {
                return bad(format!("k = {} exceeds the {} variables", self.k, self.vars));
            }
            ExperimentKind::GridSl => {
                crate::restrictions::GridParams::new(self.n, self.delta)?;
                if self.l > self.k {
                    return bad(format!("grid bound needs l <= k, got l = {}, k = {}", self.l, self.k));
                }
            }
            _ => {}
        }
        check_caps(self.n, self.delta, self.trials, self.override_caps)
    }
}

/// Errors past the desk-scale limits unless overridden, in which case a
/// warning is printed.
pub fn check_caps(n: usize, delta: usize, trials: usize, override_caps: bool) -> Result<()> {
    let mut over = Vec::new();
    if n > MAX_N {
        over.push(format!("n = {n} > {MAX_N}"));
    }
    if delta > MAX_DELTA {
        over.push(format!("delta = {delta} > {MAX_DELTA}"));
    }
    if trials > MAX_TRIALS {
        over.push(format!("trials = {trials} > {MAX_TRIALS}"));
    }
    if over.is_empty() {
        return Ok(());
    }
    let msg = over.join(", ");
    if override_caps {
        eprintln!("warning: beyond desk scale ({msg})");
        Ok(())
    } else {
        Err(Error::Config(format!("beyond desk scale ({msg}); set override_caps to run anyway")))
    }
}

/// Outcome at one depth threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub t: usize,
    pub failures: usize,
    pub trials: usize,
    pub estimate: f64,
    /// One-sided Clopper–Pearson upper limit at the configured level.
    pub upper: f64,
    pub bound_ln: f64,
    pub bound: f64,
    pub vacuous: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub kind: ExperimentKind,
    pub rows: Vec<ResultRow>,
    /// Histogram of the measured depth, capped at the largest `t`.
    pub depth_histogram: Vec<usize>,
    pub pass: bool,
}

impl ExperimentResult {
    /// Aggregates per-trial depths against `bound(t)`.
    pub fn from_depths(cfg: &ExperimentConfig, depths: &[usize], bound: impl Fn(usize) -> Result<LogProb>) -> Result<Self> {
        let mut depth_histogram = vec![0; cfg.max_t() + 1];
        for &d in depths {
            depth_histogram[d.min(cfg.max_t())] += 1;
        }
        let mut rows = Vec::new();
        for &t in &cfg.t_values {
            let failures = depths.iter().filter(|&&d| d >= t).count();
            let upper = estimate_failure(depths.len(), failures, cfg.level)?;
            let b = bound(t)?;
            rows.push(ResultRow {
                t,
                failures,
                trials: depths.len(),
                estimate: failures as f64 / depths.len() as f64,
                upper,
                bound_ln: b.ln(),
                bound: b.linear(),
                vacuous: b.is_vacuous(),
                // a zero bound can only be met by observing no failures
                pass: b.is_vacuous() || upper <= b.linear() || (b.linear() == 0.0 && failures == 0),
            });
        }
        let pass = rows.iter().all(|r| r.pass);
        Ok(ExperimentResult { kind: cfg.kind, rows, depth_histogram, pass })
    }
}

/// One-sided upper confidence limit for a binomial proportion: the `level`
/// quantile of `Beta(failures + 1, trials − failures)`.
pub fn estimate_failure(trials: usize, failures: usize, level: f64) -> Result<f64> {
    if failures > trials || trials == 0 {
        return Err(Error::Config(format!("{failures} failures in {trials} trials")));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::Config(format!("level {level} is not in (0, 1)")));
    }
    if failures == trials {
        return Ok(1.0);
    }
    if failures == 0 {
        return Ok(1.0 - (1.0 - level).powf(1.0 / trials as f64));
    }
    let beta = Beta::new(failures as f64 + 1.0, (trials - failures) as f64).map_err(|e| Error::Config(e.to_string()))?;
    Ok(beta.inverse_cdf(level))
}

/// The generator for trial `index`: the master seed selects the key, the
/// index the stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `trials` independent trials in the current rayon pool and returns
/// their outcomes in index order.
pub fn run_trials<T, F>(trials: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..trials as u64).into_par_iter().map(|i| f(&mut trial_rng(seed, i))).collect()
}

/// Runs `f` on a pool of `threads` workers, or the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    match cfg.kind {
        ExperimentKind::SingleSl => run_single_sl(cfg),
        ExperimentKind::MultiSl => run_multi_sl_uniform(cfg),
        ExperimentKind::GridSl => run_grid_sl(cfg),
    }
}

/// A result together with the configuration that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub schema_version: u32,
    pub config: C,
    pub result: R,
}

impl<C, R> Envelope<C, R> {
    pub fn new(config: C, result: R) -> Self {
        Envelope { schema_version: SCHEMA_VERSION, config, result }
    }
}

pub fn to_json<C: Serialize, R: Serialize>(config: &C, result: &R) -> Result<String> {
    #[derive(Serialize)]
    struct View<'a, C, R> {
        schema_version: u32,
        config: &'a C,
        result: &'a R,
    }
    let v = View { schema_version: SCHEMA_VERSION, config, result };
    serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_json<C: Serialize, R: Serialize>(path: &Path, config: &C, result: &R) -> Result<()> {
    let mut s = to_json(config, result)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

pub fn read_json<C: DeserializeOwned, R: DeserializeOwned>(path: &Path) -> Result<Envelope<C, R>> {
    let text = std::fs::read_to_string(path)?;
    let env: Envelope<C, R> = serde_json::from_str(&text).map_err(|e| Error::Io(e.to_string()))?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!("schema version {} is not {SCHEMA_VERSION}", env.schema_version)));
    }
    Ok(env)
}

/// One CSV row per item, headed by the field names.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(to_csv(rows)?.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn zero_failures_have_a_closed_form() {
        for n in [10, 1000, 100_000] {
            let u = estimate_failure(n, 0, 0.999).unwrap();
            assert!((u - (1.0 - 0.001f64.powf(1.0 / n as f64))).abs() < 1e-15);
        }
        assert_eq!(estimate_failure(7, 7, 0.999).unwrap(), 1.0);
        assert!(estimate_failure(3, 4, 0.999).is_err());
    }

    #[test]
    fn upper_limit_is_monotone_and_covers_the_estimate() {
        let n = 1000;
        let mut last = 0.0;
        for x in 0..=n {
            let u = estimate_failure(n, x, 0.999).unwrap();
            assert!(u >= last - 1e-12, "x = {x}");
            assert!(u >= x as f64 / n as f64);
            last = u;
        }
    }

    #[test]
    fn upper_limit_matches_the_binomial_tail() {
        // at the limit, Pr[Bin(n, u) <= x] = 1 - level
        let (n, x) = (200usize, 7usize);
        let u = estimate_failure(n, x, 0.99).unwrap();
        let tail: f64 = (0..=x)
            .map(|j| {
                let ln_c = (1..=j).map(|i| ((n - j + i) as f64 / i as f64).ln()).sum::<f64>();
                (ln_c + j as f64 * u.ln() + (n - j) as f64 * (1.0 - u).ln()).exp()
            })
            .sum();
        assert!((tail - 0.01).abs() < 1e-6, "{tail}");
    }

    #[test]
    fn trial_streams_are_distinct_and_stable() {
        let a: u64 = trial_rng(9, 0).random();
        let b: u64 = trial_rng(9, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, trial_rng(9, 0).random::<u64>());
        let one = with_threads(Some(1), || run_trials(64, 3, |r| Ok(r.random::<u32>()))).unwrap().unwrap();
        let four = with_threads(Some(4), || run_trials(64, 3, |r| Ok(r.random::<u32>()))).unwrap().unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn caps_are_enforced_unless_overridden() {
        assert!(check_caps(48, 2, 10, false).is_ok());
        assert!(check_caps(200, 2, 10, false).is_err());
        assert!(check_caps(200, 2, 10, true).is_ok());
        let mut cfg = ExperimentConfig::single_sl();
        cfg.trials = 2_000_000;
        assert!(cfg.validate().is_err());
        cfg.override_caps = true;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn persistence_round_trips() {
        let cfg = ExperimentConfig::multi_sl();
        let res = ExperimentResult::from_depths(&cfg, &[0, 0, 3, 7], |_| Ok(LogProb(-1.0))).unwrap();
        assert_eq!(res.rows[0].failures, 2);
        assert_eq!(res.rows[1].failures, 1);
        assert_eq!(res.depth_histogram, vec![2, 0, 0, 1, 0, 0, 1]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_json(&path, &cfg, &res).unwrap();
        let back: Envelope<ExperimentConfig, ExperimentResult> = read_json(&path).unwrap();
        assert_eq!(back.config, cfg);
        assert_eq!(back.result, res);
        let csv = to_csv(&res.rows).unwrap();
        assert!(csv.starts_with("t,failures,trials,estimate,upper,bound_ln,bound,vacuous,pass\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
