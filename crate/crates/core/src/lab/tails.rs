use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_caps, estimate_failure, run_trials, DEFAULT_LEVEL};
use crate::bounds::{bound_geo_sum, bound_negbin_moment};
use crate::error::Result;

/// Simulation checks of the negative-binomial moment bound and the
/// geometric-sum tail bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailsConfig {
    pub qs: Vec<f64>,
    pub ss: Vec<usize>,
    pub ts: Vec<u32>,
    pub geo_p: f64,
    pub geo_n: usize,
    pub geo_ds: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub level: f64,
    #[serde(default)]
    pub override_caps: bool,
}

impl Default for TailsConfig {
    fn default() -> Self {
        TailsConfig {
            qs: vec![0.5, 0.25],
            ss: vec![1, 2],
            ts: vec![1, 2, 3],
            geo_p: 0.5,
            geo_n: 10,
            geo_ds: vec![2.0, 4.0],
            trials: 1_000_000,
            seed: 0,
            level: DEFAULT_LEVEL,
            override_caps: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub q: f64,
    pub s: usize,
    pub t: u32,
    pub trials: usize,
    /// Sample mean of `X^t`.
    pub mean: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoRow {
    pub p: f64,
    pub n: usize,
    pub d: f64,
    pub hits: usize,
    pub trials: usize,
    pub estimate: f64,
    pub upper: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailsReport {
    pub moments: Vec<MomentRow>,
    pub geo_sums: Vec<GeoRow>,
    pub pass: bool,
}

/// Trials, counting the last, until `s` successes of probability `q`.
fn trials_until<R: Rng + ?Sized>(q: f64, s: usize, rng: &mut R) -> u64 {
    let mut count = 0;
    let mut hits = 0;
    while hits < s {
        count += 1;
        hits += usize::from(rng.random_bool(q));
    }
    count
}

pub fn run_tails(cfg: &TailsConfig) -> Result<TailsReport> {
    check_caps(0, 0, cfg.trials, cfg.override_caps)?;
    let mut moments = Vec::new();
    let mut stream = 0u64;
    for &q in &cfg.qs {
        for &s in &cfg.ss {
            stream += 1;
            let xs = run_trials(cfg.trials, cfg.seed.wrapping_add(stream), |rng| Ok(trials_until(q, s, rng)))?;
            for &t in &cfg.ts {
                let mean = xs.iter().map(|&x| (x as f64).powi(t as i32)).sum::<f64>() / xs.len() as f64;
                let bound = bound_negbin_moment(q, s, t as usize)?.exp();
                moments.push(MomentRow { q, s, t, trials: xs.len(), mean, bound, pass: mean <= bound });
            }
        }
    }
    stream += 1;
    let (p, n) = (cfg.geo_p, cfg.geo_n);
    let sums = run_trials(cfg.trials, cfg.seed.wrapping_add(stream), |rng| {
        Ok((0..n).map(|_| trials_until(p, 1, rng)).sum::<u64>())
    })?;
    let mut geo_sums = Vec::new();
    for &d in &cfg.geo_ds {
        let threshold = d * n as f64 / p;
        let hits = sums.iter().filter(|&&x| x as f64 >= threshold).count();
        let upper = estimate_failure(sums.len(), hits, cfg.level)?;
        let bound = bound_geo_sum(p, n, d)?.linear();
        geo_sums.push(GeoRow {
            p,
            n,
            d,
            hits,
            trials: sums.len(),
            estimate: hits as f64 / sums.len() as f64,
            upper,
            bound,
            pass: upper <= bound,
        });
    }
    let pass = moments.iter().all(|r| r.pass) && geo_sums.iter().all(|r| r.pass);
    Ok(TailsReport { moments, geo_sums, pass })
}
