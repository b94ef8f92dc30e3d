//! Closed-form switching-lemma bounds, evaluated in log space.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural log of a probability-scale quantity. Values above 0 are allowed
/// and mark a vacuous bound.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogProb(pub f64);

impl LogProb {
    pub const ONE: LogProb = LogProb(0.0);

    pub fn from_linear(x: f64) -> Self {
        LogProb(x.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// The linear value, clamped at 1.
    pub fn linear(self) -> f64 {
        self.0.min(0.0).exp()
    }

    /// The linear value without clamping; may be infinite.
    pub fn raw(self) -> f64 {
        self.0.exp()
    }

    pub fn is_vacuous(self) -> bool {
        self.0 >= 0.0
    }

    pub fn times(self, other: LogProb) -> LogProb {
        LogProb(self.0 + other.0)
    }

    pub fn pow(self, e: f64) -> LogProb {
        LogProb(self.0 * e)
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

fn check_p(p: f64) -> Result<()> {
    check((0.0..=1.0).contains(&p), || format!("p = {p} is not in [0, 1]"))
}

/// `(2pk2^k)^t`: a `k`-clipped tree survives to depth `t` under `R_p`.
pub fn bound_single_sl(p: f64, k: usize, t: usize) -> Result<LogProb> {
    check_p(p)?;
    check(k >= 1 && t >= 1, || format!("need k, t >= 1, got k = {k}, t = {t}"))?;
    Ok(LogProb(t as f64 * (LN_2 + p.ln() + (k as f64).ln() + k as f64 * LN_2)))
}

/// Tail of the random-path length after `m` attached trees: `(pk2^k)^t` for
/// a single tree, `(30pk2^{2k})^t` otherwise.
pub fn bound_path_tail(p: f64, k: usize, t: usize, m: usize) -> Result<LogProb> {
    check_p(p)?;
    check(k >= 1 && m >= 1 && m <= t, || format!("need 1 <= m <= t and k >= 1, got k = {k}, m = {m}, t = {t}"))?;
    let kf = k as f64;
    let per = if m == 1 {
        p.ln() + kf.ln() + kf * LN_2
    } else {
        30f64.ln() + p.ln() + kf.ln() + 2.0 * kf * LN_2
    };
    Ok(LogProb(t as f64 * per))
}

/// Common partial tree of `s` DNFs under `R_p`: `s^⌈t/ℓ⌉ (8pk2^k)^t`.
pub fn bound_multi_uniform(s: usize, l: usize, p: f64, k: usize, t: usize) -> Result<LogProb> {
    check_p(p)?;
    check(l >= 1 && s >= 1 && k >= 1, || format!("need s, l, k >= 1, got s = {s}, l = {l}, k = {k}"))?;
    let blocks = t.div_ceil(l) as f64;
    let kf = k as f64;
    Ok(LogProb(blocks * (s as f64).ln() + t as f64 * (8f64.ln() + p.ln() + kf.ln() + kf * LN_2)))
}

/// `(305k2^{2k}/Δ)^{t/8}`, the bound for one responsible subfamily.
pub fn grid_subfamily_factor(k: usize, delta: usize, t: usize) -> Result<LogProb> {
    check(k >= 1 && delta >= 1, || format!("need k, delta >= 1, got k = {k}, delta = {delta}"))?;
    let kf = k as f64;
    Ok(LogProb(t as f64 / 8.0 * (305f64.ln() + kf.ln() + 2.0 * kf * LN_2 - (delta as f64).ln())))
}

/// Common partial tree of `s` DNFs under the grid restriction:
/// `s^⌈t/ℓ⌉ (305k2^{2k}/Δ)^{t/8}`. Requires `ℓ ≤ k`.
pub fn bound_grid_msl(s: usize, l: usize, k: usize, delta: usize, t: usize) -> Result<LogProb> {
    check(l >= 1 && l <= k && s >= 1, || format!("need s >= 1 and 1 <= l <= k, got s = {s}, l = {l}, k = {k}"))?;
    let union = LogProb(t.div_ceil(l) as f64 * (s as f64).ln());
    Ok(union.times(grid_subfamily_factor(k, delta, t)?))
}

/// Log of `(10t/(sq))^s (t/q)^t`, bounding `E[X^t]` for `X` the number of
/// trials with success probability `q` before `s` successes.
pub fn bound_negbin_moment(q: f64, s: usize, t: usize) -> Result<f64> {
    check(q > 0.0 && q <= 0.5, || format!("q = {q} is not in (0, 1/2]"))?;
    check(s >= 1 && t >= 1, || format!("need s, t >= 1, got s = {s}, t = {t}"))?;
    let (s, t) = (s as f64, t as f64);
    Ok(s * (10.0 * t / (s * q)).ln() + t * (t / q).ln())
}

/// `Pr[X_1 + ... + X_n ≥ dn/p]` for geometric `X_i`: `exp(−dn(1−1/d)²/2)`.
pub fn bound_geo_sum(p: f64, n: usize, d: f64) -> Result<LogProb> {
    check(p > 0.0 && p <= 1.0, || format!("p = {p} is not in (0, 1]"))?;
    check(d > 1.0, || format!("d = {d} must exceed 1"))?;
    let n = n as f64;
    Ok(LogProb(-d * n * (1.0 - 1.0 / d).powi(2) / 2.0))
}

/// The weaker `exp(−dn/8)`, valid for `d ≥ 2`.
pub fn bound_geo_sum_simplified(n: usize, d: f64) -> Result<LogProb> {
    check(d >= 2.0, || format!("d = {d} is below 2"))?;
    Ok(LogProb(-d * n as f64 / 8.0))
}
