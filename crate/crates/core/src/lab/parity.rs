use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::boolcore::{branches, DecisionTree, VarId};
use crate::error::{Error, Result};

/// `Pr[T(x) = x_1 ⊕ ... ⊕ x_m] − Pr[T(x) ≠ x_1 ⊕ ... ⊕ x_m]` for uniform `x`
/// over `vars`. A leaf whose branch misses some variable sees a balanced
/// parity and contributes nothing; a full branch contributes `±2^−m`.
pub fn correlation_with_parity(t: &DecisionTree, vars: &[VarId]) -> Result<BigRational> {
    if !t.is_proper() {
        return Err(Error::Config("tree queries a variable twice on one path".into()));
    }
    if let Some(v) = t.vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(Error::Config(format!("tree queries {v:?}, which is not listed")));
    }
    let m = vars.len();
    let mut total = BigRational::zero();
    for b in branches(t, None) {
        if b.len() < m {
            continue;
        }
        let parity = b.steps.iter().fold(false, |acc, &(_, x)| acc ^ x);
        let sign = if parity == b.leaf { 1 } else { -1 };
        total += BigRational::new(BigInt::from(sign), BigInt::from(1u8) << m);
    }
    Ok(total)
}
