//! Distributions bounded above by `B`.

use super::golden::maximize;
use super::{DualPoint, Tolerance};
use crate::empirical::Atoms;
use crate::error::{domain, Result};

/// `max_{0 <= l <= 1/(B - mu)} E log(1 - l (X - mu))`.
pub fn kinf_bounded<A: Atoms>(f: &A, mu: f64, upper: f64, tol: Tolerance) -> Result<DualPoint> {
    if !mu.is_finite() || !upper.is_finite() {
        return domain("threshold and bound must be finite");
    }
    let max = f.atoms().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
    if max > upper {
        return domain(format!("observation {max} exceeds the bound {upper}"));
    }
    if mu >= upper {
        return Ok(DualPoint::infinite(0.0, 0.0));
    }
    if f.weighted_mean() >= mu {
        return Ok(DualPoint::zero());
    }
    let total = f.total();
    let obj = |l: f64| {
        let mut s = 0.0;
        for (x, w) in f.atoms() {
            let arg = 1.0 - l * (x - mu);
            if arg <= 0.0 {
                return f64::NEG_INFINITY;
            }
            s += w * arg.ln();
        }
        s / total
    };
    let (l, v) = maximize(obj, 0.0, 1.0 / (upper - mu), tol.golden, tol.max_iter);
    Ok(DualPoint { lambda1: l, lambda2: 0.0, value: v.max(0.0), feasible: true, in_family: true, beyond_range: false })
}

/// Lower bound on `kinf(F, mu) - kinf(F, mu - eps)` for laws on `[lower, upper]`
/// whose mean is at most `mu - eps`.
///
/// The derivative of `kinf(F, .)` is the optimal multiplier, which by
/// convexity and Pinsker is at least `2 (t - mean) / (upper - lower)^2`.
pub fn bounded_gap_lower(eps: f64, lower: f64, upper: f64) -> f64 {
    eps * eps / ((upper - lower) * (upper - lower))
}
