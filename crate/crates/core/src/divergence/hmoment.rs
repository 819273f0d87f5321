//! Families defined by a moment condition `E h(|X - c|) < B`.
//!
//! The dual is `max E log(1 - l1 (X - mu) - l2 (B - h(|X - c|)))` over
//! `(l1, l2) >= 0` such that the same expression, evaluated with the slack
//! `(eta, gamma)`, is nonnegative for every real `x`. Centered specs are
//! shifted to `c = mu = 0` before solving.

use super::golden::{bisect, maximize};
use super::{DualPoint, Tolerance};
use crate::empirical::{Atoms, EmpiricalDistribution, WeightedAtoms};
use crate::error::{Error, Result};
use crate::moment::{MomentFn, MomentSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Slack {
    pub eta: f64,
    pub gamma: f64,
}

impl Slack {
    pub const NONE: Slack = Slack { eta: 0.0, gamma: 0.0 };
}

/// Global minimum of
/// `g(x) = 1 - l1 (x + eta - mu) - l2 (B + gamma - h(|x - c|))`
/// and a minimizer. `(-inf, +inf)` when `l2 = 0 < l1`.
pub fn constraint_min(spec: &MomentSpec, mu: f64, slack: Slack, l1: f64, l2: f64) -> (f64, f64) {
    constraint_min_at(&spec.h, spec.bound, spec.center(mu), mu, slack, l1, l2)
}

fn constraint_min_at(h: &MomentFn, bound: f64, c: f64, mu: f64, slack: Slack, l1: f64, l2: f64) -> (f64, f64) {
    if l2 <= 0.0 {
        if l1 > 0.0 {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        return (1.0, c);
    }
    // g decreases left of c; on the right, h'(x - c) = l1 / l2
    let y = h.dh_inv(l1 / l2);
    let g = 1.0 - l1 * (c + y + slack.eta - mu) - l2 * (bound + slack.gamma - h.h(y));
    (g, c + y)
}

/// Dual value without the family indicator.
pub(crate) fn solve_dual<A: Atoms>(
    f: &A,
    mu: f64,
    spec: &MomentSpec,
    slack: Slack,
    tol: Tolerance,
) -> Result<DualPoint> {
    if spec.centered {
        let shifted: Vec<(f64, f64)> = f.atoms().map(|(x, w)| (x - mu, w)).collect();
        let g = WeightedAtoms::new(shifted)?;
        solve_uncentered(&g, 0.0, spec, slack, tol)
    } else {
        solve_uncentered(f, mu, spec, slack, tol)
    }
}

fn solve_uncentered<A: Atoms>(f: &A, mu: f64, spec: &MomentSpec, slack: Slack, tol: Tolerance) -> Result<DualPoint> {
    if !mu.is_finite() {
        return Err(Error::Domain(format!("threshold {mu} is not finite")));
    }
    let h = &spec.h;
    let b = spec.bound;
    let cap = b + slack.gamma;
    let total = f.total();
    let pts: Vec<(f64, f64, f64)> = f.atoms().map(|(x, w)| (x - mu, b - h.h(x.abs()), w / total)).collect();

    let y0 = mu - slack.eta;
    let beta_max = if y0 > 0.0 {
        let hb = h.h(y0);
        if hb >= cap {
            return Ok(DualPoint { beyond_range: true, ..DualPoint::infinite(0.0, 0.0) });
        }
        1.0 / (cap - hb)
    } else {
        1.0 / cap
    };
    let gmin = |a: f64, bt: f64| constraint_min_at(h, b, 0.0, mu, slack, a, bt).0;
    let obj = |a: f64, bt: f64| {
        let mut s = 0.0;
        for &(d, r, w) in &pts {
            let arg = 1.0 - a * d - bt * r;
            if arg <= 0.0 {
                return f64::NEG_INFINITY;
            }
            s += w * arg.ln();
        }
        s
    };

    // feasible l1-interval for fixed l2, then the best l1 inside it
    let inner = |bt: f64| -> Result<(f64, f64)> {
        if bt <= 0.0 {
            return Ok((0.0, obj(0.0, 0.0)));
        }
        let a0 = if y0 > 0.0 { bt * h.dh(y0) } else { 0.0 };
        if gmin(a0, bt) < 0.0 {
            // only reachable through rounding at beta_max
            return Ok((a0, f64::NEG_INFINITY));
        }
        let lo = if gmin(0.0, bt) >= 0.0 { 0.0 } else { bisect(|a| gmin(a, bt), 0.0, a0, false, 200) };
        let mut step = (a0 + 1.0).max(1.0);
        let mut hi = a0 + step;
        let mut guard = 0;
        while gmin(hi, bt) >= 0.0 {
            step *= 2.0;
            hi = a0 + step;
            guard += 1;
            if guard > 1100 || !hi.is_finite() {
                return Err(Error::NonConvergence(format!("no upper bracket for l1 at l2 = {bt}")));
            }
        }
        let hi = bisect(|a| gmin(a, bt), a0, hi, true, 200);
        Ok(maximize(|a| obj(a, bt), lo, hi, tol.golden, tol.max_iter))
    };

    let failure = std::cell::RefCell::new(None);
    let profile = |bt: f64| match inner(bt) {
        Ok((_, v)) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NEG_INFINITY
        }
    };
    let (bt, _) = maximize(profile, 0.0, beta_max, tol.golden, tol.max_iter);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let (a, v) = inner(bt)?;
    if !v.is_finite() {
        return Err(Error::NonConvergence("profile maximum is not finite".into()));
    }
    let feasible = gmin(a, bt) >= -1e-9;
    Ok(DualPoint { lambda1: a, lambda2: bt, value: v.max(0.0), feasible, in_family: true, beyond_range: false })
}

/// Moment-family divergence, multiplied by `1(F in family)`.
pub fn kinf_hmoment(f: &EmpiricalDistribution, mu: f64, spec: &MomentSpec, tol: Tolerance) -> Result<DualPoint> {
    if f.is_empty() {
        return Err(Error::Domain("empty sample".into()));
    }
    let mut d = solve_dual(f, mu, spec, Slack::NONE, tol)?;
    if !spec.contains(f) {
        d.in_family = false;
        d.value = 0.0;
    }
    Ok(d)
}

/// Dual of the moment family with inflated constraint region; equals the
/// divergence when `slack` is zero.
pub fn lambda_star<A: Atoms>(f: &A, mu: f64, spec: &MomentSpec, slack: Slack, tol: Tolerance) -> Result<DualPoint> {
    solve_dual(f, mu, spec, slack, tol)
}

/// `log(2 a / (a - mu))` with `a = h^{-1}(B)`: the largest value of the
/// uncentered divergence, reached by a Dirac mass at `-a`.
pub fn hmoment_upper(spec: &MomentSpec, mu: f64) -> Option<f64> {
    let a = spec.h_inv(spec.bound);
    (mu.abs() < a).then(|| (2.0 * a / (a - mu)).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ed(xs: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::from_samples(xs).unwrap()
    }

    fn sq(centered: bool) -> MomentSpec {
        MomentSpec::power(2.0, 1.0).unwrap().with_centered(centered)
    }

    #[test]
    fn dirac_at_zero_uncentered() {
        let d = kinf_hmoment(&ed(&[0.0]), 0.5, &sq(false), Tolerance::default()).unwrap();
        assert_abs_diff_eq!(d.value, (4.0f64 / 3.0).ln(), epsilon = 1e-7);
        assert_abs_diff_eq!(d.lambda1, 4.0 / 3.0, epsilon = 1e-3);
        assert_abs_diff_eq!(d.lambda2, 1.0 / 3.0, epsilon = 1e-3);
        assert!(d.feasible && d.in_family);
    }

    #[test]
    fn constraint_min_examples() {
        let (g, x) = constraint_min(&sq(false), 0.5, Slack::NONE, 4.0 / 3.0, 1.0 / 3.0);
        assert_abs_diff_eq!(g, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x, 2.0, epsilon = 1e-12);
        assert_eq!(constraint_min(&sq(true), 0.5, Slack::NONE, 1.0, 0.0).0, f64::NEG_INFINITY);
    }

    #[test]
    fn worst_case_dirac_reaches_upper_bound() {
        let spec = sq(false);
        let d = kinf_hmoment(&ed(&[-0.999_999]), 0.5, &spec, Tolerance::default()).unwrap();
        assert_abs_diff_eq!(d.value, hmoment_upper(&spec, 0.5).unwrap(), epsilon = 1e-4);
        assert_abs_diff_eq!(hmoment_upper(&spec, 0.5).unwrap(), 4f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn beyond_range_is_flagged() {
        let d = kinf_hmoment(&ed(&[0.0]), 1.5, &sq(false), Tolerance::default()).unwrap();
        assert!(d.beyond_range && d.value.is_infinite());
    }

    #[test]
    fn out_of_family_is_zero() {
        let d = kinf_hmoment(&ed(&[-2.0, 2.0]), 0.5, &sq(true), Tolerance::default()).unwrap();
        assert!(!d.in_family);
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn slack_shrinks_the_dual() {
        let f = ed(&[0.0]);
        let spec = sq(true);
        let t = Tolerance::default();
        let base = lambda_star(&f, 0.5, &spec, Slack::NONE, t).unwrap().value;
        let relaxed = lambda_star(&f, 0.5, &spec, Slack { eta: 0.0, gamma: 0.05 }, t).unwrap().value;
        assert!(relaxed < base);
        // Dirac template: closed form through the largest admissible bonus ratio
        let r = (0.75 + (0.5625f64 + 1.05).sqrt()) / 0.5;
        assert_abs_diff_eq!(relaxed, (1.0 / r).ln_1p(), epsilon = 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn shift_identity(xs in prop::collection::vec(-0.8f64..0.8, 1..12), mu in 0.0f64..0.9) {
            let t = Tolerance::default();
            let f = ed(&xs);
            let c = lambda_star(&f, mu, &sq(true), Slack::NONE, t).unwrap().value;
            let u = lambda_star(&f.shifted(mu), 0.0, &sq(false), Slack::NONE, t).unwrap().value;
            prop_assert!((c - u).abs() <= 1e-9 * (1.0 + c.abs()));
        }

        #[test]
        fn below_upper_bound(xs in prop::collection::vec(-0.99f64..0.99, 1..12), frac in 0.0f64..0.95) {
            let spec = sq(false);
            let f = ed(&xs);
            prop_assume!(spec.contains(&f));
            let mu = f.mean() + (1.0 - f.mean()) * frac;
            let d = kinf_hmoment(&f, mu, &spec, Tolerance::default()).unwrap();
            prop_assert!(d.value <= hmoment_upper(&spec, mu).unwrap() + 1e-9);
        }

        #[test]
        fn nondecreasing_in_mu(xs in prop::collection::vec(-0.5f64..0.5, 1..10), a in 0.0f64..0.9, b in 0.0f64..0.9) {
            let t = Tolerance::default();
            let f = ed(&xs);
            let spec = MomentSpec::power(1.5, 1.0).unwrap();
            let v1 = lambda_star(&f, a.min(b), &spec, Slack::NONE, t).unwrap().value;
            let v2 = lambda_star(&f, a.max(b), &spec, Slack::NONE, t).unwrap().value;
            prop_assert!(v2 >= v1 - 1e-8);
        }
    }
}
