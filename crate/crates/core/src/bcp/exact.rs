//! Closed forms and analytic bounds for boundary-crossing probabilities.

use crate::divergence::{kinf_hmoment, Tolerance};
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::moment::MomentSpec;

const TIE: f64 = 1e-9;

/// `P(sum_i w_i X_i >= mu)` for `w ~ Dirichlet(1, ..., 1)` over `n + 1`
/// distinct atoms:
/// `sum_i (X_i - mu)_+^n / prod_{j != i} (X_i - X_j)`.
pub fn exact_dirichlet_exceedance(xs: &[f64], mu: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::Domain("no atoms".into()));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    for w in sorted.windows(2) {
        if w[1] - w[0] <= TIE {
            return Err(Error::Tie(w[0]));
        }
    }
    if mu <= sorted[0] {
        return Ok(1.0);
    }
    if mu >= sorted[sorted.len() - 1] {
        return Ok(0.0);
    }
    let n = (xs.len() - 1) as i32;
    let mut total = 0.0;
    for (i, &xi) in sorted.iter().enumerate() {
        if xi <= mu {
            continue;
        }
        let mut term = (xi - mu).powi(n);
        for (j, &xj) in sorted.iter().enumerate() {
            if j != i {
                term /= xi - xj;
            }
        }
        total += term;
    }
    Ok(total)
}

/// `exp(-n kinf(F_n, mu))`: bounds `P(w.X >= mu, w.h(|X - c|) <= B)` for
/// `w ~ Dirichlet(1, ..., 1)` on the `n` observations.
pub fn chernoff_joint_upper(f: &EmpiricalDistribution, mu: f64, spec: &MomentSpec) -> Result<f64> {
    let d = kinf_hmoment(f, mu, spec, Tolerance::default())?;
    Ok((-(f.len() as f64) * d.value).exp())
}

/// `exp(-n (mu - mu_plus) / (x_extra - mu))` with
/// `mu_plus = (1/n) sum min(X_j, mu)`: a lower bound on the exceedance
/// probability of `n` observations plus the atom `x_extra > mu`.
pub fn simple_truncation_lower(xs: &[f64], x_extra: f64, mu: f64) -> Result<f64> {
    if xs.is_empty() || !(x_extra > mu) {
        return Err(Error::Domain("need observations and an extra atom above the threshold".into()));
    }
    let n = xs.len() as f64;
    let mu_plus = xs.iter().map(|&x| x.min(mu)).sum::<f64>() / n;
    Ok((-n * (mu - mu_plus) / (x_extra - mu)).exp())
}

/// `exp(-n log(n C))` with the constant of the small-sample lower bound on
/// the h-NPTS crossing probability. `None` when the constant is undefined.
pub fn hnpts_small_sample_lower(spec: &MomentSpec, mu: f64, n: usize) -> Option<f64> {
    let a = spec.h_inv(spec.bound);
    if !(a > mu) {
        return None;
    }
    let (c1, mid) = if spec.centered {
        ((3.0 * a - mu) / (a - mu), (a - mu) / 2.0)
    } else {
        ((3.0 * a + mu) / (a - mu), (mu + a) / 2.0)
    };
    let denom = spec.bound - spec.h(mid.abs());
    if !(denom > 0.0) {
        return None;
    }
    let c = c1.max(spec.bound / denom);
    let nf = n as f64;
    Some((-nf * (nf * c).ln()).exp())
}
