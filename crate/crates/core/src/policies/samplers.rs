//! Posterior and Dirichlet samplers used by the Thompson-style policies.

use rand::Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma, StudentT};

use crate::divergence::{kl_full, SpefKind};
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::moment::MomentSpec;

const GRID: usize = 2048;

/// Draw from the conjugate posterior of a SPEF mean under a uniform prior on
/// `clip`, with the empirical mean clipped into `clip` first.
pub fn sample_spef_conjugate<R: Rng + ?Sized>(
    kind: SpefKind,
    f: &EmpiricalDistribution,
    clip: (f64, f64),
    rng: &mut R,
) -> Result<f64> {
    let (lo, hi) = clip;
    if !(hi > lo) {
        return Err(Error::Config(format!("empty clip range [{lo}, {hi}]")));
    }
    let n = f.len() as f64;
    let m = f.mean().clamp(lo, hi);
    match kind {
        SpefKind::Bernoulli => {
            let beta = Beta::new(n * m + 1.0, n * (1.0 - m) + 1.0).map_err(|e| Error::Domain(e.to_string()))?;
            Ok(beta.sample(rng))
        }
        _ => Ok(grid_inverse_cdf(|x| -n * kl_full(kind, m, x), lo, hi, rng.random())),
    }
}

/// Inverse CDF of a density `exp(logd)` on `[lo, hi]`, linear between grid
/// points.
pub(crate) fn grid_inverse_cdf(logd: impl Fn(f64) -> f64, lo: f64, hi: f64, u: f64) -> f64 {
    let dx = (hi - lo) / (GRID - 1) as f64;
    let ld: Vec<f64> = (0..GRID).map(|i| logd(lo + dx * i as f64)).collect();
    let top = ld.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let dens: Vec<f64> = ld.iter().map(|l| (l - top).exp()).collect();
    let mut cdf = vec![0.0; GRID];
    for i in 1..GRID {
        cdf[i] = cdf[i - 1] + 0.5 * (dens[i - 1] + dens[i]) * dx;
    }
    let target = u * cdf[GRID - 1];
    let i = cdf.partition_point(|&c| c < target).clamp(1, GRID - 1);
    // the density is linear on the cell, so the CDF there is quadratic
    let (p0, p1) = (dens[i - 1], dens[i]);
    let need = target - cdf[i - 1];
    let slope = (p1 - p0) / dx;
    let t = if slope.abs() < 1e-12 * (p0 + p1).max(1e-300) / dx {
        if p0 > 0.0 { need / p0 } else { 0.0 }
    } else {
        let disc = (p0 * p0 + 2.0 * slope * need).max(0.0);
        (disc.sqrt() - p0) / slope
    };
    (lo + dx * (i - 1) as f64 + t.clamp(0.0, dx)).clamp(lo, hi)
}

/// `mean + sqrt(var) T / sqrt(nu)` with `T ~ Student(nu)`, `nu = n + 2 alpha - 1`.
pub fn sample_gaussian_ig<R: Rng + ?Sized>(mean: f64, var: f64, n: usize, alpha: f64, rng: &mut R) -> Result<f64> {
    let nu = n as f64 + 2.0 * alpha - 1.0;
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("degrees of freedom {nu} must be positive")));
    }
    let t = StudentT::new(nu).map_err(|e| Error::Domain(e.to_string()))?.sample(rng);
    Ok(mean + var.max(0.0).sqrt() * t / nu.sqrt())
}

/// Arms that are pulled regardless of their posterior draw: large gap or
/// large spread relative to `sqrt(n)`.
pub fn gaussian_check(gap: f64, sd: f64, n: usize) -> bool {
    let r = (n as f64).sqrt();
    gap * gap >= r || sd >= r
}

fn gamma_draw<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape == 1.0 {
        Exp1.sample(rng)
    } else {
        Gamma::new(shape, 1.0).expect("positive shape").sample(rng)
    }
}

/// Unnormalized Dirichlet weights: one Gamma(count) per distinct value,
/// plus a unit exponential for the bonus atom (last entry).
pub fn dirichlet_gammas<R: Rng + ?Sized>(f: &EmpiricalDistribution, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    out.extend(f.distinct().iter().map(|&(_, c)| gamma_draw(c as f64, rng)));
    out.push(Exp1.sample(rng));
}

/// `sum_i w_i X_i + w_{n+1} B` with `w ~ Dirichlet(1, ..., 1)`.
pub fn sample_npts_bounded<R: Rng + ?Sized>(f: &EmpiricalDistribution, upper: f64, rng: &mut R) -> f64 {
    let mut s = 0.0;
    let mut tot = 0.0;
    for &(x, c) in f.distinct() {
        let g = gamma_draw(c as f64, rng);
        s += g * x;
        tot += g;
    }
    let e: f64 = Exp1.sample(rng);
    (s + e * upper) / (tot + e)
}

/// Closed-form h-NPTS test given `a = (1/w) sum w_i (mu* - X_i)` and
/// `b = (1/w) sum w_i (B - h_i)`, with `w` the bonus weight.
pub(crate) fn check_ratios(a: f64, b: f64, mu_star: f64, spec: &MomentSpec) -> bool {
    let dev = if spec.centered { a.max(0.0) } else { (mu_star + a.max(0.0)).max(0.0) };
    spec.h(dev) <= spec.bound + spec.gamma + b
}

/// Whether a weighting of `X_1, ..., X_n` plus a free bonus atom `x >= mu*`
/// can reach mean `mu*` while keeping the inflated moment condition.
///
/// `w` has `n + 1` entries; the last one is the bonus weight.
pub fn hnpts_check(w: &[f64], xs: &[f64], mu_star: f64, spec: &MomentSpec) -> Result<bool> {
    if w.len() != xs.len() + 1 {
        return Err(Error::Domain(format!("{} weights for {} observations", w.len(), xs.len())));
    }
    let wb = w[xs.len()];
    if !(wb > 0.0) {
        return Err(Error::DegenerateWeight(format!("bonus weight {wb}")));
    }
    let c = spec.center(mu_star);
    let (mut a, mut b) = (0.0, 0.0);
    for (&wi, &x) in w.iter().zip(xs) {
        a += wi * (mu_star - x);
        b += wi * (spec.bound - spec.h((x - c).abs()));
    }
    Ok(check_ratios(a / wb, b / wb, mu_star, spec))
}

/// One Dirichlet draw of the h-NPTS test on aggregated data.
pub fn hnpts_draw<R: Rng + ?Sized>(f: &EmpiricalDistribution, mu_star: f64, spec: &MomentSpec, rng: &mut R) -> bool {
    let c = spec.center(mu_star);
    let (mut a, mut b) = (0.0, 0.0);
    for &(x, cnt) in f.distinct() {
        let g = gamma_draw(cnt as f64, rng);
        a += g * (mu_star - x);
        b += g * (spec.bound - spec.h((x - c).abs()));
    }
    let e: f64 = Exp1.sample(rng);
    check_ratios(a / e, b / e, mu_star, spec)
}
