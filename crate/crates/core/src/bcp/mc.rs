//! Monte-Carlo estimation of crossing probabilities.
//!
//! Draws are split into fixed-size blocks, each with its own random stream,
//! and block results are combined in block order, so estimates do not
//! depend on the thread count.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;

use super::golden_min;
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::moment::MomentSpec;
use crate::policies::hnpts_draw;
use crate::rng::{Purpose, RngStream, StreamId};

pub(crate) const BLOCK: u64 = 1 << 14;

/// Runs `m` draws in parallel blocks and folds the per-block outputs in order.
pub(crate) fn run_blocks<T: Send>(
    m: u64,
    seed: u64,
    tag: u64,
    f: impl Fn(&mut RngStream, u64) -> T + Sync,
) -> Vec<T> {
    let blocks = m.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK.min(m - b * BLOCK);
            let mut rng = RngStream::new(seed, StreamId::new(b, tag, Purpose::Bcp));
            f(&mut rng, len)
        })
        .collect()
}

/// Normal-approximation-free binomial interval.
pub fn wilson(hits: u64, m: u64, z: f64) -> (f64, f64) {
    if m == 0 {
        return (0.0, 1.0);
    }
    let n = m as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BcpEstimate {
    pub p_hat: f64,
    pub hits: u64,
    /// Number of draws behind `p_hat` (the conditioning count for
    /// conditional events).
    pub m: u64,
    pub ci: (f64, f64),
    pub stderr: f64,
}

impl BcpEstimate {
    pub(crate) fn from_counts(hits: u64, m: u64) -> Self {
        let p = if m == 0 { 0.0 } else { hits as f64 / m as f64 };
        let stderr = if m == 0 { 0.0 } else { (p * (1.0 - p) / m as f64).sqrt() };
        Self { p_hat: p, hits, m, ci: wilson(hits, m, 1.96), stderr }
    }

    /// `-ln(p_hat) / n`, only once at least 10 hits were seen.
    pub fn rate(&self, n: usize) -> Option<f64> {
        (self.hits >= 10).then(|| -self.p_hat.ln() / n as f64)
    }
}

/// Crossing events of Dirichlet-weighted data.
#[derive(Clone, Debug)]
pub enum BcpEvent {
    /// `w.X >= mu` with `w ~ Dirichlet(1, ..., 1)` on the given atoms.
    Mean,
    /// `w.X >= mu` and `w.h(|X - c|) <= B`, no bonus atom.
    Joint(MomentSpec),
    /// `w.X >= mu` given `w.h(|X - c|) <= B`.
    ConditionalJoint(MomentSpec),
    /// The h-NPTS test with a free bonus atom.
    Bonus(MomentSpec),
}

fn gamma_draw<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape == 1.0 {
        Exp1.sample(rng)
    } else {
        Gamma::new(shape, 1.0).expect("positive shape").sample(rng)
    }
}

/// Estimates the probability of `event` from `m` independent weight draws.
pub fn mc_bcp(f: &EmpiricalDistribution, mu: f64, event: &BcpEvent, m: u64, seed: u64) -> Result<BcpEstimate> {
    if f.is_empty() {
        return Err(Error::Domain("no atoms".into()));
    }
    if m == 0 {
        return Err(Error::Config("zero Monte-Carlo draws".into()));
    }
    let atoms = f.distinct();
    let moment_terms = |spec: &MomentSpec| -> Vec<f64> {
        let c = spec.center(mu);
        atoms.iter().map(|&(x, _)| spec.h((x - c).abs())).collect()
    };
    let counts: Vec<(u64, u64)> = match event {
        BcpEvent::Mean => run_blocks(m, seed, 0, |rng, len| {
            let mut hits = 0;
            for _ in 0..len {
                let (mut s, mut t) = (0.0, 0.0);
                for &(x, c) in atoms {
                    let g = gamma_draw(c as f64, rng);
                    s += g * (x - mu);
                    t += g;
                }
                if s >= 0.0 && t > 0.0 {
                    hits += 1;
                }
            }
            (hits, len)
        }),
        BcpEvent::Joint(spec) | BcpEvent::ConditionalJoint(spec) => {
            let z = moment_terms(spec);
            let conditional = matches!(event, BcpEvent::ConditionalJoint(_));
            run_blocks(m, seed, 1, |rng, len| {
                let (mut hits, mut base) = (0, 0);
                for _ in 0..len {
                    let (mut s, mut q) = (0.0, 0.0);
                    for (&(x, c), &zi) in atoms.iter().zip(&z) {
                        let g = gamma_draw(c as f64, rng);
                        s += g * (x - mu);
                        q += g * (spec.bound - zi);
                    }
                    let ok_moment = q >= 0.0;
                    if ok_moment {
                        base += 1;
                    }
                    if s >= 0.0 && ok_moment {
                        hits += 1;
                    }
                }
                (hits, if conditional { base } else { len })
            })
        }
        BcpEvent::Bonus(spec) => run_blocks(m, seed, 2, |rng, len| {
            let hits = (0..len).filter(|_| hnpts_draw(f, mu, spec, rng)).count() as u64;
            (hits, len)
        }),
    };
    let (hits, total) = counts.iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(BcpEstimate::from_counts(hits, total))
}

/// Running mean of `exp(l_j)` kept in the log domain.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LogMean {
    top: f64,
    s1: f64,
    s2: f64,
    n: u64,
}

impl LogMean {
    pub(crate) fn new() -> Self {
        Self { top: f64::NEG_INFINITY, s1: 0.0, s2: 0.0, n: 0 }
    }

    pub(crate) fn push(&mut self, l: f64) {
        self.n += 1;
        if l == f64::NEG_INFINITY {
            return;
        }
        if l > self.top {
            let r = (self.top - l).exp();
            self.s1 *= r;
            self.s2 *= r * r;
            self.top = l;
        }
        let e = (l - self.top).exp();
        self.s1 += e;
        self.s2 += e * e;
    }

    pub(crate) fn merge(mut self, o: LogMean) -> LogMean {
        if o.top > self.top {
            return o.merge(self);
        }
        self.n += o.n;
        if o.top > f64::NEG_INFINITY {
            let r = (o.top - self.top).exp();
            self.s1 += o.s1 * r;
            self.s2 += o.s2 * r * r;
        }
        self
    }

    /// `ln` of the mean and the relative standard error of the mean.
    pub(crate) fn finish(&self) -> (f64, f64) {
        if self.n == 0 || self.s1 == 0.0 {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        let n = self.n as f64;
        let mean = self.s1 / n;
        let var = (self.s2 / n - mean * mean).max(0.0);
        (self.top + mean.ln(), (var / n).sqrt() / mean)
    }
}

/// Set of bonus ratios `r = (sum of data gammas) / (bonus exponential)` for
/// which the h-NPTS test passes, given the normalized weighted sums
/// `a = sum u_i (mu* - X_i)` and `b = sum u_i (B - h_i)`.
pub(crate) fn ratio_interval(a: f64, b: f64, mu_star: f64, spec: &MomentSpec) -> Option<(f64, f64)> {
    let cap = spec.bound + spec.gamma;
    let dev = |r: f64| {
        let t = (r * a).max(0.0);
        if spec.centered {
            t
        } else {
            (mu_star + t).max(0.0)
        }
    };
    let phi = |r: f64| spec.h(dev(r)) - r * b;
    if a <= 0.0 {
        let h0 = spec.h(dev(0.0));
        return if b > 0.0 {
            Some((((h0 - cap) / b).max(0.0), f64::INFINITY))
        } else if b == 0.0 {
            (h0 <= cap).then_some((0.0, f64::INFINITY))
        } else {
            (h0 <= cap).then(|| (0.0, (cap - h0) / (-b)))
        };
    }
    // phi is convex and superlinear in r
    let mut hi = 1.0;
    while phi(hi) <= cap.max(phi(0.0)) {
        hi *= 2.0;
        if hi > 1e300 {
            return Some((0.0, f64::INFINITY));
        }
    }
    let (rmin, pmin) = if phi(0.0) <= cap { (0.0, phi(0.0)) } else { golden_min(&phi, 0.0, hi) };
    if pmin > cap {
        return None;
    }
    let root = |mut l: f64, mut u: f64, inside_left: bool| {
        for _ in 0..200 {
            let m = 0.5 * (l + u);
            if m <= l || m >= u {
                break;
            }
            if (phi(m) <= cap) == inside_left {
                l = m;
            } else {
                u = m;
            }
        }
        0.5 * (l + u)
    };
    let lo = if phi(0.0) <= cap { 0.0 } else { root(0.0, rmin, false) };
    Some((lo, root(rmin, hi, true)))
}

/// `ln P(r_lo <= S / E <= r_hi)` for `S ~ Gamma(n)` and `E ~ Exp(1)` independent.
pub(crate) fn log_ratio_prob(n: f64, lo: f64, hi: f64) -> f64 {
    let lf = |r: f64| if r == f64::INFINITY { 0.0 } else if r <= 0.0 { f64::NEG_INFINITY } else { -n * (1.0 / r).ln_1p() };
    let (l_hi, l_lo) = (lf(hi), lf(lo));
    if l_lo == f64::NEG_INFINITY {
        return l_hi;
    }
    let d = l_lo - l_hi;
    if d >= 0.0 {
        return f64::NEG_INFINITY;
    }
    l_hi + (-d.exp()).ln_1p()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogBcpEstimate {
    pub log_p: f64,
    /// Relative standard error of `exp(log_p)`.
    pub rel_stderr: f64,
    pub m: u64,
}

impl LogBcpEstimate {
    pub fn p_hat(&self) -> f64 {
        self.log_p.exp()
    }

    pub fn rate(&self, n: usize) -> f64 {
        -self.log_p / n as f64
    }
}

/// h-NPTS crossing probability with the bonus weight integrated out.
///
/// Writing the Dirichlet weights as `(u S, E) / (S + E)` with `u` the
/// normalized data weights, the test passes iff `S / E` lies in an interval
/// that depends only on `u`, and `P(S / E <= r) = (1 + 1/r)^(-n)`. Averaging
/// this conditional probability over `m` draws of `u` gives an unbiased
/// estimate that stays informative far below `1/m`.
pub fn hnpts_bcp_conditional(
    f: &EmpiricalDistribution,
    mu_star: f64,
    spec: &MomentSpec,
    m: u64,
    seed: u64,
) -> Result<LogBcpEstimate> {
    if f.is_empty() || m == 0 {
        return Err(Error::Domain("need observations and draws".into()));
    }
    let atoms = f.distinct();
    let n = f.len() as f64;
    let c = spec.center(mu_star);
    let terms: Vec<(f64, f64, f64)> =
        atoms.iter().map(|&(x, k)| (mu_star - x, spec.bound - spec.h((x - c).abs()), k as f64)).collect();
    let single = terms.len() == 1;
    let parts = run_blocks(m, seed, 3, |rng, len| {
        let mut acc = LogMean::new();
        for _ in 0..len {
            let (mut a, mut b, mut t) = (0.0, 0.0, 0.0);
            if single {
                (a, b, t) = (terms[0].0, terms[0].1, 1.0);
            } else {
                for &(da, db, k) in &terms {
                    let g = gamma_draw(k, rng);
                    a += g * da;
                    b += g * db;
                    t += g;
                }
            }
            let l = match ratio_interval(a / t, b / t, mu_star, spec) {
                Some((lo, hi)) => log_ratio_prob(n, lo, hi),
                None => f64::NEG_INFINITY,
            };
            acc.push(l);
        }
        acc
    });
    let acc = parts.into_iter().fold(LogMean::new(), LogMean::merge);
    let (log_p, rel_stderr) = acc.finish();
    Ok(LogBcpEstimate { log_p, rel_stderr, m })
}
