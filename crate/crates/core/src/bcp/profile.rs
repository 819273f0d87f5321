//! Rate profiles of crossing probabilities along a sample-size grid.

use rand_distr::{Distribution, StandardNormal};

use super::exact::{chernoff_joint_upper, hnpts_small_sample_lower};
use super::mc::{hnpts_bcp_conditional, mc_bcp, run_blocks, BcpEvent};
use crate::arm::ArmModel;
use crate::divergence::{kinf_gaussian_params, kl_full, lambda_star, Slack, SpefKind, Tolerance};
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::moment::MomentSpec;
use crate::policies::{sample_gaussian_ig, sample_npts_bounded, sample_spef_conjugate};
use crate::rng::{Purpose, RngStream, StreamId};

/// How the empirical distribution of size `n` is built.
#[derive(Clone, Debug)]
pub enum Template {
    Dirac(f64),
    /// The pattern repeated (and truncated) to length `n`.
    Pattern(Vec<f64>),
    /// First `n` draws of one reward stream.
    Sampled { arm: ArmModel, seed: u64 },
}

impl Template {
    pub fn build(&self, n: usize) -> Result<EmpiricalDistribution> {
        match self {
            Template::Dirac(x) => EmpiricalDistribution::from_samples(&vec![*x; n]),
            Template::Pattern(p) => {
                if p.is_empty() {
                    return Err(Error::Config("empty template pattern".into()));
                }
                let xs: Vec<f64> = p.iter().copied().cycle().take(n).collect();
                EmpiricalDistribution::from_samples(&xs)
            }
            Template::Sampled { arm, seed } => {
                arm.validate()?;
                let mut rng = RngStream::new(*seed, StreamId::new(0, 0, Purpose::Reward(0)));
                let xs: Vec<f64> = (0..n).map(|_| arm.draw(&mut rng)).collect();
                EmpiricalDistribution::from_samples(&xs)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    HitCount,
    /// Bonus weight integrated analytically (h-NPTS event only).
    Conditional,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub m: u64,
    pub p_hat: f64,
    pub ci: (f64, f64),
    /// `-ln(p_hat) / n`; `None` when the estimate is not resolved.
    pub rate: Option<f64>,
    pub bound_upper: f64,
    pub bound_lower: Option<f64>,
    pub lambda_star: f64,
}

/// h-NPTS crossing probability and its rate for each `n`, next to the
/// reference exponent `Lambda*_gamma(F_n, mu*)`.
///
/// `bound_upper` is `exp(-n Lambda*_gamma)`, the exponential part of the
/// upper bound (its constant is not explicit); `bound_lower` is the
/// small-sample lower bound.
pub fn bcp_rate_profile(
    template: &Template,
    mu_star: f64,
    spec: &MomentSpec,
    n_list: &[usize],
    m: u64,
    seed: u64,
    estimator: Estimator,
) -> Result<Vec<RateRow>> {
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        if n == 0 {
            return Err(Error::Config("sample sizes must be positive".into()));
        }
        let f = template.build(n)?;
        let lam = lambda_star(&f, mu_star, spec, Slack { eta: 0.0, gamma: spec.gamma }, Tolerance::default())?.value;
        let s = seed.wrapping_add(i as u64);
        let (p_hat, ci, rate) = match estimator {
            Estimator::HitCount => {
                let e = mc_bcp(&f, mu_star, &BcpEvent::Bonus(spec.clone()), m, s)?;
                (e.p_hat, e.ci, e.rate(n))
            }
            Estimator::Conditional => {
                let e = hnpts_bcp_conditional(&f, mu_star, spec, m, s)?;
                let half = 1.96 * e.rel_stderr;
                let p = e.p_hat();
                (p, ((p * (1.0 - half)).max(0.0), p * (1.0 + half)), e.log_p.is_finite().then(|| e.rate(n)))
            }
        };
        rows.push(RateRow {
            n,
            m,
            p_hat,
            ci,
            rate,
            bound_upper: (-(n as f64) * lam).exp(),
            bound_lower: hnpts_small_sample_lower(spec, mu_star, n),
            lambda_star: lam,
        });
    }
    Ok(rows)
}

/// Joint-event profile with the Chernoff upper bound.
pub fn joint_bound_row(f: &EmpiricalDistribution, mu: f64, spec: &MomentSpec, m: u64, seed: u64) -> Result<RateRow> {
    let e = mc_bcp(f, mu, &BcpEvent::Joint(spec.clone()), m, seed)?;
    let up = chernoff_joint_upper(f, mu, spec)?;
    Ok(RateRow {
        n: f.len(),
        m,
        p_hat: e.p_hat,
        ci: e.ci,
        rate: e.rate(f.len()),
        bound_upper: up,
        bound_lower: None,
        lambda_star: -up.ln() / f.len() as f64,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailRow {
    pub x: f64,
    pub empirical: f64,
    pub stderr: f64,
    pub bound: f64,
}

/// Upper-tail concentration of the Gaussian divergence of an `n`-sample of
/// `N(0, 1)` evaluated at the true mean, against
/// `sqrt(8 / (pi (1 - exp(-2 x0)))) exp(-(n - 1) x)`.
pub fn gaussian_kinf_tail_check(n: usize, x0: f64, xs: &[f64], m: u64, seed: u64) -> Result<Vec<TailRow>> {
    if n < 2 {
        return Err(Error::Domain("need at least two observations".into()));
    }
    if xs.iter().any(|&x| x < x0) || !(x0 > 0.0) {
        return Err(Error::Domain("thresholds must be at least x0 > 0".into()));
    }
    let blocks = run_blocks(m, seed, 10, |rng, len| {
        let mut hits = vec![0u64; xs.len()];
        for _ in 0..len {
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let z: f64 = StandardNormal.sample(rng);
                s += z;
                s2 += z * z;
            }
            let mean = s / n as f64;
            let var = (s2 / n as f64 - mean * mean).max(0.0);
            let k = kinf_gaussian_params(mean, var, 0.0);
            for (h, &x) in hits.iter_mut().zip(xs) {
                if k >= x {
                    *h += 1;
                }
            }
        }
        hits
    });
    let c = (8.0 / (std::f64::consts::PI * (1.0 - (-2.0 * x0).exp()))).sqrt();
    Ok(xs
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let hits: u64 = blocks.iter().map(|b| b[j]).sum();
            let p = hits as f64 / m as f64;
            TailRow { x, empirical: p, stderr: (p * (1.0 - p) / m as f64).sqrt(), bound: c * (-((n - 1) as f64) * x).exp() }
        })
        .collect())
}

/// Posterior sampler whose crossing probability is profiled.
#[derive(Clone, Debug)]
pub enum RateSampler {
    Spef { kind: SpefKind, clip: (f64, f64) },
    GaussianIg { var: f64, alpha: f64 },
    /// NPTS on `round(mean * n)` ones and zeros.
    NptsBernoulli,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpefRateRow {
    pub n: usize,
    pub p_hat: f64,
    pub hits: u64,
    /// `-ln(p_hat) / n`.
    pub rate: Option<f64>,
    /// `-(ln p_n - ln p_{n'}) / (n - n')` against the previous grid point.
    pub slope_rate: Option<f64>,
    pub reference: f64,
}

/// Crossing probability of a posterior with frozen empirical mean `mean`
/// above `mu`, for each `n`. The reference exponent is the family
/// divergence `kl(mean, mu)` (or its Gaussian analogue).
pub fn spef_bcp_rate_check(
    sampler: &RateSampler,
    mean: f64,
    mu: f64,
    n_list: &[usize],
    m: u64,
    seed: u64,
) -> Result<Vec<SpefRateRow>> {
    let reference = match sampler {
        RateSampler::Spef { kind, .. } => kl_full(*kind, mean, mu),
        RateSampler::GaussianIg { var, .. } => kinf_gaussian_params(mean, *var, mu),
        RateSampler::NptsBernoulli => kl_full(SpefKind::Bernoulli, mean, mu),
    };
    let mut out: Vec<SpefRateRow> = Vec::new();
    for (i, &n) in n_list.iter().enumerate() {
        let ones = (mean * n as f64).round() as usize;
        let data: EmpiricalDistribution = match sampler {
            RateSampler::Spef { .. } => EmpiricalDistribution::from_samples(&vec![mean; n])?,
            RateSampler::NptsBernoulli => {
                let xs: Vec<f64> = (0..n).map(|j| if j < ones { 1.0 } else { 0.0 }).collect();
                EmpiricalDistribution::from_samples(&xs)?
            }
            RateSampler::GaussianIg { .. } => EmpiricalDistribution::new(),
        };
        let tag = 20 + i as u64;
        let counts = run_blocks(m, seed, tag, |rng, len| -> Result<u64> {
            let mut hits = 0;
            for _ in 0..len {
                let v = match sampler {
                    RateSampler::Spef { kind, clip } => sample_spef_conjugate(*kind, &data, *clip, rng)?,
                    RateSampler::GaussianIg { var, alpha } => sample_gaussian_ig(mean, *var, n, *alpha, rng)?,
                    RateSampler::NptsBernoulli => sample_npts_bounded(&data, 1.0, rng),
                };
                if v >= mu {
                    hits += 1;
                }
            }
            Ok(hits)
        });
        let hits = counts.into_iter().sum::<Result<u64>>()?;
        let p = hits as f64 / m as f64;
        let rate = (hits >= 10).then(|| -p.ln() / n as f64);
        let slope_rate = match (out.last(), rate) {
            (Some(prev), Some(_)) if prev.hits >= 10 => Some(-(p.ln() - prev.p_hat.ln()) / (n - prev.n) as f64),
            _ => None,
        };
        out.push(SpefRateRow { n, p_hat: p, hits, rate, slope_rate, reference });
    }
    Ok(out)
}
