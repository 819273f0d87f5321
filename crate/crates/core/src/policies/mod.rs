//! Randomized bandit policies: MED and the TS-dagger family.

mod samplers;

pub use samplers::{
    dirichlet_gammas, gaussian_check, hnpts_check, hnpts_draw, sample_gaussian_ig, sample_npts_bounded,
    sample_spef_conjugate,
};

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::arm::ArmModel;
use crate::divergence::{DivergenceSpec, Family, SpefKind};
use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::moment::MomentSpec;

/// Estimator of each arm's mean used for ranking and for `mu*`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum MeanEstimator {
    #[default]
    Empirical,
    /// `(1/n) sum x_i 1(|x_i| <= n)`.
    Truncated,
}

impl MeanEstimator {
    pub fn estimate(&self, f: &EmpiricalDistribution) -> f64 {
        match self {
            MeanEstimator::Empirical => f.mean(),
            MeanEstimator::Truncated => f.truncated_mean(f.len() as f64),
        }
    }
}

/// Exploration inflation `a_n` in the MED exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ASchedule {
    Zero,
    /// `a_n = c / n`.
    Inverse(f64),
}

impl ASchedule {
    pub fn at(&self, n: usize) -> f64 {
        match self {
            ASchedule::Zero => 0.0,
            ASchedule::Inverse(c) => c / n.max(1) as f64,
        }
    }

    /// `4/n` for exponential families and Gaussians, 0 otherwise.
    pub fn default_for(family: &Family) -> Self {
        match family {
            Family::Spef(_) | Family::Gaussian => ASchedule::Inverse(4.0),
            _ => ASchedule::Zero,
        }
    }
}

#[derive(Clone, Debug)]
pub enum PolicyKind {
    Med { divergence: DivergenceSpec, schedule: ASchedule },
    /// TS-dagger with conjugate SPEF posteriors.
    TsSpef { kind: SpefKind, clip: (f64, f64) },
    /// TS-dagger for Gaussians with an inverse-gamma style prior of order `alpha`.
    TsGaussian { alpha: f64 },
    /// Non-parametric TS-dagger for rewards in `(-inf, upper]`.
    Npts { upper: f64 },
    /// Non-parametric TS-dagger for a moment family.
    HNpts { moment: MomentSpec },
    /// Index-form Thompson Sampling with Beta posteriors.
    ClassicTsBernoulli,
    Uniform,
    Fixed { arm: usize },
}

impl PolicyKind {
    pub fn init_pulls(&self) -> usize {
        match self {
            PolicyKind::TsGaussian { alpha } => 2usize.max((3.0 - (2.0 * alpha).ceil()).max(0.0) as usize),
            PolicyKind::Uniform | PolicyKind::Fixed { .. } => 0,
            _ => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            PolicyKind::Med { divergence, .. } => format!("med-{}", divergence.family.name()),
            PolicyKind::TsSpef { .. } => "ts-spef".into(),
            PolicyKind::TsGaussian { .. } => "ts-gaussian".into(),
            PolicyKind::Npts { .. } => "npts".into(),
            PolicyKind::HNpts { .. } => "h-npts".into(),
            PolicyKind::ClassicTsBernoulli => "ts-classic".into(),
            PolicyKind::Uniform => "uniform".into(),
            PolicyKind::Fixed { arm } => format!("fixed-{arm}"),
        }
    }

    /// Rejects policy/environment pairs whose assumptions do not hold.
    pub fn check_env(&self, arms: &[ArmModel]) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("{}: {m}", self.name())));
        let need_upper = |upper: f64| -> Result<()> {
            for a in arms {
                match a.upper() {
                    Some(u) if u <= upper => {}
                    _ => return bad(format!("arm {} is not bounded by {upper}", a.label())),
                }
            }
            Ok(())
        };
        let need_kind = |kind: SpefKind| -> Result<()> {
            for a in arms {
                let ok = matches!(
                    (kind, a),
                    (SpefKind::Bernoulli, ArmModel::Bernoulli { .. })
                        | (SpefKind::Poisson, ArmModel::Poisson { .. })
                        | (SpefKind::GaussianKnownVar { .. }, ArmModel::GaussianKnownVar { .. })
                );
                if !ok {
                    return bad(format!("arm {} is not in the {kind:?} family", a.label()));
                }
            }
            Ok(())
        };
        match self {
            PolicyKind::Med { divergence, .. } => match &divergence.family {
                Family::Bounded { upper } => need_upper(*upper),
                Family::Spef(kind) => need_kind(*kind),
                _ => Ok(()),
            },
            PolicyKind::TsSpef { kind, .. } => need_kind(*kind),
            PolicyKind::Npts { upper } => need_upper(*upper),
            PolicyKind::ClassicTsBernoulli => need_kind(SpefKind::Bernoulli),
            PolicyKind::Fixed { arm } if *arm >= arms.len() => bad(format!("arm index {arm} out of range")),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolicyConfig {
    pub name: String,
    pub kind: PolicyKind,
    pub estimator: MeanEstimator,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind) -> Self {
        Self { name: kind.name(), kind, estimator: MeanEstimator::Empirical }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_estimator(mut self, e: MeanEstimator) -> Self {
        self.estimator = e;
        self
    }
}

/// Per-arm observations collected so far.
#[derive(Clone, Debug)]
pub struct PolicyState {
    pub arms: Vec<EmpiricalDistribution>,
}

impl PolicyState {
    pub fn new(k: usize) -> Self {
        Self { arms: vec![EmpiricalDistribution::new(); k] }
    }

    pub fn observe(&mut self, arm: usize, x: f64) -> Result<()> {
        self.arms[arm].push(x)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.arms.iter().map(|a| a.len()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingDecision {
    pub chosen: usize,
    pub candidates: Vec<usize>,
    /// Full sampling distribution when the policy has one in closed form.
    pub probabilities: Option<Vec<f64>>,
    /// Per-arm divergences (MED) or posterior draws (TS-dagger, NaN when
    /// no draw was needed).
    pub diagnostics: Vec<f64>,
}

impl SamplingDecision {
    fn only(arm: usize, k: usize) -> Self {
        Self { chosen: arm, candidates: vec![arm], probabilities: None, diagnostics: vec![f64::NAN; k] }
    }
}

/// Normalizes `exp(logw)` with max-subtraction. Returns the probabilities
/// and the normalizer `sum exp(logw - max)`.
pub fn softmax(logw: &[f64]) -> (Vec<f64>, f64) {
    let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = e.iter().sum();
    (e.iter().map(|x| x / z).collect(), z)
}

fn categorical<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.iter().rposition(|&x| x > 0.0).unwrap_or(0)
}

fn uniform_pick<R: Rng + ?Sized>(c: &[usize], rng: &mut R) -> usize {
    c[rng.random_range(0..c.len())]
}

/// One decision from a fixed state.
pub fn policy_step<R: Rng + ?Sized>(cfg: &PolicyConfig, state: &PolicyState, rng: &mut R) -> Result<SamplingDecision> {
    let k = state.arms.len();
    if k == 0 {
        return Err(Error::Config("no arms".into()));
    }
    let init = cfg.kind.init_pulls();
    if let Some(arm) = state.arms.iter().position(|a| a.len() < init) {
        return Ok(SamplingDecision::only(arm, k));
    }
    let means: Vec<f64> = state.arms.iter().map(|a| cfg.estimator.estimate(a)).collect();
    let mu_star = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best: Vec<usize> = (0..k).filter(|&i| means[i] >= mu_star).collect();

    match &cfg.kind {
        PolicyKind::Med { divergence, schedule } => {
            let mut d = vec![0.0; k];
            let mut logw = vec![0.0; k];
            for i in 0..k {
                let skip = cfg.estimator == MeanEstimator::Empirical && means[i] >= mu_star;
                d[i] = if skip { 0.0 } else { divergence.evaluate(&state.arms[i], mu_star)? };
                let n = state.arms[i].len();
                logw[i] = if d[i] == 0.0 { 0.0 } else { -(n as f64) * d[i] / (1.0 + schedule.at(n)) };
                if logw[i].is_nan() {
                    return Err(Error::NonConvergence(format!("MED weight of arm {i} is NaN")));
                }
            }
            let (p, _) = softmax(&logw);
            let chosen = categorical(&p, rng);
            Ok(SamplingDecision { chosen, candidates: (0..k).collect(), probabilities: Some(p), diagnostics: d })
        }
        PolicyKind::Uniform => Ok(SamplingDecision {
            chosen: rng.random_range(0..k),
            candidates: (0..k).collect(),
            probabilities: Some(vec![1.0 / k as f64; k]),
            diagnostics: vec![f64::NAN; k],
        }),
        PolicyKind::Fixed { arm } => Ok(SamplingDecision::only(*arm, k)),
        PolicyKind::ClassicTsBernoulli => {
            let mut draws = vec![0.0; k];
            for (i, a) in state.arms.iter().enumerate() {
                let s = a.mean() * a.len() as f64;
                let beta = Beta::new(s + 1.0, a.len() as f64 - s + 1.0).map_err(|e| Error::Domain(e.to_string()))?;
                draws[i] = beta.sample(rng);
            }
            let chosen = (0..k).fold(0, |b, i| if draws[i] > draws[b] { i } else { b });
            Ok(SamplingDecision { chosen, candidates: vec![chosen], probabilities: None, diagnostics: draws })
        }
        kind => {
            let mut candidates = best.clone();
            let mut diag = vec![f64::NAN; k];
            for i in 0..k {
                if means[i] >= mu_star {
                    continue;
                }
                let f = &state.arms[i];
                let accept = match kind {
                    PolicyKind::TsSpef { kind, clip } => {
                        let v = sample_spef_conjugate(*kind, f, *clip, rng)?;
                        diag[i] = v;
                        v >= mu_star
                    }
                    PolicyKind::TsGaussian { alpha } => {
                        if gaussian_check(mu_star - means[i], f.variance().sqrt(), f.len()) {
                            true
                        } else {
                            let v = sample_gaussian_ig(means[i], f.variance(), f.len(), *alpha, rng)?;
                            diag[i] = v;
                            v >= mu_star
                        }
                    }
                    PolicyKind::Npts { upper } => {
                        let v = sample_npts_bounded(f, *upper, rng);
                        diag[i] = v;
                        v >= mu_star
                    }
                    PolicyKind::HNpts { moment } => !moment.contains(f) || hnpts_draw(f, mu_star, moment, rng),
                    _ => unreachable!("handled above"),
                };
                if accept {
                    candidates.push(i);
                }
            }
            candidates.sort_unstable();
            let chosen = uniform_pick(&candidates, rng);
            Ok(SamplingDecision { chosen, candidates, probabilities: None, diagnostics: diag })
        }
    }
}
