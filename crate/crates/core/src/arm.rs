//! Reward distributions of the arms.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::empirical::WeightedAtoms;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ArmModel {
    Bernoulli { p: f64 },
    GaussianKnownVar { mean: f64, var: f64 },
    Gaussian { mean: f64, var: f64 },
    Poisson { rate: f64 },
    BoundedDiscrete { support: Vec<f64>, probs: Vec<f64> },
    /// Pareto with tail index `shape`, shifted so that its mean is `mean`.
    HeavyTail { mean: f64, shape: f64, scale: f64 },
}

fn cfg<T>(msg: String) -> Result<T> {
    Err(Error::Config(msg))
}

impl ArmModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            ArmModel::Bernoulli { p } if !(0.0..=1.0).contains(p) => cfg(format!("Bernoulli p = {p} outside [0, 1]")),
            ArmModel::GaussianKnownVar { mean, var } | ArmModel::Gaussian { mean, var }
                if !mean.is_finite() || !(*var > 0.0) || !var.is_finite() =>
            {
                cfg(format!("Gaussian arm needs finite mean and positive variance, got ({mean}, {var})"))
            }
            ArmModel::Poisson { rate } if !(*rate > 0.0) || !rate.is_finite() => {
                cfg(format!("Poisson rate must be positive, got {rate}"))
            }
            ArmModel::BoundedDiscrete { support, probs } => {
                if support.is_empty() || support.len() != probs.len() {
                    return cfg("discrete arm needs matching nonempty support and probabilities".into());
                }
                if support.iter().any(|x| !x.is_finite()) || probs.iter().any(|p| !(*p >= 0.0)) {
                    return cfg("discrete arm has invalid atoms".into());
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return cfg(format!("discrete probabilities sum to {total}"));
                }
                Ok(())
            }
            ArmModel::HeavyTail { mean, shape, scale } if !mean.is_finite() || !(*shape > 2.0) || !(*scale > 0.0) => {
                cfg(format!("heavy-tail arm needs shape > 2 and scale > 0, got ({shape}, {scale})"))
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ArmModel::Bernoulli { p } => *p,
            ArmModel::GaussianKnownVar { mean, .. } | ArmModel::Gaussian { mean, .. } => *mean,
            ArmModel::Poisson { rate } => *rate,
            ArmModel::BoundedDiscrete { support, probs } => support.iter().zip(probs).map(|(x, p)| x * p).sum(),
            ArmModel::HeavyTail { mean, .. } => *mean,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            ArmModel::Bernoulli { p } => p * (1.0 - p),
            ArmModel::GaussianKnownVar { var, .. } | ArmModel::Gaussian { var, .. } => *var,
            ArmModel::Poisson { rate } => *rate,
            ArmModel::BoundedDiscrete { support, probs } => {
                let m = self.mean();
                support.iter().zip(probs).map(|(x, p)| p * (x - m) * (x - m)).sum()
            }
            ArmModel::HeavyTail { shape, scale, .. } => {
                scale * scale * shape / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0))
            }
        }
    }

    /// Largest value in the support, if bounded above.
    pub fn upper(&self) -> Option<f64> {
        match self {
            ArmModel::Bernoulli { .. } => Some(1.0),
            ArmModel::BoundedDiscrete { support, .. } => support.iter().copied().reduce(f64::max),
            _ => None,
        }
    }

    /// Smallest value in the support, if bounded below.
    pub fn lower(&self) -> Option<f64> {
        match self {
            ArmModel::Bernoulli { .. } | ArmModel::Poisson { .. } => Some(0.0),
            ArmModel::BoundedDiscrete { support, .. } => support.iter().copied().reduce(f64::min),
            ArmModel::HeavyTail { mean, shape, scale } => Some(mean - scale / (shape - 1.0)),
            _ => None,
        }
    }

    /// The law as weighted atoms when it is finitely supported.
    pub fn atoms(&self) -> Option<WeightedAtoms> {
        match self {
            ArmModel::Bernoulli { p } => WeightedAtoms::new(vec![(0.0, 1.0 - p), (1.0, *p)]).ok(),
            ArmModel::BoundedDiscrete { support, probs } => {
                WeightedAtoms::new(support.iter().copied().zip(probs.iter().copied()).collect()).ok()
            }
            _ => None,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ArmModel::Bernoulli { p } => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            ArmModel::GaussianKnownVar { mean, var } | ArmModel::Gaussian { mean, var } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + var.sqrt() * z
            }
            ArmModel::Poisson { rate } => Poisson::new(*rate).expect("validated rate").sample(rng),
            ArmModel::BoundedDiscrete { support, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (x, p) in support.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *x;
                    }
                }
                *support.last().expect("validated support")
            }
            ArmModel::HeavyTail { mean, shape, scale } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                let shift = mean - scale * shape / (shape - 1.0);
                shift + scale * u.powf(-1.0 / shape)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            ArmModel::Bernoulli { p } => format!("bernoulli({p})"),
            ArmModel::GaussianKnownVar { mean, var } => format!("gaussian-known-var({mean},{var})"),
            ArmModel::Gaussian { mean, var } => format!("gaussian({mean},{var})"),
            ArmModel::Poisson { rate } => format!("poisson({rate})"),
            ArmModel::BoundedDiscrete { support, probs } => format!("discrete({support:?},{probs:?})"),
            ArmModel::HeavyTail { mean, shape, scale } => format!("pareto({mean},{shape},{scale})"),
        }
    }
}
