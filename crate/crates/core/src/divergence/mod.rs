//! Minimal-divergence functionals `kinf(F, mu)` and their duals.

mod bounded;
mod gaussian;
pub(crate) mod golden;
mod hmoment;
mod spef;

pub use bounded::{bounded_gap_lower, kinf_bounded};
pub use gaussian::{d_pi_gaussian, kinf_gaussian, kinf_gaussian_params, GaussianD};
pub use hmoment::{constraint_min, hmoment_upper, kinf_hmoment, lambda_star, Slack};
pub use spef::{kl_full, kl_spef, SpefKind};

use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};
use crate::moment::MomentSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub golden: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { golden: 1e-10, max_iter: 200 }
    }
}

/// Optimizer of a dual problem. One-dimensional duals leave `lambda2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualPoint {
    pub lambda1: f64,
    pub lambda2: f64,
    pub value: f64,
    pub feasible: bool,
    /// The empirical law satisfies the family's moment condition.
    pub in_family: bool,
    /// No law of the family reaches this threshold; `value` is `+inf`.
    pub beyond_range: bool,
}

impl DualPoint {
    pub(crate) fn zero() -> Self {
        Self { lambda1: 0.0, lambda2: 0.0, value: 0.0, feasible: true, in_family: true, beyond_range: false }
    }

    pub(crate) fn infinite(l1: f64, l2: f64) -> Self {
        Self { lambda1: l1, lambda2: l2, value: f64::INFINITY, feasible: false, in_family: true, beyond_range: false }
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    Spef(SpefKind),
    Bounded { upper: f64 },
    /// Gaussian with unknown variance, including the sample-size indicator.
    Gaussian,
    HMoment(MomentSpec),
    /// Squared gap `(mu - m)^2 / (2 scale)`.
    Maillard { scale: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Spef(SpefKind::Bernoulli) => "kl-bernoulli",
            Family::Spef(SpefKind::Poisson) => "kl-poisson",
            Family::Spef(SpefKind::GaussianKnownVar { .. }) => "kl-gaussian",
            Family::Bounded { .. } => "bounded",
            Family::Gaussian => "gaussian",
            Family::HMoment(_) => "hmoment",
            Family::Maillard { .. } => "maillard",
        }
    }
}

/// A divergence `D(F, mu)` together with solver tolerances.
#[derive(Clone, Debug)]
pub struct DivergenceSpec {
    pub family: Family,
    pub tol: Tolerance,
}

impl DivergenceSpec {
    pub fn new(family: Family) -> Self {
        Self { family, tol: Tolerance::default() }
    }

    pub fn evaluate(&self, f: &EmpiricalDistribution, mu: f64) -> Result<f64> {
        if f.is_empty() {
            return Err(Error::Domain("divergence of an empty sample".into()));
        }
        match &self.family {
            Family::Spef(kind) => kl_spef(*kind, f.mean(), mu),
            Family::Bounded { upper } => Ok(kinf_bounded(f, mu, *upper, self.tol)?.value),
            Family::Gaussian => Ok(d_pi_gaussian(f, mu).value),
            Family::HMoment(spec) => Ok(kinf_hmoment(f, mu, spec, self.tol)?.value),
            Family::Maillard { scale } => {
                let gap = (mu - f.mean()).max(0.0);
                Ok(gap * gap / (2.0 * scale))
            }
        }
    }
}
