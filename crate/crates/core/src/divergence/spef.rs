//! Single-parameter exponential families.

use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpefKind {
    Bernoulli,
    Poisson,
    GaussianKnownVar { var: f64 },
}

impl SpefKind {
    pub fn check_mean(&self, mu: f64) -> Result<()> {
        let ok = match self {
            SpefKind::Bernoulli => (0.0..=1.0).contains(&mu),
            SpefKind::Poisson => mu >= 0.0 && mu.is_finite(),
            SpefKind::GaussianKnownVar { var } => mu.is_finite() && *var > 0.0,
        };
        if ok {
            Ok(())
        } else {
            domain(format!("mean {mu} outside the parameter space of {self:?}"))
        }
    }
}

fn xlogy_ratio(p: f64, q: f64) -> f64 {
    // p * ln(p / q) with 0 ln 0 = 0
    if p == 0.0 {
        0.0
    } else if q == 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).ln()
    }
}

/// Two-sided `kl(mu1, mu2)` between family members with these means.
pub fn kl_full(kind: SpefKind, mu1: f64, mu2: f64) -> f64 {
    match kind {
        SpefKind::Bernoulli => xlogy_ratio(mu1, mu2) + xlogy_ratio(1.0 - mu1, 1.0 - mu2),
        SpefKind::Poisson => {
            if mu2 == 0.0 {
                if mu1 == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                xlogy_ratio(mu1, mu2) - mu1 + mu2
            }
        }
        SpefKind::GaussianKnownVar { var } => (mu1 - mu2) * (mu1 - mu2) / (2.0 * var),
    }
}

/// One-sided divergence: `kl(mu1, mu2)` if `mu1 < mu2`, else 0.
pub fn kl_spef(kind: SpefKind, mu1: f64, mu2: f64) -> Result<f64> {
    kind.check_mean(mu1)?;
    kind.check_mean(mu2)?;
    if mu1 >= mu2 {
        return Ok(0.0);
    }
    Ok(kl_full(kind, mu1, mu2).max(0.0))
}
