//! Gaussian arms with unknown mean and variance.

use crate::empirical::EmpiricalDistribution;
use crate::error::{domain, Result};

/// `0.5 log(1 + (mu - m)^2 / var)` if `mu >= m`, else 0.
pub fn kinf_gaussian_params(mean: f64, var: f64, mu: f64) -> f64 {
    if mu <= mean {
        return 0.0;
    }
    if var <= 0.0 {
        return f64::INFINITY;
    }
    0.5 * ((mu - mean) * (mu - mean) / var).ln_1p()
}

pub fn kinf_gaussian(f: &EmpiricalDistribution, mu: f64) -> Result<f64> {
    if f.is_empty() {
        return domain("empty sample");
    }
    Ok(kinf_gaussian_params(f.mean(), f.variance(), mu))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianD {
    pub value: f64,
    /// Variance was 0 or fewer than two observations; `value` is 0.
    pub degenerate: bool,
}

/// Gaussian divergence with the indicator `1((mu - m)^2 <= sqrt(n), var <= sqrt(n))`.
pub fn d_pi_gaussian(f: &EmpiricalDistribution, mu: f64) -> GaussianD {
    let n = f.len() as f64;
    let (m, var) = (f.mean(), f.variance());
    if f.len() < 2 || var <= 0.0 {
        return GaussianD { value: 0.0, degenerate: true };
    }
    let on = (mu - m) * (mu - m) <= n.sqrt() && var <= n.sqrt();
    GaussianD { value: if on { kinf_gaussian_params(m, var, mu) } else { 0.0 }, degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_value() {
        assert_abs_diff_eq!(kinf_gaussian_params(0.0, 1.0, 1.0), 0.5 * 2f64.ln(), epsilon = 1e-15);
        assert_eq!(kinf_gaussian_params(1.0, 1.0, 0.5), 0.0);
    }

    #[test]
    fn indicator_switches_off() {
        let xs: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        let f = EmpiricalDistribution::from_samples(&xs).unwrap();
        let d = d_pi_gaussian(&f, 1.0);
        assert_abs_diff_eq!(d.value, 0.5 * 2f64.ln(), epsilon = 1e-12);
        assert_eq!(d_pi_gaussian(&f, 20.0).value, 0.0);
        let c = EmpiricalDistribution::from_samples(&[2.0, 2.0]).unwrap();
        assert!(d_pi_gaussian(&c, 3.0).degenerate);
    }
}
