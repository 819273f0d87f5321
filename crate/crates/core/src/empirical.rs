//! Empirical distributions with an aggregated atom view.

use crate::error::{domain, Result};

/// Read access to a finitely supported law as `(value, weight)` pairs.
///
/// Weights need not be normalized; solvers divide by [`Atoms::total`].
pub trait Atoms {
    fn total(&self) -> f64;
    fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_;

    fn weighted_mean(&self) -> f64 {
        self.atoms().map(|(x, w)| x * w).sum::<f64>() / self.total()
    }
}

/// Observations of one arm.
///
/// Keeps the raw sequence in arrival order plus distinct values with
/// multiplicities in increasing order, so solvers run in
/// O(#distinct values) instead of O(n).
#[derive(Clone, Debug, Default)]
pub struct EmpiricalDistribution {
    obs: Vec<f64>,
    atoms: Vec<(f64, u64)>,
    sum: f64,
    comp: f64,
    welford_mean: f64,
    m2: f64,
}

impl EmpiricalDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_samples(xs: &[f64]) -> Result<Self> {
        let mut d = Self::new();
        for &x in xs {
            d.push(x)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, x: f64) -> Result<()> {
        if !x.is_finite() {
            return domain(format!("non-finite observation {x}"));
        }
        self.obs.push(x);
        match self.atoms.binary_search_by(|(v, _)| v.total_cmp(&x)) {
            Ok(i) => self.atoms[i].1 += 1,
            Err(i) => self.atoms.insert(i, (x, 1)),
        }
        // Neumaier compensated sum
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        let n = self.obs.len() as f64;
        let delta = x - self.welford_mean;
        self.welford_mean += delta / n;
        self.m2 += delta * (x - self.welford_mean);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn observations(&self) -> &[f64] {
        &self.obs
    }

    /// Distinct values in increasing order with their counts.
    pub fn distinct(&self) -> &[(f64, u64)] {
        &self.atoms
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.obs.len());
        for &(v, c) in &self.atoms {
            out.extend(std::iter::repeat_n(v, c as usize));
        }
        out
    }

    /// Arithmetic mean; 0 for an empty sample.
    pub fn mean(&self) -> f64 {
        if self.obs.is_empty() {
            0.0
        } else {
            (self.sum + self.comp) / self.obs.len() as f64
        }
    }

    /// Variance of the empirical law (divides by n).
    pub fn variance(&self) -> f64 {
        if self.obs.is_empty() {
            0.0
        } else {
            (self.m2 / self.obs.len() as f64).max(0.0)
        }
    }

    pub fn min(&self) -> Option<f64> {
        self.atoms.first().map(|a| a.0)
    }

    pub fn max(&self) -> Option<f64> {
        self.atoms.last().map(|a| a.0)
    }

    /// `(1/n) sum f(x_i)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        if self.obs.is_empty() {
            return 0.0;
        }
        self.atoms.iter().map(|&(v, c)| c as f64 * f(v)).sum::<f64>() / self.obs.len() as f64
    }

    /// `(1/n) sum x_i 1(|x_i| <= u)`.
    pub fn truncated_mean(&self, u: f64) -> f64 {
        self.expect(|x| if x.abs() <= u { x } else { 0.0 })
    }

    pub fn shifted(&self, by: f64) -> Self {
        let mut d = Self::new();
        for &x in &self.obs {
            d.push(x - by).expect("shift of finite data is finite");
        }
        d
    }
}

impl Atoms for EmpiricalDistribution {
    fn total(&self) -> f64 {
        self.obs.len() as f64
    }

    fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().map(|&(v, c)| (v, c as f64))
    }
}

/// A finitely supported law given directly by `(value, probability)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedAtoms {
    points: Vec<(f64, f64)>,
    total: f64,
}

impl WeightedAtoms {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return domain("empty support");
        }
        if points.iter().any(|&(x, w)| !x.is_finite() || !(w >= 0.0) || !w.is_finite()) {
            return domain("atoms need finite values and nonnegative weights");
        }
        let total: f64 = points.iter().map(|p| p.1).sum();
        if total <= 0.0 {
            return domain("weights sum to zero");
        }
        Ok(Self { points, total })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

impl Atoms for WeightedAtoms {
    fn total(&self) -> f64 {
        self.total
    }

    fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn aggregates_repeats() {
        let d = EmpiricalDistribution::from_samples(&[1.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(d.distinct(), &[(0.0, 1), (1.0, 3)]);
        assert_eq!(d.mean(), 0.75);
        assert_relative_eq!(d.variance(), 0.1875, epsilon = 1e-15);
    }

    #[test]
    fn rejects_nan() {
        assert!(EmpiricalDistribution::from_samples(&[0.0, f64::NAN]).is_err());
        assert!(EmpiricalDistribution::from_samples(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn truncated_mean_drops_large_values() {
        let d = EmpiricalDistribution::from_samples(&[1.0, 2.0, 100.0]).unwrap();
        assert_relative_eq!(d.truncated_mean(3.0), 1.0);
        assert_relative_eq!(d.truncated_mean(100.0), d.mean());
    }

    proptest! {
        #[test]
        fn mean_matches_average(xs in prop::collection::vec(-1e6f64..1e6, 1..200)) {
            let d = EmpiricalDistribution::from_samples(&xs).unwrap();
            let avg = xs.iter().sum::<f64>() / xs.len() as f64;
            let scale = xs.iter().map(|x| x.abs()).fold(1.0, f64::max);
            prop_assert!((d.mean() - avg).abs() <= 1e-12 * scale);
        }

        #[test]
        fn sorted_view_is_stable(xs in prop::collection::vec(-10f64..10.0, 0..100)) {
            let d = EmpiricalDistribution::from_samples(&xs).unwrap();
            let s1 = d.sorted();
            let s2 = d.sorted();
            prop_assert_eq!(&s1, &s2);
            let mut expect = xs.clone();
            expect.sort_by(f64::total_cmp);
            prop_assert_eq!(s1, expect);
        }
    }
}
