//! Moment functions `h` and the families they define.

use std::fmt;
use std::sync::Arc;

use crate::empirical::EmpiricalDistribution;
use crate::error::{Error, Result};

/// A user-supplied convex moment function with its derivative.
#[derive(Clone)]
pub struct CustomMoment {
    pub name: String,
    pub h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub dh: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomMoment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomMoment({})", self.name)
    }
}

#[derive(Clone, Debug)]
pub enum MomentFn {
    /// `h(x) = x^p`, `p > 1`.
    Power(f64),
    /// `h(x) = exp(x^2 / s) - 1`.
    SubGaussian(f64),
    Custom(CustomMoment),
}

impl MomentFn {
    pub fn h(&self, x: f64) -> f64 {
        match self {
            MomentFn::Power(p) => x.powf(*p),
            MomentFn::SubGaussian(s) => (x * x / s).exp_m1(),
            MomentFn::Custom(c) => (c.h)(x),
        }
    }

    pub fn dh(&self, x: f64) -> f64 {
        match self {
            MomentFn::Power(p) => p * x.powf(p - 1.0),
            MomentFn::SubGaussian(s) => 2.0 * x / s * (x * x / s).exp(),
            MomentFn::Custom(c) => (c.dh)(x),
        }
    }

    /// Inverse of `h` on `[0, inf)`.
    pub fn inv(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match self {
            MomentFn::Power(p) => y.powf(1.0 / p),
            MomentFn::SubGaussian(s) => (s * y.ln_1p()).sqrt(),
            MomentFn::Custom(_) => {
                if y.is_infinite() {
                    return f64::INFINITY;
                }
                let mut hi = 1.0;
                while self.h(hi) < y {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return f64::INFINITY;
                    }
                }
                bisect_increasing(|x| self.h(x), y, 0.0, hi)
            }
        }
    }

    /// Smallest `y >= 0` with `h'(y) >= r`.
    pub fn dh_inv(&self, r: f64) -> f64 {
        if r <= self.dh(0.0) {
            return 0.0;
        }
        match self {
            MomentFn::Power(p) => (r / p).powf(1.0 / (p - 1.0)),
            _ => {
                let mut hi = 1.0;
                while self.dh(hi) < r {
                    hi *= 2.0;
                    if hi > 1e300 || !self.dh(hi).is_finite() {
                        break;
                    }
                }
                bisect_increasing(|x| self.dh(x), r, 0.0, hi)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            MomentFn::Power(p) => format!("power:{p}"),
            MomentFn::SubGaussian(s) => format!("subgauss-s:{s}"),
            MomentFn::Custom(c) => format!("custom:{}", c.name),
        }
    }
}

fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v.is_finite() && v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Moment condition `E h(|X - c|) < B` together with the slack used by h-NPTS.
///
/// `centered` measures dispersion around the mean; otherwise around 0.
/// `mean_floor` is the lower mean bound of the family.
#[derive(Clone, Debug)]
pub struct MomentSpec {
    pub h: MomentFn,
    pub bound: f64,
    pub centered: bool,
    pub tail_exponent: f64,
    pub gamma: f64,
    pub mean_floor: f64,
}

const GRID_POINTS: usize = 256;

impl MomentSpec {
    /// Builds and validates a spec. `gamma` defaults to `0.05 * bound`.
    pub fn new(h: MomentFn, bound: f64, centered: bool) -> Result<Self> {
        let tail_exponent = match &h {
            MomentFn::Power(p) => (p - 1.0) / 2.0,
            _ => 0.5,
        };
        let spec = Self {
            h,
            bound,
            centered,
            tail_exponent,
            gamma: 0.05 * bound,
            mean_floor: f64::NEG_INFINITY,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn power(p: f64, bound: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::Config(format!("power moment needs p > 1, got {p}")));
        }
        Self::new(MomentFn::Power(p), bound, true)
    }

    /// Sub-Gaussian family with variance proxy `sigma^2`:
    /// `E exp((X - mu)^2 / (8 sigma^2)) <= 2`, i.e. `s = 8 sigma^2` and `B = 1`.
    pub fn subgaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
        }
        Self::new(MomentFn::SubGaussian(8.0 * sigma * sigma), 1.0, true)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be finite and >= 0, got {gamma}")));
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_centered(mut self, centered: bool) -> Self {
        self.centered = centered;
        self
    }

    pub fn with_mean_floor(mut self, floor: f64) -> Self {
        self.mean_floor = floor;
        self
    }

    pub fn with_tail_exponent(mut self, eta: f64) -> Result<Self> {
        self.tail_exponent = eta;
        self.validate()?;
        Ok(self)
    }

    pub fn h(&self, x: f64) -> f64 {
        self.h.h(x)
    }

    pub fn h_inv(&self, y: f64) -> f64 {
        self.h.inv(y)
    }

    /// Point around which dispersion is measured when the threshold is `mu`.
    pub fn center(&self, mu: f64) -> f64 {
        if self.centered {
            mu
        } else {
            0.0
        }
    }

    /// `(1/n) sum h(|x_i - c|)` with `c` the sample mean (centered) or 0.
    pub fn empirical_moment(&self, f: &EmpiricalDistribution) -> f64 {
        let c = if self.centered { f.mean() } else { 0.0 };
        f.expect(|x| self.h((x - c).abs()))
    }

    pub fn contains(&self, f: &EmpiricalDistribution) -> bool {
        !f.is_empty() && f.mean() >= self.mean_floor && self.empirical_moment(f) < self.bound
    }

    fn grid(&self) -> Vec<f64> {
        let (lo, hi) = (-3.0f64, 3.0f64);
        (0..GRID_POINTS)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("moment function {}: {m}", self.h.label())));
        if !(self.bound > 0.0) || !self.bound.is_finite() {
            return bad(format!("bound must be positive and finite, got {}", self.bound));
        }
        if self.h(0.0).abs() > 1e-12 {
            return bad("h(0) must be 0".into());
        }
        let grid = self.grid();
        let vals: Vec<f64> = grid.iter().map(|&x| self.h(x)).collect();
        let finite = vals.iter().take_while(|v| v.is_finite()).count();
        if finite < 16 {
            return bad("h overflows on most of the probe grid".into());
        }
        for i in 1..finite {
            if vals[i] < vals[i - 1] {
                return bad(format!("h decreases near x = {}", grid[i]));
            }
        }
        // superlinear tail: h(x) / x^(1+eta) nondecreasing on the upper half
        let eta = self.tail_exponent;
        if !(eta > 0.0) {
            return bad("tail exponent must be positive".into());
        }
        for i in (finite / 2 + 1)..finite {
            let r0 = vals[i - 1] / grid[i - 1].powf(1.0 + eta);
            let r1 = vals[i] / grid[i].powf(1.0 + eta);
            if r1 < r0 * (1.0 - 1e-12) {
                return bad(format!("h is not superlinear with exponent {eta} near x = {}", grid[i]));
            }
        }
        for i in 0..finite {
            let back = self.h_inv(vals[i]);
            if (back - grid[i]).abs() > 1e-9 * grid[i].max(1.0) {
                return bad(format!("h_inv(h({})) = {back}", grid[i]));
            }
        }
        Ok(())
    }
}
