//! Property suites runnable outside the test harness.

use rand::Rng;

use crate::bcp::{exact_dirichlet_exceedance, mc_bcp, BcpEvent};
use crate::divergence::{kinf_bounded, kinf_hmoment, lambda_star, Slack, Tolerance};
use crate::empirical::EmpiricalDistribution;
use crate::moment::{MomentFn, MomentSpec};
use crate::policies::{hnpts_check, softmax};
use crate::rng::{Purpose, RngStream, StreamId};

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

pub const SUITES: [&str; 6] =
    ["closed-values", "check-equivalence", "exact-vs-mc", "shift-identity", "med-normalizer", "bounded-monotone"];

pub fn run_suite(name: &str, instances: usize, seed: u64) -> Option<SuiteResult> {
    let mut rng = RngStream::new(seed, StreamId::new(0, 0, Purpose::Verify(SUITES.iter().position(|s| *s == name)? as u32)));
    let r = &mut rng;
    let (name, passed, total) = match name {
        "closed-values" => ("closed-values", closed_values(), 3),
        "check-equivalence" => ("check-equivalence", (0..instances).filter(|_| check_equivalence_case(r)).count(), instances),
        "exact-vs-mc" => {
            let n = instances.min(20);
            ("exact-vs-mc", (0..n).filter(|i| exact_vs_mc_case(r, seed ^ *i as u64)).count(), n)
        }
        "shift-identity" => ("shift-identity", (0..instances).filter(|_| shift_identity_case(r)).count(), instances),
        "med-normalizer" => ("med-normalizer", (0..instances).filter(|_| normalizer_case(r)).count(), instances),
        "bounded-monotone" => ("bounded-monotone", (0..instances).filter(|_| bounded_monotone_case(r)).count(), instances),
        _ => return None,
    };
    Some(SuiteResult { name, passed, total })
}

fn closed_values() -> usize {
    let t = Tolerance::default();
    let ed = |xs: &[f64]| EmpiricalDistribution::from_samples(xs).expect("finite");
    let sq = MomentSpec::power(2.0, 1.0).expect("valid").with_centered(false);
    let checks = [
        kinf_bounded(&ed(&[0.0]), 0.5, 1.0, t).map(|d| (d.value - 2f64.ln()).abs() <= 1e-6),
        kinf_bounded(&ed(&[0.0, 1.0]), 0.75, 1.0, t).map(|d| (d.value - 0.5 * (4.0f64 / 3.0).ln()).abs() <= 1e-6),
        kinf_hmoment(&ed(&[0.0]), 0.5, &sq, t).map(|d| (d.value - (4.0f64 / 3.0).ln()).abs() <= 1e-3),
    ];
    checks.iter().filter(|c| matches!(c, Ok(true))).count()
}

/// Random h-NPTS instance: weights, data, threshold and moment spec.
pub fn random_check_instance<R: Rng + ?Sized>(rng: &mut R) -> (Vec<f64>, Vec<f64>, f64, MomentSpec) {
    let n = rng.random_range(1..=12);
    let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
    let mut w: Vec<f64> = (0..=n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    let mu_star = rng.random_range(-0.5..1.0);
    let h = if rng.random::<bool>() { MomentFn::Power(2.0) } else { MomentFn::Power(1.5) };
    let bound = rng.random_range(0.3..2.0);
    let centered = rng.random::<f64>() < 0.7;
    let spec = MomentSpec::new(h, bound, centered).expect("valid power spec");
    let spec = spec.with_gamma(rng.random_range(0.0..0.2) * bound).expect("valid gamma");
    (w, xs, mu_star, spec)
}

/// Existence form of the h-NPTS test: search for a bonus atom `x >= mu*`
/// satisfying both constraints, by minimizing the larger violation.
pub fn hnpts_check_by_search(w: &[f64], xs: &[f64], mu_star: f64, spec: &MomentSpec) -> bool {
    let n = xs.len();
    let wb = w[n];
    let c = spec.center(mu_star);
    let mean_part: f64 = w[..n].iter().zip(xs).map(|(a, x)| a * x).sum();
    let mom_part: f64 = w[..n].iter().zip(xs).map(|(a, x)| a * spec.h((x - c).abs())).sum();
    let viol = |x: f64| {
        let v1 = mu_star - (mean_part + wb * x);
        let v2 = mom_part + wb * (spec.h((x - c).abs()) - spec.gamma) - spec.bound;
        v1.max(v2)
    };
    // violation is convex in x; bracket then golden-section to 1e-12
    let mut hi = mu_star + 1.0;
    while viol(hi + 1.0) <= viol(hi) && hi < 1e8 {
        hi = mu_star + 2.0 * (hi - mu_star);
    }
    let hi = hi + 1.0;
    let (mut a, mut b) = (mu_star, hi);
    let g = 0.618_033_988_749_894_8;
    for _ in 0..400 {
        if b - a < 1e-12 {
            break;
        }
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if viol(x1) <= viol(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let best = viol(0.5 * (a + b)).min(viol(mu_star));
    best <= 1e-12
}

fn check_equivalence_case<R: Rng + ?Sized>(rng: &mut R) -> bool {
    let (w, xs, mu, spec) = random_check_instance(rng);
    hnpts_check(&w, &xs, mu, &spec).map(|a| a == hnpts_check_by_search(&w, &xs, mu, &spec)).unwrap_or(false)
}

fn exact_vs_mc_case<R: Rng + ?Sized>(rng: &mut R, seed: u64) -> bool {
    let k = rng.random_range(2..=8);
    let xs: Vec<f64> = (0..k).map(|i| i as f64 / k as f64 + rng.random_range(0.0..0.9) / k as f64).collect();
    let mu = rng.random_range(xs[0]..xs[k - 1]);
    let p = match exact_dirichlet_exceedance(&xs, mu) {
        Ok(p) => p,
        Err(_) => return false,
    };
    let m = 200_000;
    let f = EmpiricalDistribution::from_samples(&xs).expect("finite");
    match mc_bcp(&f, mu, &BcpEvent::Mean, m, seed) {
        Ok(e) => (e.p_hat - p).abs() <= 4.0 * (p * (1.0 - p) / m as f64).sqrt() + 1e-12,
        Err(_) => false,
    }
}

fn shift_identity_case<R: Rng + ?Sized>(rng: &mut R) -> bool {
    let n = rng.random_range(1..10);
    let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-0.7..0.7)).collect();
    let mu = rng.random_range(0.0..0.8);
    let f = EmpiricalDistribution::from_samples(&xs).expect("finite");
    let spec = MomentSpec::power(2.0, 1.0).expect("valid");
    let t = Tolerance::default();
    let a = lambda_star(&f, mu, &spec, Slack::NONE, t);
    let b = lambda_star(&f.shifted(mu), 0.0, &spec.clone().with_centered(false), Slack::NONE, t);
    match (a, b) {
        (Ok(a), Ok(b)) => (a.value - b.value).abs() <= 1e-9 * (1.0 + a.value.abs()),
        _ => false,
    }
}

fn normalizer_case<R: Rng + ?Sized>(rng: &mut R) -> bool {
    let k = rng.random_range(1..10);
    let mut logw: Vec<f64> = (0..k).map(|_| -rng.random_range(0.0..1e4)).collect();
    logw.push(0.0);
    let (p, z) = softmax(&logw);
    (1.0..=logw.len() as f64).contains(&z) && (p.iter().sum::<f64>() - 1.0).abs() < 1e-12
}

fn bounded_monotone_case<R: Rng + ?Sized>(rng: &mut R) -> bool {
    let n = rng.random_range(1..30);
    let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let f = EmpiricalDistribution::from_samples(&xs).expect("finite");
    let m = f.mean();
    let (u1, u2) = (rng.random::<f64>(), rng.random::<f64>());
    let mu1 = m + (1.0 - m) * 0.95 * u1.min(u2);
    let mu2 = m + (1.0 - m) * 0.95 * u1.max(u2);
    let t = Tolerance::default();
    match (kinf_bounded(&f, mu1, 1.0, t), kinf_bounded(&f, mu2, 1.0, t)) {
        (Ok(a), Ok(b)) => b.value >= a.value - 1e-9,
        _ => false,
    }
}
