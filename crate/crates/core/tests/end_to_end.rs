use medbandits::bcp::exact_dirichlet_exceedance;
use medbandits::divergence::{DivergenceSpec, Family, SpefKind};
use medbandits::policies::{sample_npts_bounded, ASchedule, PolicyConfig, PolicyKind};
use medbandits::sim::{run_replications, Environment};
use medbandits::{ArmModel, EmpiricalDistribution, Purpose, RngStream, StreamId};

fn bern_env() -> Environment {
    Environment::new(vec![ArmModel::Bernoulli { p: 0.7 }, ArmModel::Bernoulli { p: 0.3 }]).unwrap()
}

#[test]
fn med_prefers_best_arm_and_is_reproducible() {
    let family = Family::Spef(SpefKind::Bernoulli);
    let policy = PolicyConfig::new(PolicyKind::Med {
        schedule: ASchedule::default_for(&family),
        divergence: DivergenceSpec::new(family),
    });
    let env = bern_env();
    let a = run_replications(&env, &policy, 2000, 8, 42).unwrap();
    let b = run_replications(&env, &policy, 2000, 8, 42).unwrap();
    assert_eq!(a, b);
    assert!(a.best_arm_rate(0) == 1.0);
    let last = a.pulls_mean.last().unwrap();
    assert!(last[1] < 0.1 * last[0], "{last:?}");
}

#[test]
fn regret_of_uniform_is_half_the_gap() {
    let u = run_replications(&bern_env(), &PolicyConfig::new(PolicyKind::Uniform), 4000, 10, 1).unwrap();
    let r = *u.regret_mean.last().unwrap();
    assert!((r - 0.4 * 2000.0).abs() < 0.4 * 150.0, "{r}");
}

#[test]
fn npts_bonus_atom_on_two_point_sample() {
    // atoms (0, 1, B = 1): the weight on 0 is Beta(1, 2), so P(mean >= 0.25) = 1 - 0.25^2
    let f = EmpiricalDistribution::from_samples(&[0.0, 1.0]).unwrap();
    let p = exact_dirichlet_exceedance(&[0.0, 0.5, 1.0], 0.25).unwrap();
    assert!((p - 0.875).abs() < 1e-12);
    let mut rng = RngStream::new(3, StreamId::new(0, 0, Purpose::Other(1)));
    let m = 200_000;
    let hits = (0..m).filter(|_| sample_npts_bounded(&f, 1.0, &mut rng) >= 0.25).count();
    let want = 1.0 - 0.25f64.powi(2);
    assert!((hits as f64 / m as f64 - want).abs() < 4.0 * (want * (1.0 - want) / m as f64).sqrt());
}
