//! Bandit episodes, replications and regret references.

use rayon::prelude::*;

use crate::arm::ArmModel;
use crate::divergence::{kinf_bounded, kinf_gaussian_params, kl_full, lambda_star, Family, Slack, Tolerance};
use crate::error::{Error, Result};
use crate::policies::{policy_step, PolicyConfig, PolicyState};
use crate::rng::{Purpose, RngStream, StreamId};

#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub arms: Vec<ArmModel>,
}

impl Environment {
    pub fn new(arms: Vec<ArmModel>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::Config("environment has no arms".into()));
        }
        for a in &arms {
            a.validate()?;
        }
        Ok(Self { arms })
    }

    pub fn mu_star(&self) -> f64 {
        self.arms.iter().map(|a| a.mean()).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn gaps(&self) -> Vec<f64> {
        let m = self.mu_star();
        self.arms.iter().map(|a| m - a.mean()).collect()
    }

    /// Lowest index among the optimal arms.
    pub fn best_arm(&self) -> usize {
        let g = self.gaps();
        g.iter().position(|&x| x == 0.0).expect("some arm is optimal")
    }
}

/// `{ceil(1.5^j)} ∪ {10^k} ∪ {horizon}`, restricted to `[1, horizon]`.
pub fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = 1.0f64;
    while x.ceil() <= horizon as f64 {
        out.push(x.ceil() as u64);
        x *= 1.5;
    }
    let mut d = 10u64;
    while d <= horizon {
        out.push(d);
        d = d.saturating_mul(10);
    }
    out.push(horizon);
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegretTrace {
    pub checkpoints: Vec<u64>,
    /// Pseudo-regret `sum_k gap_k N_k(t)`.
    pub regret: Vec<f64>,
    /// `N_k(t)` at each checkpoint.
    pub pulls: Vec<Vec<u64>>,
}

impl RegretTrace {
    pub fn final_pulls(&self) -> &[u64] {
        self.pulls.last().map(|p| p.as_slice()).unwrap_or(&[])
    }
}

/// Runs one episode. Rewards of arm `k` come from the stream
/// `(replication, Reward(k))`, so the j-th pull of an arm yields the same
/// reward under every policy.
pub fn run_episode(
    env: &Environment,
    policy: &PolicyConfig,
    horizon: u64,
    seed: u64,
    replication: u64,
) -> Result<RegretTrace> {
    policy.kind.check_env(&env.arms)?;
    let k = env.arms.len();
    let gaps = env.gaps();
    let grid = checkpoints(horizon);
    let mut reward_rngs: Vec<RngStream> = (0..k)
        .map(|i| RngStream::new(seed, StreamId::new(replication, 0, Purpose::Reward(i as u32))))
        .collect();
    let mut rng = RngStream::new(seed, StreamId::new(replication, 0, Purpose::Policy));
    let mut state = PolicyState::new(k);
    let mut counts = vec![0u64; k];
    let mut regret = 0.0;
    let mut trace = RegretTrace { checkpoints: grid.clone(), regret: Vec::with_capacity(grid.len()), pulls: Vec::new() };
    let mut next = 0;
    for t in 1..=horizon {
        let d = policy_step(policy, &state, &mut rng)?;
        let arm = d.chosen;
        let x = env.arms[arm].draw(&mut reward_rngs[arm]);
        state.observe(arm, x)?;
        counts[arm] += 1;
        regret += gaps[arm];
        while next < grid.len() && grid[next] == t {
            trace.regret.push(regret);
            trace.pulls.push(counts.clone());
            next += 1;
        }
    }
    Ok(trace)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub policy: String,
    pub checkpoints: Vec<u64>,
    pub regret_mean: Vec<f64>,
    pub regret_stderr: Vec<f64>,
    /// Mean `N_k(t)` per checkpoint and arm.
    pub pulls_mean: Vec<Vec<f64>>,
    pub final_regret: Vec<f64>,
    pub final_pulls: Vec<Vec<u64>>,
}

impl Aggregate {
    pub fn at(&self, t: u64) -> Option<usize> {
        self.checkpoints.iter().position(|&c| c == t)
    }

    /// Fraction of replications whose most-pulled arm is `best`.
    pub fn best_arm_rate(&self, best: usize) -> f64 {
        let hits = self
            .final_pulls
            .iter()
            .filter(|p| (0..p.len()).fold(0, |b, i| if p[i] > p[b] { i } else { b }) == best)
            .count();
        hits as f64 / self.final_pulls.len().max(1) as f64
    }
}

/// Independent replications in parallel, reduced in replication order.
pub fn run_replications(
    env: &Environment,
    policy: &PolicyConfig,
    horizon: u64,
    replications: u64,
    seed: u64,
) -> Result<Aggregate> {
    if replications == 0 || horizon == 0 {
        return Err(Error::Config("horizon and replications must be positive".into()));
    }
    let traces: Vec<RegretTrace> = (0..replications)
        .into_par_iter()
        .map(|r| run_episode(env, policy, horizon, seed, r))
        .collect::<Result<_>>()?;
    let grid = traces[0].checkpoints.clone();
    let k = env.arms.len();
    let r = replications as f64;
    let mut agg = Aggregate {
        policy: policy.name.clone(),
        checkpoints: grid.clone(),
        regret_mean: vec![0.0; grid.len()],
        regret_stderr: vec![0.0; grid.len()],
        pulls_mean: vec![vec![0.0; k]; grid.len()],
        final_regret: traces.iter().map(|t| *t.regret.last().expect("nonempty")).collect(),
        final_pulls: traces.iter().map(|t| t.final_pulls().to_vec()).collect(),
    };
    for j in 0..grid.len() {
        let mean = traces.iter().map(|t| t.regret[j]).sum::<f64>() / r;
        let var = if replications > 1 {
            traces.iter().map(|t| (t.regret[j] - mean).powi(2)).sum::<f64>() / (r - 1.0)
        } else {
            0.0
        };
        agg.regret_mean[j] = mean;
        agg.regret_stderr[j] = (var / r).sqrt();
        for i in 0..k {
            agg.pulls_mean[j][i] = traces.iter().map(|t| t.pulls[j][i] as f64).sum::<f64>() / r;
        }
    }
    Ok(agg)
}

/// Divergence of arm `arm` to the optimal mean within `family`.
pub fn arm_kinf(arm: &ArmModel, mu_star: f64, family: &Family) -> Result<f64> {
    let unsupported = || Err(Error::Config(format!("no reference divergence for {} in family {}", arm.label(), family.name())));
    match family {
        Family::Spef(kind) => Ok(kl_full(*kind, arm.mean(), mu_star)),
        Family::Gaussian => Ok(kinf_gaussian_params(arm.mean(), arm.variance(), mu_star)),
        Family::Bounded { upper } => match arm.atoms() {
            Some(a) => Ok(kinf_bounded(&a, mu_star, *upper, Tolerance::default())?.value),
            None => unsupported(),
        },
        Family::HMoment(spec) => match arm.atoms() {
            Some(a) => Ok(lambda_star(&a, mu_star, spec, Slack::NONE, Tolerance::default())?.value),
            None => unsupported(),
        },
        Family::Maillard { scale } => Ok((mu_star - arm.mean()).powi(2) / (2.0 * scale)),
    }
}

/// `sum_k gap_k log(t) / kinf(F_k, mu*)` over suboptimal arms, per `t`.
pub fn lower_bound_reference(env: &Environment, family: &Family, t_grid: &[u64]) -> Result<Vec<f64>> {
    let mu = env.mu_star();
    let mut coef = 0.0;
    for (arm, gap) in env.arms.iter().zip(env.gaps()) {
        if gap > 0.0 {
            let k = arm_kinf(arm, mu, family)?;
            if !(k > 0.0) {
                return Err(Error::Domain(format!("zero divergence for suboptimal arm {}", arm.label())));
            }
            coef += gap / k;
        }
    }
    Ok(t_grid.iter().map(|&t| coef * (t as f64).ln()).collect())
}
