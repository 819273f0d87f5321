//! Subcommand bodies. Each returns the text to emit; `lib` writes it.

use std::fmt::Write as _;
use std::path::Path;

use medbandits::bcp::{bcp_rate_profile, joint_bound_row, Estimator, RateRow};
use medbandits::divergence::{
    d_pi_gaussian, kinf_bounded, kinf_hmoment, kl_spef, DualPoint, Family, SpefKind, Tolerance,
};
use medbandits::policies::{ASchedule, PolicyKind};
use medbandits::sim::{arm_kinf, lower_bound_reference, run_replications, Environment};
use medbandits::verify::{run_suite, SUITES};
use medbandits::{ArmModel, EmpiricalDistribution, Error};

use crate::config::{parse, ArmCfg, BcpCfg, FamilyCfg, MomentCfg, PolicyCfg, SimulateCfg, TemplateCfg, VerifyCfg};
use crate::output::{csv_field, float, num, provenance};
use crate::{BcpArgs, Emit, Failure, KinfArgs, SimulateArgs, VerifyArgs};

fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Lib(Error::Config(msg.into()))
}

fn read_config<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(parse(&text, &path.display().to_string())?)
}

fn moment_from_flag(h: &str, bound: Option<f64>, centered: bool, mean_floor: Option<f64>) -> Result<MomentCfg, Failure> {
    let (name, arg) = h.split_once(':').ok_or_else(|| config_err(format!("--h `{h}` needs `power:P` or `subgauss:SIGMA`")))?;
    let v: f64 = arg.parse().map_err(|_| config_err(format!("--h `{h}`: bad number")))?;
    let mut m = MomentCfg { h: name.to_string(), bound, centered: Some(centered), mean_floor, ..Default::default() };
    match name {
        "power" => m.p = Some(v),
        "subgauss" => m.sigma = Some(v),
        other => return Err(config_err(format!("unknown moment function `{other}`"))),
    }
    Ok(m)
}

fn dual_lines(s: &mut String, d: &DualPoint) {
    let _ = writeln!(s, "value: {:.6}", d.value);
    let _ = writeln!(s, "lambda1: {:.6}", d.lambda1);
    let _ = writeln!(s, "lambda2: {:.6}", d.lambda2);
    let _ = writeln!(s, "feasible: {}", d.feasible);
    let _ = writeln!(s, "in_family: {}", d.in_family);
    let _ = writeln!(s, "beyond_range: {}", d.beyond_range);
}

pub fn kinf(a: &KinfArgs) -> Result<Emit, Failure> {
    let moment = match &a.h {
        Some(h) => Some(moment_from_flag(h, a.bound, !a.uncentered, a.mean_floor)?),
        None if a.bound.is_some() || a.uncentered || a.mean_floor.is_some() => {
            return Err(config_err("--bound, --uncentered and --mean-floor need --h"))
        }
        None => None,
    };
    let fam = FamilyCfg { family: a.family.clone(), var: a.var, upper: a.upper, scale: a.scale, moment }.resolve()?;
    let mut s = String::new();
    let _ = writeln!(s, "family: {}", fam.name());
    let _ = writeln!(s, "mu: {:.6}", a.mu);
    match (&a.data, &a.arm) {
        (Some(data), None) => {
            let xs: Vec<f64> = data
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| config_err(format!("--data: bad number `{t}`"))))
                .collect::<Result<_, _>>()?;
            let f = EmpiricalDistribution::from_samples(&xs)?;
            let _ = writeln!(s, "n: {}", f.len());
            let tol = Tolerance::default();
            match &fam {
                Family::Bounded { upper } => dual_lines(&mut s, &kinf_bounded(&f, a.mu, *upper, tol)?),
                Family::HMoment(spec) => dual_lines(&mut s, &kinf_hmoment(&f, a.mu, spec, tol)?),
                Family::Spef(kind) => {
                    let _ = writeln!(s, "value: {:.6}", kl_spef(*kind, f.mean(), a.mu)?);
                }
                Family::Gaussian => {
                    let d = d_pi_gaussian(&f, a.mu);
                    let _ = writeln!(s, "value: {:.6}", d.value);
                    let _ = writeln!(s, "degenerate: {}", d.degenerate);
                }
                Family::Maillard { scale } => {
                    let gap = (a.mu - f.mean()).max(0.0);
                    let _ = writeln!(s, "value: {:.6}", gap * gap / (2.0 * scale));
                }
            }
        }
        (None, Some(arm)) => {
            let arm = ArmCfg::parse_inline(arm)?.resolve()?;
            let _ = writeln!(s, "arm: {}", arm.label());
            let _ = writeln!(s, "value: {:.6}", arm_kinf(&arm, a.mu, &fam)?);
        }
        _ => return Err(config_err("kinf needs exactly one of --data or --arm")),
    }
    Ok(Emit::new(s, None))
}

fn bcp_csv(rows: &[RateRow]) -> String {
    let mut s = String::from("n,m,p_hat,ci_low,ci_high,rate,bound_upper,bound_lower,lambda_star\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.m,
            float(r.p_hat),
            float(r.ci.0),
            float(r.ci.1),
            num(r.rate),
            float(r.bound_upper),
            num(r.bound_lower),
            float(r.lambda_star)
        );
    }
    s
}

pub fn bcp(a: &BcpArgs) -> Result<Emit, Failure> {
    let mut cfg: BcpCfg = read_config(&a.config)?;
    if a.seed.is_some() {
        cfg.seed = a.seed;
    }
    if a.m.is_some() {
        cfg.m = a.m;
    }
    let seed = *cfg.seed.get_or_insert(0);
    let m = *cfg.m.get_or_insert(100_000);
    let mu_star = cfg.mu_star.ok_or_else(|| config_err("bcp: missing `mu_star`"))?;
    let n_list = cfg.n.get_or_insert_with(|| vec![50, 100, 200, 400]).clone();
    let event = cfg.event.get_or_insert_with(|| "bonus".into()).clone();
    if cfg.estimator.is_none() {
        cfg.estimator = Some(if event == "bonus" { "conditional" } else { "hit-count" }.into());
    }
    let estimator = cfg.estimator()?;
    let template = cfg.template.get_or_insert_with(|| TemplateCfg { kind: "dirac".into(), value: Some(0.0), ..Default::default() }).resolve()?;
    let spec = cfg.moment.as_ref().ok_or_else(|| config_err("bcp: missing `moment`"))?.resolve()?;
    if m == 0 {
        return Err(config_err("bcp: `m` must be positive"));
    }
    let rows = match event.as_str() {
        "bonus" => bcp_rate_profile(&template, mu_star, &spec, &n_list, m, seed, estimator)?,
        "joint" => {
            if estimator != Estimator::HitCount {
                return Err(config_err("bcp: the joint event only supports the hit-count estimator"));
            }
            n_list
                .iter()
                .enumerate()
                .map(|(i, &n)| joint_bound_row(&template.build(n)?, mu_star, &spec, m, seed.wrapping_add(i as u64)))
                .collect::<Result<Vec<_>, _>>()?
        }
        other => return Err(config_err(format!("bcp: unknown event `{other}`"))),
    };
    let mut text = provenance("bcp", seed, &cfg);
    text.push_str(&bcp_csv(&rows));
    Ok(Emit::new(text, a.out.clone()))
}

/// SPEF reference family when every arm shares one.
fn infer_reference(arms: &[ArmModel]) -> Option<FamilyCfg> {
    let fam = |name: &str| FamilyCfg { family: name.into(), ..Default::default() };
    let first = arms.first()?;
    let all = |pred: &dyn Fn(&ArmModel) -> bool| arms.iter().all(pred);
    match first {
        ArmModel::Bernoulli { .. } if all(&|a| matches!(a, ArmModel::Bernoulli { .. })) => Some(fam("kl-bernoulli")),
        ArmModel::Poisson { .. } if all(&|a| matches!(a, ArmModel::Poisson { .. })) => Some(fam("kl-poisson")),
        ArmModel::GaussianKnownVar { var, .. }
            if all(&|a| matches!(a, ArmModel::GaussianKnownVar { var: v, .. } if v == var)) =>
        {
            Some(FamilyCfg { var: Some(*var), ..fam("kl-gaussian") })
        }
        ArmModel::Gaussian { .. } if all(&|a| matches!(a, ArmModel::Gaussian { .. })) => Some(fam("gaussian")),
        _ => None,
    }
}

/// Echoes the defaults a policy resolved to.
fn filled_policy(p: &PolicyCfg) -> Result<PolicyCfg, Failure> {
    let r = p.resolve()?;
    let mut out = p.clone();
    out.name = Some(r.name.clone());
    out.estimator.get_or_insert_with(|| "empirical".into());
    match &r.kind {
        PolicyKind::Med { schedule, .. } => {
            out.a = Some(match schedule {
                ASchedule::Zero => 0.0,
                ASchedule::Inverse(c) => *c,
            })
        }
        PolicyKind::TsSpef { kind, clip } => {
            out.family = Some(
                match kind {
                    SpefKind::Bernoulli => "bernoulli",
                    SpefKind::Poisson => "poisson",
                    SpefKind::GaussianKnownVar { var } => {
                        out.var = Some(*var);
                        "gaussian"
                    }
                }
                .into(),
            );
            out.clip = Some([clip.0, clip.1]);
        }
        PolicyKind::TsGaussian { alpha } => out.alpha = Some(*alpha),
        _ => {}
    }
    Ok(out)
}

pub fn simulate(a: &SimulateArgs) -> Result<Emit, Failure> {
    let mut cfg: SimulateCfg = match &a.config {
        Some(p) => read_config(p)?,
        None => SimulateCfg::default(),
    };
    if !a.arms.is_empty() {
        if !cfg.arms.is_empty() {
            return Err(config_err("arms given both inline (--arm) and in the config file"));
        }
        cfg.arms = a.arms.iter().map(|s| ArmCfg::parse_inline(s)).collect::<Result<_, _>>()?;
    }
    if a.seed.is_some() {
        cfg.seed = a.seed;
    }
    if a.horizon.is_some() {
        cfg.horizon = a.horizon;
    }
    if a.replications.is_some() {
        cfg.replications = a.replications;
    }
    let seed = *cfg.seed.get_or_insert(0);
    let horizon = *cfg.horizon.get_or_insert(10_000);
    let reps = *cfg.replications.get_or_insert(100);
    if cfg.arms.is_empty() {
        return Err(config_err("simulate: no arms"));
    }
    if cfg.policies.is_empty() {
        return Err(config_err("simulate: no policies"));
    }
    let arms: Vec<ArmModel> = cfg.arms.iter().map(|c| c.resolve()).collect::<Result<_, _>>()?;
    let env = Environment::new(arms)?;
    if cfg.reference.is_none() {
        cfg.reference = infer_reference(&env.arms);
    }
    let reference = cfg.reference.as_ref().map(|r| r.resolve()).transpose()?;
    cfg.policies = cfg.policies.iter().map(filled_policy).collect::<Result<_, _>>()?;
    let policies = cfg.policies.iter().map(|p| p.resolve()).collect::<Result<Vec<_>, _>>()?;

    let mut text = provenance("simulate", seed, &cfg);
    text.push_str("policy,t,regret_mean,regret_stderr");
    for k in 0..env.arms.len() {
        let _ = write!(text, ",n_arm{k}");
    }
    text.push_str(",lower_bound\n");
    for p in &policies {
        let agg = run_replications(&env, p, horizon, reps, seed)?;
        let lb = match &reference {
            Some(f) => Some(lower_bound_reference(&env, f, &agg.checkpoints)?),
            None => None,
        };
        let name = csv_field(&agg.policy);
        for (j, t) in agg.checkpoints.iter().enumerate() {
            let _ = write!(text, "{name},{t},{},{}", float(agg.regret_mean[j]), float(agg.regret_stderr[j]));
            for n in &agg.pulls_mean[j] {
                let _ = write!(text, ",{}", float(*n));
            }
            let _ = writeln!(text, ",{}", num(lb.as_ref().map(|l| l[j])));
        }
    }
    Ok(Emit::new(text, a.out.clone()))
}

pub fn verify(a: &VerifyArgs) -> Result<Emit, Failure> {
    let mut cfg: VerifyCfg = match &a.config {
        Some(p) => read_config(p)?,
        None => VerifyCfg::default(),
    };
    if let Some(s) = &a.suite {
        cfg.suites = Some(if s == "all" { SUITES.iter().map(|s| s.to_string()).collect() } else { vec![s.clone()] });
    }
    if a.instances.is_some() {
        cfg.instances = a.instances;
    }
    if a.seed.is_some() {
        cfg.seed = a.seed;
    }
    let seed = *cfg.seed.get_or_insert(0);
    let instances = *cfg.instances.get_or_insert(1000);
    let suites = cfg.suites.get_or_insert_with(|| SUITES.iter().map(|s| s.to_string()).collect()).clone();
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(config_err(format!("unknown suite `{bad}` (known: {})", SUITES.join(", "))));
    }
    let mut text = provenance("verify", seed, &cfg);
    let _ = writeln!(text, "{:<20} {:>8} {:>8}  status", "suite", "passed", "total");
    let mut failed = Vec::new();
    for name in &suites {
        let r = run_suite(name, instances, seed).expect("suite name checked");
        let status = if r.ok() { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{:<20} {:>8} {:>8}  {status}", r.name, r.passed, r.total);
        if !r.ok() {
            failed.push(r.name.to_string());
        }
    }
    let mut e = Emit::new(text, a.out.clone());
    e.failed = failed;
    Ok(e)
}
