//! TOML configuration schema and its translation into library types.
//!
//! Every table rejects unknown keys. Per-kind fields are optional in the
//! schema and checked against the kind when resolving.

use serde::{Deserialize, Serialize};

use medbandits::bcp::{Estimator, Template};
use medbandits::divergence::{DivergenceSpec, Family, SpefKind};
use medbandits::policies::{ASchedule, MeanEstimator, PolicyConfig, PolicyKind};
use medbandits::{ArmModel, Error, MomentSpec, Result};

fn cfg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

/// Errors unless exactly the fields in `allowed` among `present` are set.
fn only(ctx: &str, present: &[(&str, bool)], allowed: &[&str]) -> Result<()> {
    for (name, set) in present {
        if *set && !allowed.contains(name) {
            return cfg_err(format!("{ctx}: field `{name}` does not apply"));
        }
    }
    Ok(())
}

fn need<T: Copy>(ctx: &str, name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("{ctx}: missing field `{name}`")))
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ArmCfg {
    pub kind: String,
    pub p: Option<f64>,
    pub mean: Option<f64>,
    pub var: Option<f64>,
    pub rate: Option<f64>,
    pub support: Option<Vec<f64>>,
    pub probs: Option<Vec<f64>>,
    pub shape: Option<f64>,
    pub scale: Option<f64>,
}

impl ArmCfg {
    pub fn resolve(&self) -> Result<ArmModel> {
        let ctx = format!("arm `{}`", self.kind);
        let present = [
            ("p", self.p.is_some()),
            ("mean", self.mean.is_some()),
            ("var", self.var.is_some()),
            ("rate", self.rate.is_some()),
            ("support", self.support.is_some()),
            ("probs", self.probs.is_some()),
            ("shape", self.shape.is_some()),
            ("scale", self.scale.is_some()),
        ];
        let arm = match self.kind.as_str() {
            "bernoulli" => {
                only(&ctx, &present, &["p"])?;
                ArmModel::Bernoulli { p: need(&ctx, "p", self.p)? }
            }
            "gaussian" | "gaussian-known-var" => {
                only(&ctx, &present, &["mean", "var"])?;
                let (mean, var) = (need(&ctx, "mean", self.mean)?, self.var.unwrap_or(1.0));
                if self.kind == "gaussian" {
                    ArmModel::Gaussian { mean, var }
                } else {
                    ArmModel::GaussianKnownVar { mean, var }
                }
            }
            "poisson" => {
                only(&ctx, &present, &["rate"])?;
                ArmModel::Poisson { rate: need(&ctx, "rate", self.rate)? }
            }
            "discrete" => {
                only(&ctx, &present, &["support", "probs"])?;
                let support = self.support.clone().ok_or_else(|| Error::Config(format!("{ctx}: missing `support`")))?;
                let probs = self.probs.clone().ok_or_else(|| Error::Config(format!("{ctx}: missing `probs`")))?;
                ArmModel::BoundedDiscrete { support, probs }
            }
            "pareto" => {
                only(&ctx, &present, &["mean", "shape", "scale"])?;
                ArmModel::HeavyTail {
                    mean: need(&ctx, "mean", self.mean)?,
                    shape: need(&ctx, "shape", self.shape)?,
                    scale: self.scale.unwrap_or(1.0),
                }
            }
            other => return cfg_err(format!("unknown arm kind `{other}`")),
        };
        arm.validate()?;
        Ok(arm)
    }

    /// Inline form `kind:a,b,...`, e.g. `bernoulli:0.5` or `gaussian:0,1`.
    pub fn parse_inline(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| Error::Config(format!("inline arm `{s}` needs `kind:params`")))?;
        let nums: Vec<f64> = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Config(format!("inline arm `{s}`: bad number `{t}`"))))
            .collect::<Result<_>>()?;
        let mut a = ArmCfg { kind: kind.to_string(), ..Default::default() };
        let arity = |k: usize| if nums.len() == k { Ok(()) } else { cfg_err(format!("inline arm `{s}` expects {k} numbers")) };
        match kind {
            "bernoulli" => {
                arity(1)?;
                a.p = Some(nums[0]);
            }
            "poisson" => {
                arity(1)?;
                a.rate = Some(nums[0]);
            }
            "gaussian" | "gaussian-known-var" => {
                arity(2)?;
                a.mean = Some(nums[0]);
                a.var = Some(nums[1]);
            }
            "pareto" => {
                arity(3)?;
                a.mean = Some(nums[0]);
                a.shape = Some(nums[1]);
                a.scale = Some(nums[2]);
            }
            _ => return cfg_err(format!("inline arm kind `{kind}` is not supported")),
        }
        Ok(a)
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MomentCfg {
    /// `power` or `subgauss`.
    pub h: String,
    pub p: Option<f64>,
    pub sigma: Option<f64>,
    pub bound: Option<f64>,
    pub centered: Option<bool>,
    pub gamma: Option<f64>,
    pub mean_floor: Option<f64>,
}

impl MomentCfg {
    pub fn resolve(&self) -> Result<MomentSpec> {
        let ctx = format!("moment `{}`", self.h);
        let mut spec = match self.h.as_str() {
            "power" => {
                if self.sigma.is_some() {
                    return cfg_err(format!("{ctx}: field `sigma` does not apply"));
                }
                MomentSpec::power(need(&ctx, "p", self.p)?, need(&ctx, "bound", self.bound)?)?
            }
            "subgauss" => {
                only(&ctx, &[("p", self.p.is_some()), ("bound", self.bound.is_some())], &[])?;
                MomentSpec::subgaussian(need(&ctx, "sigma", self.sigma)?)?
            }
            other => return cfg_err(format!("unknown moment function `{other}`")),
        };
        if let Some(c) = self.centered {
            spec = spec.with_centered(c);
        }
        if let Some(g) = self.gamma {
            spec = spec.with_gamma(g)?;
        }
        if let Some(f) = self.mean_floor {
            spec = spec.with_mean_floor(f);
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FamilyCfg {
    /// `kl-bernoulli`, `kl-poisson`, `kl-gaussian`, `bounded`, `gaussian`,
    /// `hmoment` or `maillard`.
    pub family: String,
    pub var: Option<f64>,
    pub upper: Option<f64>,
    pub scale: Option<f64>,
    pub moment: Option<MomentCfg>,
}

impl FamilyCfg {
    pub fn resolve(&self) -> Result<Family> {
        let ctx = format!("family `{}`", self.family);
        let present = [
            ("var", self.var.is_some()),
            ("upper", self.upper.is_some()),
            ("scale", self.scale.is_some()),
            ("moment", self.moment.is_some()),
        ];
        Ok(match self.family.as_str() {
            "kl-bernoulli" => {
                only(&ctx, &present, &[])?;
                Family::Spef(SpefKind::Bernoulli)
            }
            "kl-poisson" => {
                only(&ctx, &present, &[])?;
                Family::Spef(SpefKind::Poisson)
            }
            "kl-gaussian" => {
                only(&ctx, &present, &["var"])?;
                Family::Spef(SpefKind::GaussianKnownVar { var: self.var.unwrap_or(1.0) })
            }
            "bounded" => {
                only(&ctx, &present, &["upper"])?;
                Family::Bounded { upper: need(&ctx, "upper", self.upper)? }
            }
            "gaussian" => {
                only(&ctx, &present, &[])?;
                Family::Gaussian
            }
            "hmoment" => {
                only(&ctx, &present, &["moment"])?;
                let m = self.moment.as_ref().ok_or_else(|| Error::Config(format!("{ctx}: missing `moment`")))?;
                Family::HMoment(m.resolve()?)
            }
            "maillard" => {
                only(&ctx, &present, &["scale"])?;
                Family::Maillard { scale: self.scale.unwrap_or(1.0) }
            }
            other => return cfg_err(format!("unknown family `{other}`")),
        })
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PolicyCfg {
    /// `med`, `ts-spef`, `ts-gaussian`, `npts`, `h-npts`, `ts-classic`,
    /// `uniform` or `fixed`.
    pub kind: String,
    pub name: Option<String>,
    /// `empirical` (default) or `truncated`.
    pub estimator: Option<String>,
    pub divergence: Option<FamilyCfg>,
    /// `c` in `a_n = c / n`; the family default when absent.
    pub a: Option<f64>,
    /// SPEF family for `ts-spef`: `bernoulli`, `poisson` or `gaussian`.
    pub family: Option<String>,
    pub var: Option<f64>,
    pub clip: Option<[f64; 2]>,
    pub alpha: Option<f64>,
    pub upper: Option<f64>,
    pub moment: Option<MomentCfg>,
    pub arm: Option<usize>,
}

impl PolicyCfg {
    pub fn resolve(&self) -> Result<PolicyConfig> {
        let ctx = format!("policy `{}`", self.kind);
        let present = [
            ("divergence", self.divergence.is_some()),
            ("a", self.a.is_some()),
            ("family", self.family.is_some()),
            ("var", self.var.is_some()),
            ("clip", self.clip.is_some()),
            ("alpha", self.alpha.is_some()),
            ("upper", self.upper.is_some()),
            ("moment", self.moment.is_some()),
            ("arm", self.arm.is_some()),
        ];
        let kind = match self.kind.as_str() {
            "med" => {
                only(&ctx, &present, &["divergence", "a"])?;
                let fam = self.divergence.as_ref().ok_or_else(|| Error::Config(format!("{ctx}: missing `divergence`")))?;
                let family = fam.resolve()?;
                let schedule = match self.a {
                    Some(0.0) => ASchedule::Zero,
                    Some(c) if c > 0.0 => ASchedule::Inverse(c),
                    Some(c) => return cfg_err(format!("{ctx}: `a` must be >= 0, got {c}")),
                    None => ASchedule::default_for(&family),
                };
                PolicyKind::Med { divergence: DivergenceSpec::new(family), schedule }
            }
            "ts-spef" => {
                only(&ctx, &present, &["family", "var", "clip"])?;
                let family = self.family.as_deref().unwrap_or("bernoulli");
                let kind = match family {
                    "bernoulli" => SpefKind::Bernoulli,
                    "poisson" => SpefKind::Poisson,
                    "gaussian" => SpefKind::GaussianKnownVar { var: self.var.unwrap_or(1.0) },
                    other => return cfg_err(format!("{ctx}: unknown SPEF family `{other}`")),
                };
                let clip = match (self.clip, kind) {
                    (Some(c), _) => (c[0], c[1]),
                    (None, SpefKind::Bernoulli) => (0.0, 1.0),
                    (None, _) => return cfg_err(format!("{ctx}: `clip` is required for {family}")),
                };
                if !(clip.1 > clip.0) {
                    return cfg_err(format!("{ctx}: empty clip range"));
                }
                PolicyKind::TsSpef { kind, clip }
            }
            "ts-gaussian" => {
                only(&ctx, &present, &["alpha"])?;
                PolicyKind::TsGaussian { alpha: self.alpha.unwrap_or(-0.5) }
            }
            "npts" => {
                only(&ctx, &present, &["upper"])?;
                PolicyKind::Npts { upper: need(&ctx, "upper", self.upper)? }
            }
            "h-npts" => {
                only(&ctx, &present, &["moment"])?;
                let m = self.moment.as_ref().ok_or_else(|| Error::Config(format!("{ctx}: missing `moment`")))?;
                PolicyKind::HNpts { moment: m.resolve()? }
            }
            "ts-classic" => {
                only(&ctx, &present, &[])?;
                PolicyKind::ClassicTsBernoulli
            }
            "uniform" => {
                only(&ctx, &present, &[])?;
                PolicyKind::Uniform
            }
            "fixed" => {
                only(&ctx, &present, &["arm"])?;
                PolicyKind::Fixed { arm: need(&ctx, "arm", self.arm)? }
            }
            other => return cfg_err(format!("unknown policy kind `{other}`")),
        };
        let estimator = match self.estimator.as_deref() {
            None | Some("empirical") => MeanEstimator::Empirical,
            Some("truncated") => MeanEstimator::Truncated,
            Some(other) => return cfg_err(format!("{ctx}: unknown estimator `{other}`")),
        };
        let mut p = PolicyConfig::new(kind).with_estimator(estimator);
        if let Some(n) = &self.name {
            p = p.named(n.clone());
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimulateCfg {
    pub seed: Option<u64>,
    pub horizon: Option<u64>,
    pub replications: Option<u64>,
    /// Family for the lower-bound reference column.
    pub reference: Option<FamilyCfg>,
    #[serde(default)]
    pub arms: Vec<ArmCfg>,
    #[serde(default)]
    pub policies: Vec<PolicyCfg>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TemplateCfg {
    /// `dirac`, `pattern` or `sample`.
    pub kind: String,
    pub value: Option<f64>,
    pub values: Option<Vec<f64>>,
    pub arm: Option<ArmCfg>,
    pub seed: Option<u64>,
}

impl TemplateCfg {
    pub fn resolve(&self) -> Result<Template> {
        let ctx = format!("template `{}`", self.kind);
        let present = [
            ("value", self.value.is_some()),
            ("values", self.values.is_some()),
            ("arm", self.arm.is_some()),
            ("seed", self.seed.is_some()),
        ];
        match self.kind.as_str() {
            "dirac" => {
                only(&ctx, &present, &["value"])?;
                Ok(Template::Dirac(self.value.unwrap_or(0.0)))
            }
            "pattern" => {
                only(&ctx, &present, &["values"])?;
                Ok(Template::Pattern(self.values.clone().ok_or_else(|| Error::Config(format!("{ctx}: missing `values`")))?))
            }
            "sample" => {
                only(&ctx, &present, &["arm", "seed"])?;
                let arm = self.arm.as_ref().ok_or_else(|| Error::Config(format!("{ctx}: missing `arm`")))?.resolve()?;
                Ok(Template::Sampled { arm, seed: self.seed.unwrap_or(0) })
            }
            other => cfg_err(format!("unknown template kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BcpCfg {
    pub seed: Option<u64>,
    pub m: Option<u64>,
    pub mu_star: Option<f64>,
    pub n: Option<Vec<usize>>,
    /// `conditional` (default) or `hit-count`.
    pub estimator: Option<String>,
    /// `bonus` (default) or `joint`.
    pub event: Option<String>,
    pub template: Option<TemplateCfg>,
    pub moment: Option<MomentCfg>,
}

impl BcpCfg {
    pub fn estimator(&self) -> Result<Estimator> {
        match self.estimator.as_deref() {
            None | Some("conditional") => Ok(Estimator::Conditional),
            Some("hit-count") => Ok(Estimator::HitCount),
            Some(o) => cfg_err(format!("unknown estimator `{o}`")),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerifyCfg {
    pub seed: Option<u64>,
    pub instances: Option<usize>,
    pub suites: Option<Vec<String>>,
}

/// Parses a TOML document with source positions in error messages.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
}
