//! Boundary-crossing probabilities of Dirichlet-weighted sampling:
//! exact formulas, Monte-Carlo estimators and analytic bounds.

mod exact;
mod mc;
mod profile;

pub use exact::{chernoff_joint_upper, exact_dirichlet_exceedance, hnpts_small_sample_lower, simple_truncation_lower};
pub use mc::{hnpts_bcp_conditional, mc_bcp, wilson, BcpEstimate, BcpEvent, LogBcpEstimate};
pub use profile::{
    bcp_rate_profile, gaussian_kinf_tail_check, joint_bound_row, spef_bcp_rate_check, Estimator, RateRow,
    RateSampler, SpefRateRow, TailRow, Template,
};

use crate::divergence::golden::maximize;

fn golden_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let (x, v) = maximize(|x| -f(x), lo, hi, 1e-13, 300);
    (x, -v)
}
