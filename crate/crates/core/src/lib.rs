//! Minimum Empirical Divergence and Thompson-style bandit policies over
//! nonparametric families, with tools to study boundary-crossing
//! probabilities of Dirichlet-weighted sampling.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arm;
pub mod bcp;
pub mod divergence;
pub mod empirical;
pub mod error;
pub mod moment;
pub mod policies;
pub mod rng;
pub mod sim;
pub mod verify;

pub use arm::ArmModel;
pub use empirical::{Atoms, EmpiricalDistribution, WeightedAtoms};
pub use error::{Error, Result};
pub use moment::{MomentFn, MomentSpec};
pub use rng::{Purpose, RngStream, StreamId};
