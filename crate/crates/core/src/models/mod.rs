//! Concrete programs: pricing under funding costs and optimal stopping.

pub mod bases;
pub mod black_scholes;
pub mod funding;
pub mod stopping;

pub use bases::{generic_basis, top_two, MaxAssetsBasis};
pub use funding::{check_truncation, FundingModel, FundingParams, TruncationCheck};
pub use stopping::{stopping_model, Reward, StoppingParams, StoppingProblem, StoppingTimeProcess};

/// Name of the five-asset funding benchmark preset.
pub const FUNDING_PRESET: &str = "bsz-funding-5d";

/// Name of the two-step binomial stopping preset.
pub const STOPPING_PRESET: &str = "binomial-stopping";
