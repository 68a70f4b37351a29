//! Empirical malfare minimization: choose the hypothesis whose per-group
//! empirical risks have the smallest power-mean malfare.
//!
//! Linear models are trained by projected subgradient descent
//! ([`train_psg`]); decision stumps by exhaustive search over an exact
//! empirical cover ([`train_cover`]).

mod cover;
mod objective;
mod psg;
mod reduction;
mod sweep;

pub use cover::{
    enumerate_stump_cover, train_cover, union_cover_size, CoverConfig, CoverReport, Stump,
    StumpCover,
};
pub use objective::{emm_objective, emm_subgradient, Objective, ZERO_RISK_FLOOR};
pub use psg::{
    train_psg, IterationPlan, ModelFile, SubgradientMode, TraceEntry, TrainConfig, TrainOutcome,
    DEFAULT_MAX_ITERATIONS,
};
pub use reduction::{mixture_indices, realizable_mix_train, MixOutcome};
pub use sweep::{sweep_p, write_sweep_csv, SweepRow};
