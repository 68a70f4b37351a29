//! Power-mean welfare and malfare over groups, finite-sample malfare
//! estimation, and empirical malfare minimization (EMM) trainers.
//!
//! - [`aggregator`]: weighted power means, welfare/malfare wrappers, the
//!   additively separable form and generalized f-means.
//! - [`inequality`]: the Atkinson index and its identity with power means.
//! - [`estimation`]: plug-in malfare, Hoeffding/Bennett brackets, sample
//!   complexity calculators and the Nash-welfare hardness simulation.
//! - [`losses`]: hinge, logistic, 0-1 and square losses on `ℓ2`-ball
//!   constrained linear models.
//! - [`emm`]: the projected-subgradient and stump-cover trainers, the
//!   realizable mixture reduction and `p` sweeps.
//! - [`dataset`]: CSV ingestion, z-scoring, stratified splits and synthetic
//!   tasks.
//! - [`cli`]: the `malfare` command-line tool.
//!
//! Runnable walkthroughs live in `examples/`; see the README for the list.

pub mod aggregator;
pub mod cli;
pub mod dataset;
pub mod emm;
pub mod error;
pub mod estimation;
pub mod inequality;
pub mod losses;
pub mod rng;

pub use aggregator::{power_mean, Power, PowerSpec, Sense, SentimentProfile};
pub use dataset::GroupedDataset;
pub use error::{Error, Result};
pub use losses::{LinearModel, LossKind};
