//! Monte Carlo engine for downlink SIR coverage in planar cellular networks.
//!
//! The crate simulates interference-limited networks whose base stations and
//! users are drawn from planar point processes (homogeneous Poisson, Matérn
//! cluster, Thomas cluster), evaluates multi-slope power-law pathloss, and
//! estimates the meta distribution of SIR — the distribution, over point
//! process realizations, of the conditional coverage probability given the
//! realization.
//!
//! On top of the estimators sit scaling tools: simultaneously scaling all
//! node locations and the pathloss breakpoint distances by a factor `k`
//! leaves the per-realization SIR unchanged, so suitably re-parameterized
//! network configurations form equi-coverage families. The [`contours`]
//! module generates those families, verifies them by simulation, and
//! extracts iso-coverage level sets from parameter sweeps.
//!
//! All sampling is driven by explicit RNG streams derived from one 64-bit
//! seed (see [`rng`]), so every result is reproducible bit-for-bit
//! regardless of worker count.

pub mod contours;
pub mod coverage;
pub mod csvio;
mod error;
pub mod geometry;
pub mod netmodels;
mod plane;
pub mod propagation;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use plane::{Point, Shape};

pub use contours::{ContourSpec, ContourVerdict, ScalingRule, SweepSpec, VerifyMode};
pub use coverage::{CoverageConfig, MetaDistEstimate};
pub use geometry::{ClusterKind, PcpParams, PointPattern, PppParams, ProcessParams};
pub use netmodels::{NetworkModel, SceneOptions, TypicalUserScene};
pub use propagation::{AssociationPolicy, FadingSpec, LinkBudget, PathlossModel};
pub use rng::{SeedTree, StreamRng};
pub use stats::Confidence;
