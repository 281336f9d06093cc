//! Coresets for Euclidean (k, z, m)-robust clustering.
//!
//! The robust objective discards the `m` units of weight furthest from the
//! centers and sums `dist^z` over the rest. A coreset is a small weighted
//! subset whose robust cost stays within a relative error of the full data's
//! cost for every center set.
//!
//! Construction ([`coreset::build_coreset`]):
//!
//! 1. seed an approximate center set with outlier-trimmed `D^z` sampling,
//! 2. keep the `m` furthest points as-is,
//! 3. split the remaining points into clusters, each cluster into dyadic
//!    distance rings around its center, and merge cheap consecutive rings
//!    into groups,
//! 4. sample every ring uniformly and compress every group to two weighted
//!    points that preserve its mass and its cost to the center.
//!
//! Around this sit the comparison baselines, two downstream solvers, and an
//! evaluation harness that measures empirical coreset error.

pub mod approx;
pub mod baselines;
pub mod coreset;
pub mod cost;
pub mod data;
pub mod decompose;
pub mod error;
pub mod eval;
pub mod io;
pub mod rng;
pub mod solvers;
pub mod timing;
pub mod types;


pub use coreset::{build_coreset, CoresetBuildReport, CoresetParams, Provenance, WeightedCoreset};
pub use cost::{cost_vanilla, nearest_center, robust_cost, RobustCostResult};
pub use error::{CoresetError, Result};
pub use types::{CenterSet, Dataset};
