//! Rate-region evaluation for two-user interference channels aided by relays.
//!
//! - [`prob`]: exact entropies and mutual information over named discrete variables.
//! - [`dm_region`]: the multi-relay Han-Kobayashi / noisy-network-coding region.
//! - [`det_class`]: the injective deterministic class and its capacity region.
//! - [`gauss`]: closed-form Gaussian inner bound, sum-rate search and baselines.
//! - [`geom`]: polygons, weighted maxima and time-sharing hulls of 2-D regions.
//! - [`io`], [`sweep`], [`search`], [`verify`]: file formats, the power sweep,
//!   input grid search and the self-check suites behind the `irc` binary.

pub mod det_class;
pub mod dm_region;
pub mod gauss;
pub mod geom;
pub mod io;
pub mod prob;
pub mod search;
pub mod sweep;
pub mod verify;

pub use geom::{hull_union, Polygon2D, RateInequality, RateRegion2D};
pub use prob::{build_joint, ConditionalFactor, NamedJoint, Variable};
