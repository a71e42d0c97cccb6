//! Kernel-induced metric geometry of the Dirichlet space and the
//! Drury-Arveson space.
//!
//! The crate computes, in double precision with stated error contracts:
//!
//! * kernel evaluations and the induced metrics (pseudohyperbolic,
//!   Poincare-Bergman, closed-form Dirichlet, two-point Pick extremal);
//! * curve lengths by partition refinement and by the Riemannian density of
//!   the Dirichlet metric, with radial asymptotics;
//! * Gregory coefficients by recursion and by their explicit integral, with
//!   Wendel-type sandwich bounds and the `1/(n log^2 n)` asymptotics;
//! * the explicit embedding of the disc into the unit ball of l^2 that
//!   reproduces the Dirichlet kernel, with truncation control;
//! * separated sets on circles and in balls, packing bounds, and the
//!   per-radius obstruction table whose two columns grow at incompatible
//!   rates, quantifying why no finite-dimensional bi-Lipschitz embedding
//!   exists.
//!
//! The `pickmetrics` binary exposes the experiment families as subcommands;
//! see the crate README.

// negated comparisons like `!(x > 0.0)` are kept: they must reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod geodesy;
pub mod kernel;
pub mod metrics;
pub mod packing;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub use kernel::{BallPoint, DiscPoint, KernelSpec, Point, PowerSeries};
pub use metrics::{MetricId, MoebiusMap};
