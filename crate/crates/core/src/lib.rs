//! Numerics for warped-product Einstein metrics over a one-dimensional base.
//!
//! A metric `g = dt² + u²(t) g_N` with Einstein fiber `Ric_N = k(n-2) g_N`
//! and a potential `f(t) ≥ 0` form a `(λ, n+m)`-Einstein triple when
//! `Hess f = (f/m)(Ric - λ g)`, i.e. when `g + f² g_F` is Einstein for an
//! `m`-dimensional Einstein fiber `F`.
//!
//! - [`geometry`]: curvature and Hessian eigenvalues at a point.
//! - [`residuals`]: the reduced equations as residuals, verification of
//!   sampled profiles, reconstruction of `f` from `u`.
//! - [`solver`]: integration, endpoint classification, shooting.
//! - [`catalog`]: closed-form solution families.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod profile;
pub mod quadrature;
pub mod residuals;
pub mod roots;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{PointState, SpaceParams};
pub use profile::Profile;
pub use residuals::{verify, ResidualReport, Verdict};
pub use solver::{integrate, IntegrateOptions, IvpState};
