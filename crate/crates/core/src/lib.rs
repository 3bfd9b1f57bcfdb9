//! Stabilized P1 finite element schemes for the Poisson–Nernst–Planck system.
//!
//! Two fully discrete, backward-Euler schemes are provided for the coupled
//! cation density `p`, anion density `n` and electric potential `phi`:
//!
//! * [`solver::Algorithm::Alg1`] adds a shock-detector driven graph-Laplacian
//!   diffusion to a consistent-mass Galerkin discretization and preserves the
//!   discrete maximum and minimum principles.
//! * [`solver::Algorithm::Alg2`] replaces the drift term by an edge-based
//!   "star" form built from secant slopes of the entropy density, uses a lumped
//!   time derivative, and additionally dissipates a discrete entropy on acute
//!   meshes.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. All IO lives in the companion `pnp-sim` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod detector;
pub mod diagnostics;
mod error;
pub mod fespace;
pub mod linsolve;
pub(crate) mod math;
pub mod mesh;
pub mod quadrature;
pub mod scenarios;
pub mod solver;
pub mod sparse;
pub mod stabilizer;

pub use error::{Error, Result};
pub use fespace::Field;
pub use mesh::{BoundaryTag, Mesh, Point, SymStencil};
pub use solver::{Algorithm, BoundarySpec, SolverConfig, State};
