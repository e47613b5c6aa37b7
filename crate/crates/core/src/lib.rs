//! Numerical laboratory for the mixed-boundary torsion problem
//!
//! ```text
//!   Δu = N in Σ∩Ω,   u = 0 on Γ0,   u_ν = 0 on Γ1
//! ```
//!
//! posed on planar sectors `Σ∩Ω` of a convex cone `Σ`. The crate meshes the
//! domain, solves the problem with quadratic Lagrange elements, and evaluates
//! the functionals that enter the rigidity and stability estimates for
//! Serrin's overdetermined condition `u_ν = R` on `Γ0`: the Serrin radius,
//! the center `z`, the Cauchy–Schwarz deficit, the integral identity,
//! the L² pseudodistance, `ρe − ρi`, and the weighted Poincaré constants
//! that calibrate the stability constant.
//!
//! Module map:
//!
//! * [`geometry`]: cones, radial-graph domains, boundary partition, normal span
//! * [`mesher`]: boundary-tagged triangulations and uniform refinement
//! * [`fem`]: P1/P2 assembly, sparse solve, field evaluation
//! * [`quantities`]: boundary flux, center, identity residual, deficits
//! * [`poincare`]: weighted Poincaré constants via generalized eigenproblems
//! * [`stability`]: perturbation families, sweeps, exponent fits, verdicts
//! * [`config`] and [`cli`]: batch front-end

pub mod cli;
pub mod config;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod mesher;
pub mod numeric;
pub mod poincare;
pub mod quantities;
pub mod stability;

pub use error::{Error, Result};

/// Planar point / vector type used throughout.
pub type Point = nalgebra::Vector2<f64>;

/// Spatial dimension of the finite element core.
pub const DIM: usize = 2;
