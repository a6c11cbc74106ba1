//! Pseudospectral laboratory for the Euler–Poincaré equations on the torus,
//! with a discrete Littlewood–Paley toolkit for Besov and Triebel–Lizorkin
//! norms.
//!
//! Module map:
//! - [`grid`], [`field`], [`ops`]: periodic grids, fields, Fourier multipliers, quadrature.
//! - [`littlewood_paley`]: dyadic blocks, low-pass filters, function-space norms.
//! - [`dynamics`]: the nonlocal transport right-hand side and the momentum-form residual.
//! - [`evolution`]: RK4 integration, Picard iterates, Cauchy diagnostics.
//! - [`experiments`]: counterexample data and the numerical experiments built on it.

pub mod dynamics;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod init;
pub mod littlewood_paley;
pub mod ops;
pub mod stats;

#[doc(hidden)]
pub mod testing;

pub use dynamics::Nonlinearity;
pub use error::{Error, Result};
pub use evolution::{BlowupGuard, DiagnosticNorms, SolverConfig, Trajectory};
pub use field::{Components, ScalarField, VectorField};
pub use grid::{PeriodicGrid, DEFAULT_PERIOD};
pub use littlewood_paley::{DyadicPartition, SpaceKind, SpaceParams};
