//! Numerical laboratory for the variational characterization of
//! J-holomorphic curves.
//!
//! A closed surface is immersed in a symplectic model manifold `(M, ω, J)`.
//! The ambient form is deformed inside its cohomology class, `ω ↦ ω + dd^c φ(t)`,
//! which moves the metric `ḡ(X, Y) = ½(ω(X, JY) + ω(Y, JX))` and therefore the
//! area of the fixed immersion. The crate evaluates the first and second
//! variations of that area, checks them against finite-difference oracles, and
//! builds the explicit test potentials (distance squared, normal-extended
//! saddles, Killing potentials on `CP^N`) that destabilize every
//! non-holomorphic surface.
//!
//! Module map:
//! - [`ambient`]: chart models of `(M, ω, J, ḡ)` and the `d^c` calculus.
//! - [`immersion`]: parametrized tori, quadrature grids, Kähler angle, frames.
//! - [`potential`]: deformation potentials as jets along the surface.
//! - [`variation`]: variation formulas, oracles and the destabilizer search.
//! - [`cli`]: scenario configs and the batch front-end.

pub mod ambient;
pub mod cli;
pub mod error;
pub mod immersion;
pub mod numerics;
pub mod potential;
pub mod variation;

pub use error::{Error, Result};

/// Library version recorded in run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
