//! Radial eigenproblem of the Klein-Gordon oscillator with a Coulomb-type
//! interaction, in the dimensionless form
//!
//! ```text
//! R'' + R'/x - (gamma^2/x^2) R - (delta/x) R - x^2 R + W R = 0,   x > 0
//! ```
//!
//! Four independent routes to the eigenvalues `W` are provided:
//!
//! * [`frobenius`]: the three-term recurrence of the power-series solution and
//!   the polynomial (truncated) solutions it admits on isolated values of `delta`;
//! * [`rayleigh_ritz`]: variational upper bounds in the basis
//!   `x^(gamma+j) exp(-x^2/2)`, computed in extended precision;
//! * [`rpm`]: the Riccati-Pade method (roots of Hankel determinants built from
//!   the Taylor coefficients of a regularized logarithmic derivative);
//! * [`oracle`]: a plain finite-difference solver used to cross-check the others.
//!
//! [`model`] holds the parameter types and the map between `W` and the
//! relativistic energy; [`cli`] drives the `kgo` binary.

pub mod cli;
pub mod error;
pub mod frobenius;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod precision;
pub mod rayleigh_ritz;
pub mod rpm;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{EnergyRecord, PhysicalParameters, ReducedRadialProblem};
pub use precision::{ExtendedProblem, DEFAULT_PRECISION_BITS};
pub use spectrum::{Method, Spectrum};
