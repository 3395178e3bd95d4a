//! Geometric diagnostics for vortex lines in 3-D incompressible Euler flow.
//!
//! The crate covers periodic-grid fields with spectral calculus, vortex-line
//! tracing with along-line magnitude/stretching identities, Biot–Savart
//! velocity evaluation and velocity-by-vorticity bounds, a pseudo-spectral
//! Euler stepper with Lagrangian tracking, and checkers for the
//! geometric no-blow-up criteria.

pub mod biot_savart;
pub mod criteria;
pub mod direction;
pub mod error;
pub mod euler_sim;
pub mod field;
pub mod generators;
pub mod grid;
pub mod interp;
pub mod io;
pub mod quad;
pub mod spectral;
pub mod vortex_line;

pub use error::{Error, Result};
pub use field::{ScalarField3, VectorField3};
pub use grid::Grid3;
