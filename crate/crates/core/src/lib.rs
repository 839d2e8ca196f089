//! Numerical laboratory for the lattice-point discrepancy of a convex body with a
//! single flat point of order γ.
pub mod body;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod lattice;
pub mod norms;
pub mod predictions;
pub mod quadrature;
pub mod rng;
pub mod verify;

pub use body::{BodyParams, BoundaryPoint, Branch, FlatPointBody, Side};
pub use error::{Error, Result};
