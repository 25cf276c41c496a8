//! Numerical model of a triple of compatible Poisson bivectors on su(2)^3,
//! the four-dimensional leaves they share, the hyperkähler data carried by
//! those leaves (metric, complex structures, connection, curvature), and the
//! correspondence with moduli of solutions to Nahm's equations on (-inf, 0].
//!
//! su(2) is realized as R^3 with the cross product as bracket and the dot
//! product as invariant pairing (the true Killing form differs by a negative
//! scale; the positive-definite normalization is used throughout).

pub mod curvature;
pub mod error;
pub mod leaf;
pub mod nahm;
pub mod poisson;
pub mod report;
pub mod su2;
pub mod verify;

pub use error::{HyperLieError, Result};
