//! Perelman-type μ-entropy on toric manifolds: exact polytope integrals and
//! non-archimedean entropies on one side, circle-symmetric metrics on the
//! projective line on the other.

pub mod error;
pub mod exact;
pub mod exp_integrals;
pub mod geodesic_ray;
pub mod na_entropy;
pub mod optimizer;
pub mod polytope;
pub mod toric_metric;
pub mod verify;

pub use error::{Error, Result};
