//! Group-search member geometry and search operators.
//!
//! Members carry a continuous position in `R^n` plus a head-angle vector
//! that maps to a unit search direction through the hyperspherical
//! transform. The discrete CSP is reached through [`decode`], which floors
//! each coordinate into an index of the corresponding domain.

mod geometry;
mod member;
mod ops;
mod params;

pub use geometry::{direction_from_angles, wrap_angle};
pub use member::{decode, Member};
pub use ops::{
    mutation_probability, polynomial_delta, polynomial_mutate, producer_scan_three_point,
    producer_step_apm, range_step, range_step_with, scrounge, scrounge_with,
    three_point_candidates, ThreePointDraws,
};
pub use params::{GsoParams, SearchBounds};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GsoError {
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("variable {var} has an empty domain; the member is infeasible")]
    EmptyDomain { var: usize },
    #[error("iteration {k} exceeds the maximum {k_max}")]
    IterationOutOfRange { k: usize, k_max: usize },
    #[error("bounds invalid at dimension {dim}: lower must be strictly below upper")]
    InvalidBounds { dim: usize },
}
