//! Population members and the continuous-to-discrete decode bridge.

use super::GsoError;
use crate::csp::{Assignment, Domain};

/// One population individual.
///
/// `fitness` is the violation count of `decoded`, which is the decode of
/// `position` under the domains current when the member was last
/// evaluated. `head_angle` has length `n - 1` for `n >= 2`; for `n == 1`
/// it holds a single ignored entry so initialization draws stay regular.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub position: Vec<f64>,
    pub head_angle: Vec<f64>,
    pub fitness: usize,
    pub decoded: Assignment,
    /// Whether the decoded assignment wiped out under singleton
    /// propagation when the member was created. Recorded at
    /// initialization only; such members stay in the population.
    pub infeasible: bool,
}

/// Maps a continuous position to a complete assignment.
///
/// Per dimension, the value index is `floor(position[j])` clamped into
/// `0..|D_j|`; the assignment takes the domain value at that index. Total
/// and deterministic for nonempty domains.
pub fn decode(position: &[f64], domains: &[Domain]) -> Result<Assignment, GsoError> {
    if position.len() != domains.len() {
        return Err(GsoError::DimensionMismatch {
            expected: domains.len(),
            got: position.len(),
        });
    }
    let mut values = Vec::with_capacity(position.len());
    for (var, (p, d)) in position.iter().zip(domains).enumerate() {
        if d.is_empty() {
            return Err(GsoError::EmptyDomain { var });
        }
        let floored = p.floor();
        let index = if floored < 0.0 {
            0
        } else {
            (floored as usize).min(d.len() - 1)
        };
        values.push(d.value_at(index));
    }
    Ok(Assignment(values))
}
