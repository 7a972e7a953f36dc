//! Hyperspherical direction transform and angle bookkeeping.

use super::GsoError;
use std::f64::consts::PI;

/// Unit search direction for an `n`-dimensional member from its `n - 1`
/// head angles.
///
/// Uses the standard hyperspherical transform: the first component is the
/// product of all cosines, component `j` is `sin(angles[j-2])` times the
/// cosines from `j-1` on, and the last component is the final sine. For
/// `n == 1` the direction is fixed at `(1)` and the angles are ignored.
pub fn direction_from_angles(n: usize, angles: &[f64]) -> Result<Vec<f64>, GsoError> {
    if n == 1 {
        return Ok(vec![1.0]);
    }
    if angles.len() != n - 1 {
        return Err(GsoError::DimensionMismatch {
            expected: n - 1,
            got: angles.len(),
        });
    }
    // cos_suffix[q] = prod of cos(angles[q..])
    let mut cos_suffix = vec![1.0; n];
    for q in (0..n - 1).rev() {
        cos_suffix[q] = angles[q].cos() * cos_suffix[q + 1];
    }
    let mut g = Vec::with_capacity(n);
    g.push(cos_suffix[0]);
    for j in 1..n - 1 {
        g.push(angles[j - 1].sin() * cos_suffix[j]);
    }
    g.push(angles[n - 2].sin());
    Ok(g)
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn two_dims_zero_angle_points_along_first_axis() {
        let g = direction_from_angles(2, &[0.0]).unwrap();
        assert_eq!(g, vec![1.0, 0.0]);
    }

    #[test]
    fn two_dims_quarter_turn_points_along_second_axis() {
        let g = direction_from_angles(2, &[FRAC_PI_2]).unwrap();
        assert!((g[0] - 0.0).abs() < 1e-15);
        assert!((g[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_dims_matches_closed_form() {
        let g = direction_from_angles(3, &[FRAC_PI_4, FRAC_PI_4]).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-15);
        assert!((g[1] - 0.5).abs() < 1e-15);
        assert!((g[2] - FRAC_PI_4.sin()).abs() < 1e-15);
        assert!((norm(&g) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_dim_ignores_angles() {
        assert_eq!(direction_from_angles(1, &[]).unwrap(), vec![1.0]);
        assert_eq!(direction_from_angles(1, &[0.3]).unwrap(), vec![1.0]);
    }

    #[test]
    fn rejects_wrong_angle_count() {
        let err = direction_from_angles(3, &[0.1]).unwrap_err();
        assert_eq!(err, GsoError::DimensionMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn wrap_angle_lands_in_half_open_range() {
        for a in [-10.0, -std::f64::consts::PI, 0.0, 3.2, 99.7] {
            let w = wrap_angle(a);
            assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&w), "{a} -> {w}");
        }
        assert!((wrap_angle(std::f64::consts::PI) - (-std::f64::consts::PI)).abs() < 1e-15);
    }
}
