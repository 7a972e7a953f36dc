//! Producer, scrounger, and ranger operators.
//!
//! Each randomized operator has a `*_with` kernel taking the raw draws,
//! with a thin wrapper that samples them from the caller's RNG. The
//! kernels keep the arithmetic testable against fixed draws; the wrappers
//! fix the draw order, which is part of the determinism contract.

use super::geometry::{direction_from_angles, wrap_angle};
use super::member::{decode, Member};
use super::params::{GsoParams, SearchBounds};
use super::GsoError;
use crate::csp::{ConstraintNetwork, Domain};
use rand::Rng;
use rand_distr::StandardNormal;

fn normal_draw<R: Rng>(rng: &mut R, truncate: bool) -> f64 {
    let r: f64 = rng.sample(StandardNormal);
    if truncate {
        r.clamp(-3.0, 3.0)
    } else {
        r
    }
}

/// Mutation probability at iteration `k` of `k_max` for a `d`-dimensional
/// problem: `1/d + (k/k_max) * (1 - 1/d)`, growing linearly from `1/d` to
/// one.
pub fn mutation_probability(d: usize, k: usize, k_max: usize) -> Result<f64, GsoError> {
    if k > k_max {
        return Err(GsoError::IterationOutOfRange { k, k_max });
    }
    let inv_d = 1.0 / d as f64;
    Ok(inv_d + (k as f64 / k_max as f64) * (1.0 - inv_d))
}

/// Polynomial-distribution offset for a uniform draw `u` in `[0, 1)`:
/// `(2u)^(1/(eta+1)) - 1` below one half, `1 - (2(1-u))^(1/(eta+1))`
/// above. Zero exactly at `u = 0.5`.
pub fn polynomial_delta(u: f64, eta: f64) -> f64 {
    let exponent = 1.0 / (eta + 1.0);
    if u < 0.5 {
        (2.0 * u).powf(exponent) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(exponent)
    }
}

/// Mutates each coordinate independently with probability `p_m` by a
/// bound-scaled polynomial offset, clamping the result into the bounds.
pub fn polynomial_mutate<R: Rng>(
    position: &[f64],
    bounds: &SearchBounds,
    p_m: f64,
    eta: f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut out = position.to_vec();
    for (j, x) in out.iter_mut().enumerate() {
        if rng.random::<f64>() < p_m {
            let delta = polynomial_delta(rng.random::<f64>(), eta);
            *x += bounds.width(j) * delta;
            *x = x.clamp(bounds.lower()[j], bounds.upper()[j]);
        }
    }
    out
}

/// Scrounge kernel: move toward the producer by the given per-coordinate
/// fractions, staying inside the closed interval between the two points.
pub fn scrounge_with(position: &[f64], producer: &[f64], fractions: &[f64]) -> Vec<f64> {
    position
        .iter()
        .zip(producer)
        .zip(fractions)
        .map(|((&y, &p), &r)| (y + r * (p - y)).clamp(y.min(p), y.max(p)))
        .collect()
}

/// Random walk toward the producer's current position.
pub fn scrounge<R: Rng>(position: &[f64], producer: &[f64], rng: &mut R) -> Vec<f64> {
    let fractions: Vec<f64> = (0..position.len()).map(|_| rng.random::<f64>()).collect();
    scrounge_with(position, producer, &fractions)
}

/// Raw draws behind one three-point scan: a normal step scale for the
/// zero-degree point, and a (normal, uniform) pair each for the right and
/// left points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreePointDraws {
    pub zero_step: f64,
    pub right: (f64, f64),
    pub left: (f64, f64),
}

/// Three-point scan kernel: candidates at zero degrees, right, and left
/// of the head direction, clamped to the bounds.
pub fn three_point_candidates(
    position: &[f64],
    angles: &[f64],
    draws: &ThreePointDraws,
    params: &GsoParams,
    bounds: &SearchBounds,
) -> Result<[Vec<f64>; 3], GsoError> {
    let n = position.len();
    let step = |r1: f64, angle_offset: f64| -> Result<Vec<f64>, GsoError> {
        let offset_angles: Vec<f64> = angles.iter().map(|a| a + angle_offset).collect();
        let g = direction_from_angles(n, &offset_angles)?;
        let mut candidate: Vec<f64> = position
            .iter()
            .zip(&g)
            .map(|(y, gj)| y + r1 * params.l_max * gj)
            .collect();
        bounds.clamp(&mut candidate);
        Ok(candidate)
    };
    let zero = step(draws.zero_step, 0.0)?;
    let right = step(draws.right.0, draws.right.1 * params.theta_max / 2.0)?;
    let left = step(draws.left.0, -(draws.left.1 * params.theta_max / 2.0))?;
    Ok([zero, right, left])
}

/// Scans around the producer at zero degrees, right, and left, with fresh
/// draws per candidate.
pub fn producer_scan_three_point<R: Rng>(
    producer: &Member,
    params: &GsoParams,
    bounds: &SearchBounds,
    rng: &mut R,
) -> Result<[Vec<f64>; 3], GsoError> {
    let draws = ThreePointDraws {
        zero_step: normal_draw(rng, params.truncate_normal),
        right: (normal_draw(rng, params.truncate_normal), rng.random::<f64>()),
        left: (normal_draw(rng, params.truncate_normal), rng.random::<f64>()),
    };
    three_point_candidates(&producer.position, &producer.head_angle, &draws, params, bounds)
}

/// Ranger kernel: turn the head by `turns[j] * alpha_max` per angle, then
/// step `ranging_a * |distance_draw| * l_max` along the new direction.
/// Returns the clamped position and the wrapped angles.
pub fn range_step_with(
    position: &[f64],
    angles: &[f64],
    turns: &[f64],
    distance_draw: f64,
    params: &GsoParams,
    bounds: &SearchBounds,
) -> Result<(Vec<f64>, Vec<f64>), GsoError> {
    if turns.len() != angles.len() {
        return Err(GsoError::DimensionMismatch {
            expected: angles.len(),
            got: turns.len(),
        });
    }
    let new_angles: Vec<f64> = angles
        .iter()
        .zip(turns)
        .map(|(a, t)| wrap_angle(a + t * params.alpha_max))
        .collect();
    let n = position.len();
    let g = direction_from_angles(n, &new_angles)?;
    let length = params.ranging_a * distance_draw.abs() * params.l_max;
    let mut new_position: Vec<f64> = position.iter().zip(&g).map(|(y, gj)| y + length * gj).collect();
    bounds.clamp(&mut new_position);
    Ok((new_position, new_angles))
}

/// Random ranger move: symmetric uniform head turn per angle, normal
/// distance draw.
pub fn range_step<R: Rng>(
    member: &Member,
    params: &GsoParams,
    bounds: &SearchBounds,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<f64>), GsoError> {
    let turns: Vec<f64> = (0..member.head_angle.len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let distance = normal_draw(rng, params.truncate_normal);
    range_step_with(&member.position, &member.head_angle, &turns, distance, params, bounds)
}

/// Producer step through adaptive polynomial mutation: mutate with
/// probability `mutation_probability(n, k, k_max)` per coordinate,
/// evaluate the candidate, and keep it when its fitness is no worse.
/// The head angle is left unchanged.
pub fn producer_step_apm<R: Rng>(
    producer: &Member,
    params: &GsoParams,
    bounds: &SearchBounds,
    k: usize,
    k_max: usize,
    network: &ConstraintNetwork,
    domains: &[Domain],
    rng: &mut R,
) -> Result<Member, GsoError> {
    let n = producer.position.len();
    let p_m = mutation_probability(n, k, k_max)?;
    let candidate = polynomial_mutate(&producer.position, bounds, p_m, params.mutation_eta, rng);
    let decoded = decode(&candidate, domains)?;
    let fitness = network.violation_count(decoded.values());
    if fitness <= producer.fitness {
        Ok(Member {
            position: candidate,
            head_angle: producer.head_angle.clone(),
            fitness,
            decoded,
            infeasible: producer.infeasible,
        })
    } else {
        Ok(producer.clone())
    }
}
