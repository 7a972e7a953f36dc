//! Search-space bounds and tunable parameters.

use super::GsoError;
use crate::csp::Domain;
use std::f64::consts::PI;

/// Per-dimension closed box `[lower_j, upper_j]` the search lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, GsoError> {
        if lower.len() != upper.len() {
            return Err(GsoError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (dim, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) {
                return Err(GsoError::InvalidBounds { dim });
            }
        }
        Ok(SearchBounds { lower, upper })
    }

    /// The decode box for a domain vector: `[0, |D_j|]` per dimension.
    pub fn for_domains(domains: &[Domain]) -> Result<Self, GsoError> {
        for (var, d) in domains.iter().enumerate() {
            if d.is_empty() {
                return Err(GsoError::EmptyDomain { var });
            }
        }
        let n = domains.len();
        SearchBounds::new(vec![0.0; n], domains.iter().map(|d| d.len() as f64).collect())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, dim: usize) -> f64 {
        self.upper[dim] - self.lower[dim]
    }

    /// Euclidean length of the box diagonal.
    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (hi - lo) * (hi - lo))
            .sum::<f64>()
            .sqrt()
    }

    pub fn clamp(&self, position: &mut [f64]) {
        for (j, p) in position.iter_mut().enumerate() {
            *p = p.clamp(self.lower[j], self.upper[j]);
        }
    }
}

/// All tunables of the group search. `Default` gives dimension-free
/// values; [`GsoParams::defaults_for`] additionally derives the angle and
/// distance scales from the bounds box the way the standard group search
/// does (`a = round(sqrt(n + 1))`, `theta_max = pi / a^2`,
/// `alpha_max = theta_max / 2`, `l_max =` box diameter, `ranging_a = a`).
#[derive(Debug, Clone, PartialEq)]
pub struct GsoParams {
    pub pop_size: usize,
    /// Probability that a non-producer member scrounges instead of
    /// ranging on a given iteration.
    pub scrounger_prob: f64,
    /// Maximum pursuit distance.
    pub l_max: f64,
    /// Maximum pursuit angle (radians).
    pub theta_max: f64,
    /// Maximum turning angle for rangers (radians).
    pub alpha_max: f64,
    /// Polynomial-mutation distribution index; larger means smaller
    /// typical steps.
    pub mutation_eta: f64,
    /// Scale constant on the ranger step length.
    pub ranging_a: f64,
    pub max_iters: usize,
    pub rng_seed: u64,
    /// Truncate normal step draws to `|r| <= 3` so step lengths stay in a
    /// predictable envelope. On by default.
    pub truncate_normal: bool,
}

impl Default for GsoParams {
    fn default() -> Self {
        GsoParams {
            pop_size: 48,
            scrounger_prob: 0.6,
            l_max: 1.0,
            theta_max: PI / 4.0,
            alpha_max: PI / 8.0,
            mutation_eta: 20.0,
            ranging_a: 2.0,
            max_iters: 5000,
            rng_seed: 0,
            truncate_normal: true,
        }
    }
}

impl GsoParams {
    pub fn defaults_for(bounds: &SearchBounds) -> Self {
        let n = bounds.dim();
        let a = ((n as f64) + 1.0).sqrt().round().max(1.0);
        let theta_max = PI / (a * a);
        GsoParams {
            l_max: bounds.diameter(),
            theta_max,
            alpha_max: theta_max / 2.0,
            ranging_a: a,
            ..GsoParams::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    /// Checks every invariant; the message names the offending field.
    pub fn validate(&self) -> Result<(), String> {
        if self.pop_size == 0 {
            return Err("pop_size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.scrounger_prob) {
            return Err("scrounger_prob must lie in [0, 1]".into());
        }
        for (name, v) in [
            ("l_max", self.l_max),
            ("theta_max", self.theta_max),
            ("alpha_max", self.alpha_max),
            ("mutation_eta", self.mutation_eta),
            ("ranging_a", self.ranging_a),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(format!("{name} must be strictly positive"));
            }
        }
        if self.max_iters == 0 {
            return Err("max_iters must be positive".into());
        }
        Ok(())
    }
}
