//! Propagation-assisted group search: root filtering, population
//! initialization, the producer/scrounger/ranger loop, and stop handling.
//!
//! A run is strictly sequential and fully determined by the RNG seed; the
//! draw order (per member: positions, then head angles at initialization;
//! producer draws, then per-member role and move draws each iteration) is
//! part of that contract. Wall-clock milliseconds in the trace are the
//! only nondeterministic output.

use crate::csp::{Assignment, ConstraintNetwork, Domain};
use crate::gso::{
    decode, producer_scan_three_point, producer_step_apm, range_step, scrounge, GsoError,
    GsoParams, Member, SearchBounds,
};
use crate::propagation::ac3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;
use thiserror::Error;

/// When the search should halt; the parameter `max_iters` is always
/// active as a hard cap on top of the selected mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopCriterion {
    /// Halt as soon as one solution is known.
    FirstSolution,
    /// Halt once the given number of distinct solutions is known.
    NSolutions(usize),
    /// Run to the iteration cap regardless of solutions.
    MaxIterations,
    /// Run until the cap, or until the solution count reaches a known
    /// exhaustive total when one is supplied.
    ExhaustPopulation { known_solution_total: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Unsatisfiable,
    FirstSolutionFound,
    SolutionCountReached,
    IterationCap,
    AllSolutionsFound,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopReason::Unsatisfiable => "unsatisfiable",
            StopReason::FirstSolutionFound => "first-solution",
            StopReason::SolutionCountReached => "solution-count",
            StopReason::IterationCap => "iteration-cap",
            StopReason::AllSolutionsFound => "all-solutions",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("internal solver error: {0}")]
    Internal(#[from] GsoError),
}

/// One per-iteration record of the convergence trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    /// Best-so-far fitness envelope; non-increasing across rows.
    pub best_fitness: usize,
    /// Mean fitness of the current population.
    pub mean_fitness: f64,
    /// Cumulative distinct solutions found.
    pub solutions_found: usize,
    /// Wall-clock time since the run started. Excluded from determinism
    /// comparisons.
    pub elapsed_ms: u64,
}

/// Per-iteration convergence records, serializable as CSV with the fixed
/// header `iteration,best_fitness,mean_fitness,solutions_found,elapsed_ms`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
}

pub const TRACE_CSV_HEADER: &str = "iteration,best_fitness,mean_fitness,solutions_found,elapsed_ms";

#[derive(Debug, Error, PartialEq, Eq)]
#[error("trace csv error at line {line}: {msg}")]
pub struct TraceCsvError {
    pub line: usize,
    pub msg: String,
}

impl ConvergenceTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.6},{},{}\n",
                r.iteration, r.best_fitness, r.mean_fitness, r.solutions_found, r.elapsed_ms
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, TraceCsvError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == TRACE_CSV_HEADER => {}
            other => {
                return Err(TraceCsvError {
                    line: 1,
                    msg: format!("expected header `{TRACE_CSV_HEADER}`, got {:?}", other.map(|(_, h)| h)),
                })
            }
        }
        let mut rows = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(TraceCsvError {
                    line: idx + 1,
                    msg: format!("expected 5 fields, got {}", fields.len()),
                });
            }
            let parse_err = |msg: String| TraceCsvError { line: idx + 1, msg };
            rows.push(TraceRow {
                iteration: fields[0].parse().map_err(|e| parse_err(format!("iteration: {e}")))?,
                best_fitness: fields[1].parse().map_err(|e| parse_err(format!("best_fitness: {e}")))?,
                mean_fitness: fields[2].parse().map_err(|e| parse_err(format!("mean_fitness: {e}")))?,
                solutions_found: fields[3].parse().map_err(|e| parse_err(format!("solutions_found: {e}")))?,
                elapsed_ms: fields[4].parse().map_err(|e| parse_err(format!("elapsed_ms: {e}")))?,
            });
        }
        Ok(ConvergenceTrace { rows })
    }
}

/// Final state of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    /// Distinct solutions found, sorted; every entry evaluates to zero
    /// violations.
    pub solutions: Vec<Assignment>,
    /// Best assignment seen overall with its fitness; `None` only when
    /// the root network is arc-inconsistent and no member was ever built.
    pub best: Option<(Assignment, usize)>,
    pub trace: ConvergenceTrace,
    pub iterations_run: usize,
    pub stop_reason: StopReason,
    /// Population snapshot at termination. The snapshot is not claimed to
    /// cover the remaining solutions.
    pub final_population: Vec<Member>,
}

/// Counters the stop criterion is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchProgress {
    pub iterations_completed: usize,
    pub solutions_found: usize,
    pub max_iters: usize,
}

/// Decides whether the search halts now, and why. Mode conditions are
/// checked before the hard iteration cap.
pub fn stop_check(progress: &SearchProgress, stop: &StopCriterion) -> Option<StopReason> {
    match stop {
        StopCriterion::FirstSolution if progress.solutions_found >= 1 => {
            return Some(StopReason::FirstSolutionFound)
        }
        StopCriterion::NSolutions(count) if progress.solutions_found >= *count => {
            return Some(StopReason::SolutionCountReached)
        }
        StopCriterion::ExhaustPopulation {
            known_solution_total: Some(total),
        } if progress.solutions_found >= *total => return Some(StopReason::AllSolutionsFound),
        _ => {}
    }
    if progress.iterations_completed >= progress.max_iters {
        return Some(StopReason::IterationCap);
    }
    None
}

fn validate_stop(stop: &StopCriterion) -> Result<(), SolveError> {
    if let StopCriterion::NSolutions(0) = stop {
        return Err(SolveError::Config("n-solutions count must be at least 1".into()));
    }
    Ok(())
}

/// Outcome of population initialization.
#[derive(Debug, Clone, PartialEq)]
pub enum InitOutcome {
    /// Root propagation wiped out a domain: the instance has no solution.
    Unsatisfiable,
    Ready {
        population: Vec<Member>,
        root_domains: Vec<Domain>,
    },
}

/// Draws the population over root-filtered domains.
///
/// The root network is pruned once with arc consistency; a wipeout there
/// proves unsatisfiability and is returned as an outcome, not an error.
/// Members get positions uniform over `[0, |D_j|)` and head angles
/// uniform over `[-pi, pi)`; violating members are additionally run
/// through singleton propagation purely to record infeasibility, and are
/// kept either way to preserve initial diversity.
pub fn initialize_population<R: Rng>(
    network: &ConstraintNetwork,
    params: &GsoParams,
    rng: &mut R,
) -> Result<InitOutcome, SolveError> {
    params.validate().map_err(SolveError::Config)?;
    let root = ac3(network, network.domains());
    if root.wipeout {
        return Ok(InitOutcome::Unsatisfiable);
    }
    let population = init_members(network, &root.domains, params, rng)?;
    Ok(InitOutcome::Ready {
        population,
        root_domains: root.domains,
    })
}

pub(crate) fn init_members<R: Rng>(
    network: &ConstraintNetwork,
    domains: &[Domain],
    params: &GsoParams,
    rng: &mut R,
) -> Result<Vec<Member>, SolveError> {
    let n = network.n();
    let angle_count = n.saturating_sub(1).max(1);
    let mut members = Vec::with_capacity(params.pop_size);
    for _ in 0..params.pop_size {
        let position: Vec<f64> = domains
            .iter()
            .map(|d| rng.random_range(0.0..d.len() as f64))
            .collect();
        let head_angle: Vec<f64> = (0..angle_count).map(|_| rng.random_range(-PI..PI)).collect();
        let decoded = decode(&position, domains)?;
        let fitness = network.violation_count(decoded.values());
        members.push(Member {
            position,
            head_angle,
            fitness,
            decoded,
            infeasible: false,
        });
    }
    for m in &mut members {
        if m.fitness > 0 {
            let singleton: Vec<Domain> =
                m.decoded.values().iter().map(|&v| Domain::singleton(v)).collect();
            m.infeasible = ac3(network, &singleton).wipeout;
        }
    }
    Ok(members)
}

/// How the producer improves its position each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ProducerMode {
    /// Adaptive polynomial mutation with greedy acceptance.
    Apm,
    /// Classic zero/right/left scan, keeping the best of the four points.
    ThreePoint,
}

/// Solves with the propagation-assisted group search: root arc
/// consistency, then the producer/scrounger/ranger loop with the adaptive
/// polynomial-mutation producer.
pub fn solve(
    network: &ConstraintNetwork,
    params: &GsoParams,
    stop: &StopCriterion,
) -> Result<SolverResult, SolveError> {
    params.validate().map_err(SolveError::Config)?;
    validate_stop(stop)?;
    let root = ac3(network, network.domains());
    if root.wipeout {
        return Ok(unsatisfiable_result());
    }
    run_search(network, root.domains, params, stop, ProducerMode::Apm)
}

pub(crate) fn unsatisfiable_result() -> SolverResult {
    SolverResult {
        solutions: Vec::new(),
        best: None,
        trace: ConvergenceTrace::default(),
        iterations_run: 0,
        stop_reason: StopReason::Unsatisfiable,
        final_population: Vec::new(),
    }
}

pub(crate) fn run_search(
    network: &ConstraintNetwork,
    domains: Vec<Domain>,
    params: &GsoParams,
    stop: &StopCriterion,
    mode: ProducerMode,
) -> Result<SolverResult, SolveError> {
    params.validate().map_err(SolveError::Config)?;
    validate_stop(stop)?;
    let bounds = SearchBounds::for_domains(&domains)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut members = init_members(network, &domains, params, &mut rng)?;
    let start = Instant::now();

    let mut solutions: BTreeSet<Assignment> = BTreeSet::new();
    let mut best: (Assignment, usize) = (members[0].decoded.clone(), members[0].fitness);
    for m in &members {
        if m.fitness == 0 {
            solutions.insert(m.decoded.clone());
        }
        if m.fitness < best.1 {
            best = (m.decoded.clone(), m.fitness);
        }
    }

    let mut trace = ConvergenceTrace::default();
    let mut k = 0;
    let reason = loop {
        let progress = SearchProgress {
            iterations_completed: k,
            solutions_found: solutions.len(),
            max_iters: params.max_iters,
        };
        if let Some(reason) = stop_check(&progress, stop) {
            break reason;
        }

        let producer_idx = producer_index(&members);
        match mode {
            ProducerMode::Apm => {
                members[producer_idx] = producer_step_apm(
                    &members[producer_idx],
                    params,
                    &bounds,
                    k,
                    params.max_iters,
                    network,
                    &domains,
                    &mut rng,
                )?;
            }
            ProducerMode::ThreePoint => {
                let candidates =
                    producer_scan_three_point(&members[producer_idx], params, &bounds, &mut rng)?;
                let producer = &mut members[producer_idx];
                for position in candidates {
                    let decoded = decode(&position, &domains)?;
                    let fitness = network.violation_count(decoded.values());
                    if fitness < producer.fitness {
                        producer.position = position;
                        producer.decoded = decoded;
                        producer.fitness = fitness;
                    }
                }
            }
        }

        let producer_position = members[producer_idx].position.clone();
        for i in 0..members.len() {
            if i == producer_idx {
                continue;
            }
            if rng.random::<f64>() < params.scrounger_prob {
                members[i].position = scrounge(&members[i].position, &producer_position, &mut rng);
            } else {
                let (position, head_angle) = range_step(&members[i], params, &bounds, &mut rng)?;
                members[i].position = position;
                members[i].head_angle = head_angle;
            }
        }

        let mut fitness_total = 0usize;
        for m in &mut members {
            m.decoded = decode(&m.position, &domains)?;
            m.fitness = network.violation_count(m.decoded.values());
            fitness_total += m.fitness;
            if m.fitness == 0 {
                solutions.insert(m.decoded.clone());
            }
            if m.fitness < best.1 {
                best = (m.decoded.clone(), m.fitness);
            }
        }

        trace.rows.push(TraceRow {
            iteration: k,
            best_fitness: best.1,
            mean_fitness: fitness_total as f64 / members.len() as f64,
            solutions_found: solutions.len(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
        k += 1;
    };

    Ok(SolverResult {
        solutions: solutions.into_iter().collect(),
        best: Some(best),
        trace,
        iterations_run: k,
        stop_reason: reason,
        final_population: members,
    })
}

/// Index of the member with minimum fitness, lowest index on ties.
fn producer_index(members: &[Member]) -> usize {
    let mut idx = 0;
    for (i, m) in members.iter().enumerate().skip(1) {
        if m.fitness < members[idx].fitness {
            idx = i;
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_check_first_solution() {
        let p = SearchProgress {
            iterations_completed: 3,
            solutions_found: 1,
            max_iters: 100,
        };
        assert_eq!(
            stop_check(&p, &StopCriterion::FirstSolution),
            Some(StopReason::FirstSolutionFound)
        );
    }

    #[test]
    fn stop_check_iteration_cap_applies_to_every_mode() {
        let p = SearchProgress {
            iterations_completed: 100,
            solutions_found: 0,
            max_iters: 100,
        };
        for stop in [
            StopCriterion::FirstSolution,
            StopCriterion::NSolutions(5),
            StopCriterion::MaxIterations,
            StopCriterion::ExhaustPopulation {
                known_solution_total: None,
            },
        ] {
            assert_eq!(stop_check(&p, &stop), Some(StopReason::IterationCap));
        }
    }

    #[test]
    fn stop_check_solution_count() {
        let p = SearchProgress {
            iterations_completed: 10,
            solutions_found: 3,
            max_iters: 100,
        };
        assert_eq!(
            stop_check(&p, &StopCriterion::NSolutions(3)),
            Some(StopReason::SolutionCountReached)
        );
        assert_eq!(stop_check(&p, &StopCriterion::NSolutions(4)), None);
    }

    #[test]
    fn stop_check_exhaust_with_known_total() {
        let p = SearchProgress {
            iterations_completed: 10,
            solutions_found: 2,
            max_iters: 100,
        };
        assert_eq!(
            stop_check(
                &p,
                &StopCriterion::ExhaustPopulation {
                    known_solution_total: Some(2)
                }
            ),
            Some(StopReason::AllSolutionsFound)
        );
        assert_eq!(
            stop_check(
                &p,
                &StopCriterion::ExhaustPopulation {
                    known_solution_total: None
                }
            ),
            None
        );
    }

    #[test]
    fn trace_csv_round_trip() {
        let trace = ConvergenceTrace {
            rows: vec![
                TraceRow {
                    iteration: 0,
                    best_fitness: 4,
                    mean_fitness: 5.25,
                    solutions_found: 0,
                    elapsed_ms: 3,
                },
                TraceRow {
                    iteration: 1,
                    best_fitness: 2,
                    mean_fitness: 4.0,
                    solutions_found: 0,
                    elapsed_ms: 5,
                },
            ],
        };
        let parsed = ConvergenceTrace::from_csv(&trace.to_csv()).unwrap();
        assert_eq!(parsed, trace);
    }

    #[test]
    fn trace_csv_rejects_bad_header() {
        let err = ConvergenceTrace::from_csv("nope\n1,2,3,4,5\n").unwrap_err();
        assert_eq!(err.line, 1);
    }
}
