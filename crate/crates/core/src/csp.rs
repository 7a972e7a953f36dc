//! Finite-domain binary CSP representation and assignment evaluation.
//!
//! A network couples `n` variables, one finite integer [`Domain`] per
//! variable, and a list of binary [`Constraint`]s. The evaluation function
//! is the number of violated constraints; an assignment with zero
//! violations is a solution.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Index of a variable inside a network, dense in `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariableId(pub usize);

impl VariableId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A finite integer domain, stored sorted ascending and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    values: Vec<i64>,
}

impl Domain {
    /// Builds a domain from arbitrary values; sorts and removes duplicates.
    pub fn new(values: impl IntoIterator<Item = i64>) -> Self {
        let mut values: Vec<i64> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        Domain { values }
    }

    pub fn singleton(value: i64) -> Self {
        Domain { values: vec![value] }
    }

    /// The contiguous domain `lo..=hi` (empty when `lo > hi`).
    pub fn range(lo: i64, hi: i64) -> Self {
        Domain {
            values: (lo..=hi).collect(),
        }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, value: i64) -> bool {
        self.values.binary_search(&value).is_ok()
    }

    /// Value at a position in ascending order.
    pub fn value_at(&self, index: usize) -> i64 {
        self.values[index]
    }

    /// Removes a value if present; returns whether anything was removed.
    pub fn remove(&mut self, value: i64) -> bool {
        match self.values.binary_search(&value) {
            Ok(pos) => {
                self.values.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.iter().copied()
    }
}

/// The closed catalog of binary relations.
///
/// Anything outside the catalog must be expressed extensionally through
/// `AllowedTuples`, which keeps instances serializable and deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Relation {
    Equal,
    NotEqual,
    LessThan,
    /// `|u - v| != offset`; with `offset = |i - j|` this is the n-queens
    /// diagonal constraint between rows `i` and `j`.
    AbsDiffNotEqual { offset: i64 },
    /// Explicit list of admitted ordered value pairs.
    AllowedTuples { tuples: Vec<(i64, i64)> },
}

impl Relation {
    /// Extensional relation over the given pairs; sorts and dedups them.
    pub fn allowed_tuples(tuples: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut tuples: Vec<(i64, i64)> = tuples.into_iter().collect();
        tuples.sort_unstable();
        tuples.dedup();
        Relation::AllowedTuples { tuples }
    }

    /// Truth of the relation for the ordered pair `(u, v)`.
    pub fn holds(&self, u: i64, v: i64) -> bool {
        match self {
            Relation::Equal => u == v,
            Relation::NotEqual => u != v,
            Relation::LessThan => u < v,
            Relation::AbsDiffNotEqual { offset } => (u - v).abs() != *offset,
            Relation::AllowedTuples { tuples } => tuples.binary_search(&(u, v)).is_ok(),
        }
    }

    /// Sorts extensional tuples in place so `holds` can binary-search.
    pub(crate) fn canonicalize(&mut self) {
        if let Relation::AllowedTuples { tuples } = self {
            tuples.sort_unstable();
            tuples.dedup();
        }
    }
}

/// A binary constraint: an ordered scope pair and a relation over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    scope: (VariableId, VariableId),
    relation: Relation,
}

impl Constraint {
    pub fn new(first: VariableId, second: VariableId, mut relation: Relation) -> Result<Self, NetworkError> {
        if first == second {
            return Err(NetworkError::ScopeNotDistinct { var: first });
        }
        relation.canonicalize();
        Ok(Constraint {
            scope: (first, second),
            relation,
        })
    }

    pub fn scope(&self) -> (VariableId, VariableId) {
        self.scope
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    /// Truth of the relation for `(u, v)` taken in scope order.
    pub fn check_pair(&self, u: i64, v: i64) -> bool {
        self.relation.holds(u, v)
    }
}

/// Errors raised while building a network.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("network must have at least one variable")]
    NoVariables,
    #[error("constraint scope repeats variable {var}")]
    ScopeNotDistinct { var: VariableId },
    #[error("constraint scope references {var} but the network has {n} variables")]
    ScopeOutOfRange { var: VariableId, n: usize },
}

/// Errors raised when evaluating assignments.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum CspError {
    #[error("assignment has length {got}, network has {expected} variables")]
    InvalidAssignment { expected: usize, got: usize },
}

/// A complete assignment: one value per variable, indexed by `VariableId`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<i64>);

impl Assignment {
    pub fn values(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<i64>> for Assignment {
    fn from(values: Vec<i64>) -> Self {
        Assignment(values)
    }
}

/// The CSP: variables `0..n`, their domains, and the constraint list.
///
/// Immutable after construction, so one network can back any number of
/// concurrent solver runs. Propagation never mutates the network; it works
/// on detached domain vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintNetwork {
    domains: Vec<Domain>,
    constraints: Vec<Constraint>,
    /// For each variable, indices of the constraints mentioning it.
    attached: Vec<Vec<usize>>,
    /// Constraint indices per unordered variable pair, key `(min, max)`.
    by_pair: HashMap<(usize, usize), Vec<usize>>,
}

impl ConstraintNetwork {
    pub fn new(domains: Vec<Domain>, constraints: Vec<Constraint>) -> Result<Self, NetworkError> {
        let n = domains.len();
        if n == 0 {
            return Err(NetworkError::NoVariables);
        }
        let mut attached = vec![Vec::new(); n];
        let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (ci, c) in constraints.iter().enumerate() {
            let (a, b) = c.scope();
            for v in [a, b] {
                if v.index() >= n {
                    return Err(NetworkError::ScopeOutOfRange { var: v, n });
                }
            }
            attached[a.index()].push(ci);
            attached[b.index()].push(ci);
            let key = (a.index().min(b.index()), a.index().max(b.index()));
            by_pair.entry(key).or_default().push(ci);
        }
        Ok(ConstraintNetwork {
            domains,
            constraints,
            attached,
            by_pair,
        })
    }

    pub fn n(&self) -> usize {
        self.domains.len()
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn domain(&self, var: VariableId) -> &Domain {
        &self.domains[var.index()]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Indices of constraints whose scope mentions `var`.
    pub fn constraints_on(&self, var: VariableId) -> &[usize] {
        &self.attached[var.index()]
    }

    /// Indices of constraints coupling the unordered pair `{a, b}`.
    pub fn constraints_between(&self, a: VariableId, b: VariableId) -> &[usize] {
        let key = (a.index().min(b.index()), a.index().max(b.index()));
        self.by_pair.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Unordered variable pairs that share at least one constraint,
    /// sorted ascending.
    pub fn constrained_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.by_pair.keys().copied().collect();
        pairs.sort_unstable();
        pairs
    }

    /// Number of violated constraints under a complete assignment.
    pub fn evaluate(&self, a: &Assignment) -> Result<usize, CspError> {
        if a.len() != self.n() {
            return Err(CspError::InvalidAssignment {
                expected: self.n(),
                got: a.len(),
            });
        }
        Ok(self.violation_count(a.values()))
    }

    /// True iff `a` violates no constraint.
    pub fn is_solution(&self, a: &Assignment) -> Result<bool, CspError> {
        Ok(self.evaluate(a)? == 0)
    }

    /// Unchecked fast path for the solver hot loop; `values` must have
    /// length `n`.
    pub fn violation_count(&self, values: &[i64]) -> usize {
        debug_assert_eq!(values.len(), self.n());
        self.constraints
            .iter()
            .filter(|c| {
                let (a, b) = c.scope();
                !c.check_pair(values[a.index()], values[b.index()])
            })
            .count()
    }
}
