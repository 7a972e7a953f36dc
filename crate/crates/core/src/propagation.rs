//! Arc-consistency filtering (AC-3) over detached domain vectors.
//!
//! The queue discipline is classic AC-3: FIFO over directed arcs
//! `(xi, xj)`, re-enqueueing all arcs `(xk, xi)` with `k != j` when the
//! domain of `xi` shrinks. When several constraints couple one pair, a
//! value needs a single support satisfying all of them at once.
//!
//! Propagation runs to the full fixpoint even after a domain empties, so
//! the pruned domains are the unique maximal arc-consistent subdomains
//! regardless of queue order; a wipeout is reported in the result rather
//! than raised.

use crate::csp::{ConstraintNetwork, Domain, VariableId};
use std::collections::{HashSet, VecDeque};
use thiserror::Error;

/// Outcome of a propagation pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    /// Pruned domain per variable.
    pub domains: Vec<Domain>,
    /// True iff some pruned domain is empty.
    pub wipeout: bool,
    /// Every `(variable, value)` removal, in removal order.
    pub removals: Vec<(VariableId, i64)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PropagationError {
    #[error("no constraint couples {xi} and {xj}")]
    NoArc { xi: VariableId, xj: VariableId },
    #[error("value {value} is not in the current domain of {var}")]
    ValueNotInDomain { var: VariableId, value: i64 },
}

/// Order in which the initial arc queue is seeded. The fixpoint does not
/// depend on it; exposing both orders lets tests check exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcSeedOrder {
    Forward,
    Reversed,
}

/// True iff `u` at `xi` has a support `v` in `dj` satisfying every
/// constraint coupling the pair, each taken in its own scope orientation.
fn has_support(network: &ConstraintNetwork, xi: VariableId, xj: VariableId, u: i64, dj: &Domain) -> bool {
    let coupling = network.constraints_between(xi, xj);
    dj.iter().any(|v| {
        coupling.iter().all(|&ci| {
            let c = &network.constraints()[ci];
            if c.scope().0 == xi {
                c.check_pair(u, v)
            } else {
                c.check_pair(v, u)
            }
        })
    })
}

/// Removes from `D(xi)` every value without a support in `D(xj)`.
///
/// Returns whether anything was removed together with the new domain for
/// `xi`; the input domains are untouched.
pub fn revise(
    network: &ConstraintNetwork,
    xi: VariableId,
    xj: VariableId,
    domains: &[Domain],
) -> Result<(bool, Domain), PropagationError> {
    if network.constraints_between(xi, xj).is_empty() {
        return Err(PropagationError::NoArc { xi, xj });
    }
    let di = &domains[xi.index()];
    let dj = &domains[xj.index()];
    let kept: Vec<i64> = di
        .iter()
        .filter(|&u| has_support(network, xi, xj, u, dj))
        .collect();
    let changed = kept.len() != di.len();
    Ok((changed, Domain::new(kept)))
}

/// Enforces arc consistency on `domains`, seeding the queue in the given
/// order.
pub fn ac3_with_seed_order(
    network: &ConstraintNetwork,
    domains: &[Domain],
    order: ArcSeedOrder,
) -> PropagationResult {
    let mut current: Vec<Domain> = domains.to_vec();
    let mut removals = Vec::new();

    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for (a, b) in network.constrained_pairs() {
        arcs.push((a, b));
        arcs.push((b, a));
    }
    if order == ArcSeedOrder::Reversed {
        arcs.reverse();
    }

    let mut queue: VecDeque<(usize, usize)> = arcs.iter().copied().collect();
    let mut queued: HashSet<(usize, usize)> = arcs.into_iter().collect();

    while let Some((i, j)) = queue.pop_front() {
        queued.remove(&(i, j));
        let xi = VariableId(i);
        let xj = VariableId(j);
        let (changed, new_di) = revise(network, xi, xj, &current)
            .expect("queued arcs always correspond to a constrained pair");
        if !changed {
            continue;
        }
        for u in current[i].iter() {
            if !new_di.contains(u) {
                removals.push((xi, u));
            }
        }
        current[i] = new_di;
        for &ci in network.constraints_on(xi) {
            let (a, b) = network.constraints()[ci].scope();
            let k = if a == xi { b.index() } else { a.index() };
            if k != j && queued.insert((k, i)) {
                queue.push_back((k, i));
            }
        }
    }

    let wipeout = current.iter().any(Domain::is_empty);
    PropagationResult {
        domains: current,
        wipeout,
        removals,
    }
}

/// Enforces arc consistency on `domains`; the result is the unique
/// maximal arc-consistent subdomain set.
pub fn ac3(network: &ConstraintNetwork, domains: &[Domain]) -> PropagationResult {
    ac3_with_seed_order(network, domains, ArcSeedOrder::Forward)
}

/// Restricts `var` to `value` and propagates the consequences.
pub fn assign_and_propagate(
    network: &ConstraintNetwork,
    domains: &[Domain],
    var: VariableId,
    value: i64,
) -> Result<PropagationResult, PropagationError> {
    if !domains[var.index()].contains(value) {
        return Err(PropagationError::ValueNotInDomain { var, value });
    }
    let mut restricted = domains.to_vec();
    restricted[var.index()] = Domain::singleton(value);
    Ok(ac3(network, &restricted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::{Constraint, Relation};

    fn net(domains: Vec<Domain>, constraints: Vec<(usize, usize, Relation)>) -> ConstraintNetwork {
        let constraints = constraints
            .into_iter()
            .map(|(a, b, r)| Constraint::new(VariableId(a), VariableId(b), r).unwrap())
            .collect();
        ConstraintNetwork::new(domains, constraints).unwrap()
    }

    #[test]
    fn revise_drops_unsupported_values() {
        let n = net(
            vec![Domain::range(1, 3), Domain::singleton(2)],
            vec![(0, 1, Relation::LessThan)],
        );
        let (changed, d0) = revise(&n, VariableId(0), VariableId(1), n.domains()).unwrap();
        assert!(changed);
        assert_eq!(d0.values(), &[1]);
    }

    #[test]
    fn revise_keeps_supported_values() {
        let n = net(
            vec![Domain::range(1, 2), Domain::range(1, 2)],
            vec![(0, 1, Relation::NotEqual)],
        );
        let (changed, d0) = revise(&n, VariableId(0), VariableId(1), n.domains()).unwrap();
        assert!(!changed);
        assert_eq!(d0.values(), &[1, 2]);
    }

    #[test]
    fn revise_requires_an_arc() {
        let n = net(vec![Domain::range(1, 2), Domain::range(1, 2)], vec![]);
        let err = revise(&n, VariableId(0), VariableId(1), n.domains()).unwrap_err();
        assert_eq!(
            err,
            PropagationError::NoArc {
                xi: VariableId(0),
                xj: VariableId(1)
            }
        );
    }

    #[test]
    fn revise_conjoins_constraints_on_one_pair() {
        // x < y and |x - y| != 1 over {1..4}: x=1 needs y in {3,4}.
        let n = net(
            vec![Domain::range(1, 4), Domain::range(1, 4)],
            vec![
                (0, 1, Relation::LessThan),
                (0, 1, Relation::AbsDiffNotEqual { offset: 1 }),
            ],
        );
        let (changed, d0) = revise(&n, VariableId(0), VariableId(1), n.domains()).unwrap();
        assert!(changed);
        assert_eq!(d0.values(), &[1, 2]); // x=3 would need y>4
    }

    #[test]
    fn ac3_zero_constraints_is_identity() {
        let n = net(vec![Domain::range(1, 3); 3], vec![]);
        let res = ac3(&n, n.domains());
        assert!(!res.wipeout);
        assert!(res.removals.is_empty());
        assert_eq!(res.domains, n.domains());
    }

    #[test]
    fn ac3_chain_prunes_endpoints() {
        // x < y < z over {1,2,3}: x={1}, y={2}, z={3}.
        let n = net(
            vec![Domain::range(1, 3); 3],
            vec![(0, 1, Relation::LessThan), (1, 2, Relation::LessThan)],
        );
        let res = ac3(&n, n.domains());
        assert!(!res.wipeout);
        assert_eq!(res.domains[0].values(), &[1, 2]);
        assert_eq!(res.domains[1].values(), &[2]);
        assert_eq!(res.domains[2].values(), &[3]);
    }

    #[test]
    fn ac3_cycle_wipes_out() {
        // x < y, y < z, z < x admits no arc-consistent nonempty fixpoint.
        let n = net(
            vec![Domain::range(1, 3); 3],
            vec![
                (0, 1, Relation::LessThan),
                (1, 2, Relation::LessThan),
                (2, 0, Relation::LessThan),
            ],
        );
        let res = ac3(&n, n.domains());
        assert!(res.wipeout);
        assert!(res.domains.iter().all(Domain::is_empty));
        assert_eq!(res.removals.len(), 9);
    }

    #[test]
    fn removal_log_reconstructs_difference() {
        let n = net(
            vec![Domain::range(1, 3); 3],
            vec![(0, 1, Relation::LessThan), (1, 2, Relation::LessThan)],
        );
        let res = ac3(&n, n.domains());
        let before: usize = n.domains().iter().map(Domain::len).sum();
        let after: usize = res.domains.iter().map(Domain::len).sum();
        assert_eq!(res.removals.len(), before - after);
        let mut rebuilt = res.domains.clone();
        for &(var, value) in &res.removals {
            let mut vals: Vec<i64> = rebuilt[var.index()].iter().collect();
            vals.push(value);
            rebuilt[var.index()] = Domain::new(vals);
        }
        assert_eq!(&rebuilt, n.domains());
    }

    #[test]
    fn assign_and_propagate_checks_value() {
        let n = net(
            vec![Domain::range(1, 2), Domain::range(1, 2)],
            vec![(0, 1, Relation::NotEqual)],
        );
        let err = assign_and_propagate(&n, n.domains(), VariableId(0), 9).unwrap_err();
        assert_eq!(
            err,
            PropagationError::ValueNotInDomain {
                var: VariableId(0),
                value: 9
            }
        );
    }

    #[test]
    fn assign_and_propagate_not_equal() {
        let n = net(
            vec![Domain::range(1, 2), Domain::range(1, 2)],
            vec![(0, 1, Relation::NotEqual)],
        );
        let res = assign_and_propagate(&n, n.domains(), VariableId(0), 1).unwrap();
        assert!(!res.wipeout);
        assert_eq!(res.domains[1].values(), &[2]);
    }

    #[test]
    fn assign_and_propagate_chain() {
        let n = net(
            vec![Domain::range(1, 3); 3],
            vec![(0, 1, Relation::LessThan), (1, 2, Relation::LessThan)],
        );
        let res = assign_and_propagate(&n, n.domains(), VariableId(0), 1).unwrap();
        assert_eq!(res.domains[1].values(), &[2]);
        assert_eq!(res.domains[2].values(), &[3]);
    }

    #[test]
    fn assign_singleton_in_unconstrained_network_is_identity() {
        let n = net(vec![Domain::singleton(4), Domain::range(1, 2)], vec![]);
        let res = assign_and_propagate(&n, n.domains(), VariableId(0), 4).unwrap();
        assert_eq!(res.domains, n.domains());
        assert!(res.removals.is_empty());
    }
}
