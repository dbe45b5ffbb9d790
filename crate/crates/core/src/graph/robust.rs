//! Exhaustive redundancy checks: r-reachability, r-robustness and the
//! complete-core sufficient condition for a persistent large root component.

use super::{GraphError, Topology};
use crate::id::AgentId;

/// Largest agent count `is_r_robust` will enumerate (3^m subset pairs).
pub const ROBUST_EXHAUSTIVE_BOUND: usize = 10;
/// Largest number of agents outside the complete core that
/// `check_corollary1` will enumerate subsets of.
pub const COROLLARY1_OUTSIDE_BOUND: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Two disjoint non-empty sets, neither r-reachable.
    Pair(Vec<AgentId>, Vec<AgentId>),
    /// A set that is not r-reachable.
    Subset(Vec<AgentId>),
    /// The core has `found` agents but needs `required`.
    CoreSize { found: usize, required: usize },
    /// `from` does not send to `to` although both are in the core.
    MissingEdge { from: AgentId, to: AgentId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RobustnessCertificate {
    pub verdict: bool,
    /// Present exactly when `verdict` is false.
    pub witness: Option<Witness>,
    /// `f − nκ̄` for a passing core check.
    pub phi: Option<usize>,
}

impl RobustnessCertificate {
    fn pass(phi: Option<usize>) -> Self {
        RobustnessCertificate { verdict: true, witness: None, phi }
    }

    fn fail(witness: Witness) -> Self {
        RobustnessCertificate { verdict: false, witness: Some(witness), phi: None }
    }
}

fn mask_ids(mask: u64) -> Vec<AgentId> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(AgentId::from_index).collect()
}

fn reachable_mask(in_masks: &[u64], set: u64, r: usize) -> bool {
    let mut rest = set;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if (in_masks[i] & !set).count_ones() as usize >= r {
            return true;
        }
    }
    false
}

/// Some member of `subset` has at least `r` in-neighbors outside it.
pub fn is_r_reachable(g: &Topology, subset: &[AgentId], r: usize) -> bool {
    subset
        .iter()
        .any(|&i| g.in_neighbors(i).iter().filter(|j| **j != i && !subset.contains(j)).count() >= r)
}

/// Checks every pair of disjoint non-empty agent sets. The witness is the
/// first violating pair in increasing order of the first set's bitmask.
pub fn is_r_robust(g: &Topology, r: usize) -> Result<RobustnessCertificate, GraphError> {
    let m = g.m();
    if m > ROBUST_EXHAUSTIVE_BOUND {
        return Err(GraphError::Capacity { size: m, bound: ROBUST_EXHAUSTIVE_BOUND });
    }
    let masks = g.in_masks();
    let full: u64 = (1 << m) - 1;
    let reach: Vec<bool> = (0..=full).map(|s| reachable_mask(&masks, s, r)).collect();
    for a in 1..=full {
        if reach[a as usize] {
            continue;
        }
        let rest = full & !a;
        // Non-empty submasks of the complement.
        let mut b = rest;
        while b != 0 {
            if !reach[b as usize] {
                return Ok(RobustnessCertificate::fail(Witness::Pair(mask_ids(a), mask_ids(b))));
            }
            b = (b - 1) & rest;
        }
    }
    Ok(RobustnessCertificate::pass(None))
}

/// Sufficient condition for a root component of at least `f − nκ̄` agents
/// after each agent discards up to `nκ̄` in-edges: a complete core `F` with
/// `f ≥ 2nκ̄ + 1`, and every non-empty set outside it `(nκ̄ + 1)`-reachable.
pub fn check_corollary1(
    g: &Topology,
    n: usize,
    kappa_bar: usize,
    f_set: &[AgentId],
) -> Result<RobustnessCertificate, GraphError> {
    let m = g.m();
    let mut core = f_set.to_vec();
    core.sort_unstable();
    core.dedup();
    if core.len() != f_set.len() || core.iter().any(|id| id.0 == 0 || id.0 > m) {
        return Err(GraphError::InvalidInput(format!("core must be distinct ids in 1..={m}")));
    }
    let outside: Vec<usize> =
        (0..m).filter(|&k| core.binary_search(&AgentId::from_index(k)).is_err()).collect();
    if outside.len() > COROLLARY1_OUTSIDE_BOUND {
        return Err(GraphError::Capacity { size: outside.len(), bound: COROLLARY1_OUTSIDE_BOUND });
    }
    if m > 64 {
        return Err(GraphError::Capacity { size: m, bound: 64 });
    }
    let f = core.len();
    let required = 2 * n * kappa_bar + 1;
    if f < required {
        return Ok(RobustnessCertificate::fail(Witness::CoreSize { found: f, required }));
    }
    for &to in &core {
        for &from in &core {
            if !g.has_edge(from, to) {
                return Ok(RobustnessCertificate::fail(Witness::MissingEdge { from, to }));
            }
        }
    }
    let masks = g.in_masks();
    let r = n * kappa_bar + 1;
    for pick in 1u64..(1u64 << outside.len()) {
        let set = outside
            .iter()
            .enumerate()
            .filter(|(b, _)| pick >> b & 1 == 1)
            .fold(0u64, |acc, (_, &k)| acc | 1 << k);
        if !reachable_mask(&masks, set, r) {
            return Ok(RobustnessCertificate::fail(Witness::Subset(mask_ids(set))));
        }
    }
    Ok(RobustnessCertificate::pass(Some(f - n * kappa_bar)))
}
