//! The (γ, α)-resilient convex combination.
//!
//! An agent that sees `d` neighbor states (its own included), of which up to
//! `κ` may be Byzantine, picks a subset size `σ`. For every `σ`-subset `S`
//! of its neighborhood that contains itself it computes a point `φ_S`:
//! its own state if that already lies in the hull of `S \ {self}`, and
//! otherwise a point common to that hull and to the hulls of every
//! `(σ − κ)`-subset of `S` that contains itself. Any `σ − κ` members of `S`
//! that include the agent must contain at least `σ − 2κ` honest states, so
//! points common to all such hulls are honest combinations. The output is
//! the average of all `φ_S` and the agent's own state.
//!
//! With `s = C(d − 1, σ − 1)` subsets the result is certified to be a convex
//! combination of honest neighbors in which at least `γ = d − κ − σ + 2`
//! weights are at least `α = 1 / ((s + 1)(n + 1))`.

use thiserror::Error;

use crate::combinatorics::{binomial, Combinations};
use crate::geometry::simplex::{LinearProgram, LpStatus, Relation, SimplexOptions};
use crate::geometry::{self, ConvexWeights, GeometryError, Point, PointSet};
use crate::id::{format_set, AgentId};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ResilientError {
    #[error(
        "too few neighbors: d = {degree} but (n + 1)κ + 2 = {required} (n = {dim}, κ = {kappa})"
    )]
    TooFewNeighbors { degree: usize, required: usize, dim: usize, kappa: usize },
    #[error("σ = {sigma} outside [{low}, {high}]")]
    SigmaOutOfRange { sigma: usize, low: usize, high: usize },
    #[error("agent {0} is not among its own neighbor states")]
    MissingSelf(AgentId),
    #[error("subset {0:?} is not a valid neighbor subset containing the agent")]
    InvalidSubset(Vec<AgentId>),
    #[error("hull intersection for subset {} is empty", format_set(.subset))]
    EmptyIntersection { subset: Vec<AgentId> },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `σ = nκ + 2`, the subset size that maximizes `γ`.
pub fn default_sigma(dim: usize, kappa: usize) -> usize {
    dim * kappa + 2
}

/// Minimum neighborhood size `(n + 1)κ + 2` for which a combination exists.
pub fn required_degree(dim: usize, kappa: usize) -> usize {
    (dim + 1) * kappa + 2
}

/// What one agent sees in one round.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborObservation {
    self_id: AgentId,
    self_pos: usize,
    neighbors: PointSet,
    kappa: usize,
    sigma: usize,
}

impl NeighborObservation {
    /// Neighbor states are canonicalized by label order, so the listing order
    /// of `neighbors` never affects the result.
    pub fn new(
        self_id: AgentId,
        neighbors: PointSet,
        kappa: usize,
        sigma: usize,
    ) -> Result<Self, ResilientError> {
        let neighbors = neighbors.sorted_by_label();
        let self_pos = neighbors.position(self_id).ok_or(ResilientError::MissingSelf(self_id))?;
        let dim = neighbors.dim();
        let degree = neighbors.len();
        let required = required_degree(dim, kappa);
        if degree < required {
            return Err(ResilientError::TooFewNeighbors { degree, required, dim, kappa });
        }
        let (low, high) = (default_sigma(dim, kappa), degree - kappa);
        if sigma < low || sigma > high {
            return Err(ResilientError::SigmaOutOfRange { sigma, low, high });
        }
        Ok(NeighborObservation { self_id, self_pos, neighbors, kappa, sigma })
    }

    /// Uses `σ = nκ + 2`.
    pub fn with_default_sigma(
        self_id: AgentId,
        neighbors: PointSet,
        kappa: usize,
    ) -> Result<Self, ResilientError> {
        let sigma = default_sigma(neighbors.dim(), kappa);
        Self::new(self_id, neighbors, kappa, sigma)
    }

    pub fn self_id(&self) -> AgentId {
        self.self_id
    }

    pub fn self_state(&self) -> &Point {
        &self.neighbors.points()[self.self_pos]
    }

    pub fn neighbors(&self) -> &PointSet {
        &self.neighbors
    }

    pub fn dim(&self) -> usize {
        self.neighbors.dim()
    }

    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    /// `s = C(d − 1, σ − 1)`.
    pub fn subset_count(&self) -> Result<u64, ResilientError> {
        binomial(self.degree() as u64 - 1, self.sigma as u64 - 1)
            .ok_or(ResilientError::Overflow("subset count"))
    }

    pub fn gamma(&self) -> usize {
        self.degree() - self.kappa - self.sigma + 2
    }

    pub fn alpha(&self) -> Result<f64, ResilientError> {
        Ok(1.0 / ((self.subset_count()? as f64 + 1.0) * (self.dim() as f64 + 1.0)))
    }

    fn label(&self, pos: usize) -> AgentId {
        self.neighbors.labels()[pos]
    }

    fn labels(&self, positions: &[usize]) -> Vec<AgentId> {
        positions.iter().map(|&p| self.label(p)).collect()
    }

    fn coords(&self, pos: usize) -> &[f64] {
        self.neighbors.points()[pos].coords()
    }

    /// Positions of all `σ`-subsets containing the agent, lexicographic.
    fn s_positions(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let others: Vec<usize> = (0..self.degree()).filter(|&p| p != self.self_pos).collect();
        Combinations::new(others.len(), self.sigma - 1)
            .map(move |pick| insert_sorted(pick.iter().map(|&k| others[k]), self.self_pos))
    }

    fn positions_of(&self, subset: &[AgentId]) -> Result<Vec<usize>, ResilientError> {
        let mut pos = subset
            .iter()
            .map(|&id| self.neighbors.position(id))
            .collect::<Option<Vec<usize>>>()
            .ok_or_else(|| ResilientError::InvalidSubset(subset.to_vec()))?;
        pos.sort_unstable();
        pos.dedup();
        if pos.len() != subset.len() || !pos.contains(&self.self_pos) {
            return Err(ResilientError::InvalidSubset(subset.to_vec()));
        }
        Ok(pos)
    }
}

/// Inserts `extra` into an already sorted stream, keeping order.
fn insert_sorted(items: impl Iterator<Item = usize>, extra: usize) -> Vec<usize> {
    let mut out: Vec<usize> = items.collect();
    let at = out.partition_point(|&v| v < extra);
    out.insert(at, extra);
    out
}

/// All `σ`-subsets of the neighborhood that contain the agent, in
/// lexicographic order of their sorted ids.
pub fn enumerate_s_subsets(obs: &NeighborObservation) -> Vec<Vec<AgentId>> {
    obs.s_positions().map(|pos| obs.labels(&pos)).collect()
}

/// All `(|S| − κ)`-subsets of `s_subset` that contain `self_id`, in
/// lexicographic order.
pub fn enumerate_b_subsets(
    s_subset: &[AgentId],
    self_id: AgentId,
    kappa: usize,
) -> Result<Vec<Vec<AgentId>>, ResilientError> {
    let mut sorted = s_subset.to_vec();
    sorted.sort_unstable();
    if !sorted.contains(&self_id) || kappa + 1 > sorted.len() {
        return Err(ResilientError::InvalidSubset(s_subset.to_vec()));
    }
    let others: Vec<AgentId> = sorted.iter().copied().filter(|&id| id != self_id).collect();
    Ok(Combinations::new(others.len(), others.len() - kappa)
        .map(|pick| {
            let mut b: Vec<AgentId> = pick.iter().map(|&k| others[k]).collect();
            let at = b.partition_point(|&v| v < self_id);
            b.insert(at, self_id);
            b
        })
        .collect())
}

/// φ for one subset, with the weights over `S \ {self}` when the LP ran.
struct Phi {
    point: Vec<f64>,
    hat: Vec<usize>,
    lambda: Option<Vec<f64>>,
}

fn phi_for(obs: &NeighborObservation, s_pos: &[usize], tol: f64) -> Result<Phi, ResilientError> {
    let hat: Vec<usize> = s_pos.iter().copied().filter(|&p| p != obs.self_pos).collect();
    let x_self = obs.coords(obs.self_pos);
    let hat_coords: Vec<&[f64]> = hat.iter().map(|&p| obs.coords(p)).collect();
    let planar = obs.dim() == 2;
    let planar_distance =
        if planar { geometry::planar::hull_distance(x_self, &hat_coords) } else { None };
    let self_in_hull = match planar_distance {
        Some(d) => d <= tol,
        None => geometry::hull::contains_slices(x_self, &hat_coords, tol)?,
    };
    if self_in_hull {
        return Ok(Phi { point: x_self.to_vec(), hat, lambda: None });
    }

    let keep = hat.len() - obs.kappa;
    // B-sets laid end to end, `keep + 1` generators each, in sorted position order.
    let mut b_flat: Vec<&[f64]> = Vec::new();
    for pick in Combinations::new(hat.len(), keep) {
        let mut own = Some(obs.self_pos);
        for p in pick.iter().map(|&k| hat[k]) {
            if let Some(s) = own.filter(|&s| s < p) {
                b_flat.push(obs.coords(s));
                own = None;
            }
            b_flat.push(obs.coords(p));
        }
        if let Some(s) = own {
            b_flat.push(obs.coords(s));
        }
    }
    let mut polytopes: Vec<&[&[f64]]> = Vec::with_capacity(b_flat.len() / (keep + 1) + 1);
    polytopes.push(&hat_coords);
    polytopes.extend(b_flat.chunks(keep + 1));

    if planar {
        if let Some((point, lambda)) = geometry::planar::intersection_point(&polytopes, tol) {
            return Ok(Phi { point, hat, lambda: Some(lambda) });
        }
    }
    match geometry::hull::intersection_slices(&polytopes, obs.dim(), tol)? {
        Some((point, mut weights)) => {
            let lambda = weights.swap_remove(0);
            Ok(Phi { point, hat, lambda: Some(lambda) })
        }
        None => Err(ResilientError::EmptyIntersection { subset: obs.labels(s_pos) }),
    }
}

/// φ for the subset `s_subset` (ids, must contain the agent and have size σ).
pub fn compute_phi(
    obs: &NeighborObservation,
    s_subset: &[AgentId],
    tol: f64,
) -> Result<Point, ResilientError> {
    let pos = obs.positions_of(s_subset)?;
    if pos.len() != obs.sigma {
        return Err(ResilientError::InvalidSubset(s_subset.to_vec()));
    }
    Ok(Point::from(phi_for(obs, &pos, tol)?.point))
}

/// Output of the resilient combination for one agent.
#[derive(Clone, Debug, PartialEq)]
pub struct ResilientCombination {
    pub value: Point,
    pub gamma: usize,
    pub alpha: f64,
    /// One φ per subset, in enumeration order.
    pub phis: Vec<Point>,
    pub subset_count: usize,
    /// The weights the computation itself placed on each observed state
    /// (aligned with the canonical neighbor order). These may touch
    /// Byzantine states; the certified honest weights are a different
    /// representation of the same point, see [`recover_weights`].
    pub weights: ConvexWeights,
}

pub fn resilient_combination(
    obs: &NeighborObservation,
    tol: f64,
) -> Result<ResilientCombination, ResilientError> {
    let s = obs.subset_count()?;
    let s = usize::try_from(s).map_err(|_| ResilientError::Overflow("subset count"))?;
    let dim = obs.dim();
    let mut sum = obs.coords(obs.self_pos).to_vec();
    let mut weights = vec![0.0; obs.degree()];
    weights[obs.self_pos] = 1.0;
    let mut phis = Vec::with_capacity(s);
    for s_pos in obs.s_positions() {
        let phi = phi_for(obs, &s_pos, tol)?;
        for (acc, v) in sum.iter_mut().zip(&phi.point) {
            *acc += v;
        }
        match &phi.lambda {
            None => weights[obs.self_pos] += 1.0,
            Some(lambda) => {
                for (&p, &l) in phi.hat.iter().zip(lambda) {
                    weights[p] += l;
                }
            }
        }
        phis.push(Point::from(phi.point));
    }
    let denom = s as f64 + 1.0;
    sum.iter_mut().for_each(|v| *v /= denom);
    weights.iter_mut().for_each(|v| *v /= denom);
    debug_assert_eq!(sum.len(), dim);
    Ok(ResilientCombination {
        value: Point::from(sum),
        gamma: obs.gamma(),
        alpha: obs.alpha()?,
        phis,
        subset_count: s,
        weights: ConvexWeights::from_raw(weights),
    })
}

/// One subset's worth of work, for walkthrough output.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetTrace {
    pub s_subset: Vec<AgentId>,
    /// True when the agent's own state was already in the hull of the others.
    pub self_in_hull: bool,
    /// Only enumerated when the intersection step actually ran.
    pub b_subsets: Vec<Vec<AgentId>>,
    pub phi: Point,
}

pub fn trace_combination(
    obs: &NeighborObservation,
    tol: f64,
) -> Result<Vec<SubsetTrace>, ResilientError> {
    obs.s_positions()
        .map(|s_pos| {
            let phi = phi_for(obs, &s_pos, tol)?;
            let s_subset = obs.labels(&s_pos);
            let self_in_hull = phi.lambda.is_none();
            let b_subsets = if self_in_hull {
                Vec::new()
            } else {
                enumerate_b_subsets(&s_subset, obs.self_id, obs.kappa)?
            };
            Ok(SubsetTrace { s_subset, self_in_hull, b_subsets, phi: Point::from(phi.point) })
        })
        .collect()
}

/// Searches for convex weights over `normals` that reproduce `v` and put at
/// least `alpha − tol` on at least `gamma` entries.
///
/// Each `gamma`-subset of `normals` is tried in lexicographic order as the
/// heavy support; the LP lower-bounds those weights and minimizes the mass
/// outside the support, so the first hit is also a sparse representation.
pub fn recover_weights(
    v: &Point,
    normals: &PointSet,
    gamma: usize,
    alpha: f64,
    tol: f64,
) -> Result<Option<ConvexWeights>, GeometryError> {
    if v.dim() != normals.dim() {
        return Err(GeometryError::DimensionMismatch { expected: normals.dim(), found: v.dim() });
    }
    let k = normals.len();
    if gamma > k {
        return Ok(None);
    }
    let lower = (alpha - tol).max(0.0);
    if gamma as f64 * lower > 1.0 + tol {
        return Ok(None);
    }
    let gens = normals.coord_slices();
    let dim = v.dim();
    let opts = SimplexOptions { feas_tol: tol, ..Default::default() };
    for support in Combinations::new(k, gamma) {
        let mut lb = vec![0.0; k];
        for &j in &support {
            lb[j] = lower;
        }
        let mass = 1.0 - lb.iter().sum::<f64>();
        if mass < -tol {
            continue;
        }
        let mut lp = LinearProgram::new(k);
        let mut cost = vec![1.0; k];
        for &j in &support {
            cost[j] = 0.0;
        }
        lp.set_objective(&cost);
        lp.add_row(&vec![1.0; k], Relation::Eq, mass.max(0.0));
        let shifted = geometry::combine(&lb, &gens);
        let mut row = vec![0.0; k];
        for c in 0..dim {
            for (j, g) in gens.iter().enumerate() {
                row[j] = g[c];
            }
            lp.add_row(&row, Relation::Eq, v[c] - shifted[c]);
        }
        if let LpStatus::Optimal(sol) = lp.solve(&opts)? {
            let w: Vec<f64> = sol.x.iter().zip(&lb).map(|(u, l)| u + l).collect();
            return Ok(Some(ConvexWeights::from_raw(w)));
        }
    }
    Ok(None)
}

/// Counting model of the per-agent LP workload.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityEstimate {
    /// Subsets `s = C(d − 1, σ − 1)`.
    pub subsets: u64,
    /// B-sets per subset, `b = C(σ − 1, κ)`.
    pub b_sets: u64,
    /// LP variables `b(σ − κ) + (σ − 1)`.
    pub d_v: u64,
    /// Non-zeros of the constraint matrix `2 d_v + n b ((σ − κ) + (σ − 1))`.
    pub nz_w: u64,
    /// `(nz_w + d_v²) √d_v`.
    pub lp_cost: f64,
    /// `s · lp_cost`.
    pub total_cost: f64,
}

pub fn complexity_estimate(
    dim: usize,
    kappa: usize,
    degree: usize,
    sigma: usize,
) -> Result<ComplexityEstimate, ResilientError> {
    let (low, high) = (default_sigma(dim, kappa), degree.saturating_sub(kappa));
    if sigma < low || sigma > high {
        return Err(ResilientError::SigmaOutOfRange { sigma, low, high });
    }
    let (n, k, d, sg) = (dim as u64, kappa as u64, degree as u64, sigma as u64);
    let overflow = |what| ResilientError::Overflow(what);
    let b = binomial(sg - 1, k).ok_or(overflow("b"))?;
    let b_size = sg - k;
    let hat_size = sg - 1;
    let d_v = b.checked_mul(b_size).and_then(|x| x.checked_add(hat_size)).ok_or(overflow("d_v"))?;
    let nz_w = d_v
        .checked_mul(2)
        .and_then(|x| {
            n.checked_mul(b)
                .and_then(|y| y.checked_mul(b_size + hat_size))
                .and_then(|y| x.checked_add(y))
        })
        .ok_or(overflow("nz_w"))?;
    let subsets = binomial(d - 1, sg - 1).ok_or(overflow("s"))?;
    let dv = d_v as f64;
    let lp_cost = (nz_w as f64 + dv * dv) * dv.sqrt();
    Ok(ComplexityEstimate {
        subsets,
        b_sets: b,
        d_v,
        nz_w,
        lp_cost,
        total_cost: subsets as f64 * lp_cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hull_contains;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn ids(v: &[usize]) -> Vec<AgentId> {
        v.iter().map(|&i| AgentId(i)).collect()
    }

    fn obs_from(rows: &[&[f64]], kappa: usize, sigma: usize) -> NeighborObservation {
        NeighborObservation::new(AgentId(1), PointSet::from_coords(rows).unwrap(), kappa, sigma)
            .unwrap()
    }

    /// Six planar states in the spirit of the walkthrough figure: agent 1 sits
    /// outside the hull of agents 2..5.
    fn walkthrough() -> NeighborObservation {
        obs_from(
            &[&[0.0, 0.0], &[2.0, 0.5], &[3.0, 2.0], &[1.5, 3.0], &[3.5, -1.0], &[-1.0, 2.5]],
            1,
            5,
        )
    }

    #[test]
    fn s_subsets_of_walkthrough() {
        let obs = walkthrough();
        let subsets = enumerate_s_subsets(&obs);
        assert_eq!(subsets.len(), 5);
        assert_eq!(subsets[0], ids(&[1, 2, 3, 4, 5]));
        assert_eq!(subsets[1], ids(&[1, 2, 3, 4, 6]));
        assert!(subsets.iter().all(|s| s.contains(&AgentId(1)) && s.len() == 5));
    }

    #[test]
    fn sigma_equal_to_degree_gives_one_subset() {
        let obs = obs_from(&[&[0.0], &[1.0], &[2.0], &[3.0]], 0, 4);
        assert_eq!(enumerate_s_subsets(&obs), vec![ids(&[1, 2, 3, 4])]);
    }

    #[test]
    fn ten_subsets_for_six_neighbors_and_sigma_four() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let obs = obs_from(&refs, 1, 4);
        assert_eq!(enumerate_s_subsets(&obs).len(), 10);
        assert_eq!(obs.gamma(), 3);
        assert!((obs.alpha().unwrap() - 1.0 / 33.0).abs() < 1e-15);
    }

    #[test]
    fn b_subsets_of_walkthrough() {
        let b = enumerate_b_subsets(&ids(&[1, 2, 3, 4, 5]), AgentId(1), 1).unwrap();
        let mut want =
            vec![ids(&[1, 2, 3, 4]), ids(&[1, 3, 4, 5]), ids(&[1, 2, 4, 5]), ids(&[1, 2, 3, 5])];
        want.sort();
        assert_eq!(b, want);
    }

    #[test]
    fn b_subsets_without_byzantine_is_the_subset_itself() {
        let s = ids(&[2, 4, 7]);
        assert_eq!(enumerate_b_subsets(&s, AgentId(4), 0).unwrap(), vec![s]);
    }

    #[test]
    fn b_subsets_count_for_maximal_kappa() {
        for sigma in 3..8 {
            let s: Vec<AgentId> = (1..=sigma).map(AgentId).collect();
            let b = enumerate_b_subsets(&s, AgentId(1), sigma - 2).unwrap();
            assert_eq!(b.len(), sigma - 1);
            assert!(b.iter().all(|set| set.len() == 2 && set[0] == AgentId(1)));
        }
    }

    #[test]
    fn b_subsets_reject_missing_self() {
        assert!(enumerate_b_subsets(&ids(&[2, 3]), AgentId(1), 0).is_err());
    }

    #[test]
    fn identical_states_give_identical_phi() {
        let row: &[f64] = &[0.5, -0.5];
        let obs = obs_from(&[row; 6], 1, 4);
        for s in enumerate_s_subsets(&obs) {
            assert_eq!(compute_phi(&obs, &s, TOL).unwrap().coords(), &[0.5, -0.5]);
        }
        let out = resilient_combination(&obs, TOL).unwrap();
        assert_eq!(out.value.coords(), &[0.5, -0.5]);
    }

    #[test]
    fn walkthrough_phi_lies_in_every_hull() {
        let obs = walkthrough();
        let s = ids(&[1, 2, 3, 4, 5]);
        let hat =
            PointSet::from_coords(&[&[2.0, 0.5], &[3.0, 2.0], &[1.5, 3.0], &[3.5, -1.0]]).unwrap();
        assert!(!hull_contains(obs.self_state(), &hat, TOL).unwrap());
        let phi = compute_phi(&obs, &s, TOL).unwrap();
        assert!(hull_contains(&phi, &hat, 1e-8).unwrap());
        for b in enumerate_b_subsets(&s, AgentId(1), 1).unwrap() {
            let pts: Vec<Point> =
                b.iter().map(|&id| obs.neighbors().get(id).unwrap().clone()).collect();
            let set = PointSet::new(pts, b.clone()).unwrap();
            assert!(hull_contains(&phi, &set, 1e-8).unwrap(), "φ outside H({b:?})");
        }
    }

    #[test]
    fn one_dimensional_phi_inside_interval_oracle() {
        // States 0 (self), 2, 3, 5, 7 with κ = 1, σ = 3.
        let vals = [0.0, 2.0, 3.0, 5.0, 7.0];
        let rows: Vec<Vec<f64>> = vals.iter().map(|&v| vec![v]).collect();
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let obs = obs_from(&refs, 1, 3);
        for s in enumerate_s_subsets(&obs) {
            let phi = compute_phi(&obs, &s, TOL).unwrap()[0];
            let val = |id: AgentId| vals[id.index()];
            let hat: Vec<f64> =
                s.iter().filter(|&&id| id != AgentId(1)).map(|&id| val(id)).collect();
            let in_hat = hat.iter().cloned().fold(f64::INFINITY, f64::min) <= 0.0
                && 0.0 <= hat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if in_hat {
                assert_eq!(phi, 0.0);
                continue;
            }
            let mut lo = hat.iter().cloned().fold(f64::INFINITY, f64::min);
            let mut hi = hat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for b in enumerate_b_subsets(&s, AgentId(1), 1).unwrap() {
                let bv: Vec<f64> = b.iter().map(|&id| val(id)).collect();
                lo = lo.max(bv.iter().cloned().fold(f64::INFINITY, f64::min));
                hi = hi.min(bv.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
            }
            assert!(lo <= hi + 1e-12, "oracle interval empty for {s:?}");
            assert!(phi >= lo - 1e-9 && phi <= hi + 1e-9, "φ = {phi} outside [{lo}, {hi}]");
        }
    }

    #[test]
    fn observation_validation() {
        let set =
            PointSet::from_coords(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]).unwrap();
        // (n + 1)κ + 2 = 5 > 4.
        assert!(matches!(
            NeighborObservation::new(AgentId(1), set.clone(), 1, 4),
            Err(ResilientError::TooFewNeighbors { required: 5, .. })
        ));
        assert!(matches!(
            NeighborObservation::new(AgentId(1), set.clone(), 0, 1),
            Err(ResilientError::SigmaOutOfRange { .. })
        ));
        assert!(matches!(
            NeighborObservation::new(AgentId(9), set, 0, 2),
            Err(ResilientError::MissingSelf(_))
        ));
    }

    #[test]
    fn recover_weights_examples() {
        let gens = PointSet::from_coords(&[&[0.0, 0.0], &[3.0, 0.0], &[0.0, 3.0]]).unwrap();
        let w =
            recover_weights(&Point::from(vec![0.0, 0.0]), &gens, 1, 1.0, 1e-9).unwrap().unwrap();
        assert!((w.as_slice()[0] - 1.0).abs() < 1e-9);
        let w = recover_weights(&Point::from(vec![1.0, 1.0]), &gens, 3, 1.0 / 3.0, 1e-9)
            .unwrap()
            .unwrap();
        for &x in w.as_slice() {
            assert!((x - 1.0 / 3.0).abs() < 1e-8);
        }
        // A vertex cannot carry three weights of 1/3.
        assert!(recover_weights(&Point::from(vec![0.0, 0.0]), &gens, 3, 1.0 / 3.0, 1e-9)
            .unwrap()
            .is_none());
    }

    #[test]
    fn complexity_examples() {
        let e = complexity_estimate(1, 0, 2, 2).unwrap();
        assert_eq!(e.d_v, 3);
        let e = complexity_estimate(2, 1, 6, 4).unwrap();
        assert_eq!(e.d_v, 12);
        assert_eq!(e.subsets, 10);
        assert_eq!(e.nz_w, 2 * 12 + 2 * 3 * (3 + 3));
        assert!((e.total_cost - 10.0 * e.lp_cost).abs() < 1e-9);
        assert!(complexity_estimate(2, 1, 6, 3).is_err());
    }

    fn random_instance(rng: &mut ChaCha8Rng) -> (NeighborObservation, PointSet) {
        let n = rng.random_range(1..=2);
        let kappa = rng.random_range(0..=1);
        let d = required_degree(n, kappa) + rng.random_range(0..=2);
        let honest = d - kappa;
        let mut points = Vec::new();
        for _ in 0..honest {
            points
                .push(Point::from((0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>()));
        }
        for _ in 0..kappa {
            points
                .push(Point::from((0..n).map(|_| rng.random_range(5.0..9.0)).collect::<Vec<_>>()));
        }
        let all = PointSet::from_points(points.clone()).unwrap();
        let normals = PointSet::from_points(points[..honest].to_vec()).unwrap();
        (NeighborObservation::with_default_sigma(AgentId(1), all, kappa).unwrap(), normals)
    }

    #[test]
    fn planted_adversary_combination_is_honest_and_certified() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..60 {
            let (obs, normals) = random_instance(&mut rng);
            let out = resilient_combination(&obs, TOL).unwrap();
            assert!(hull_contains(&out.value, &normals, 1e-7).unwrap());
            let w = recover_weights(&out.value, &normals, out.gamma, out.alpha, 1e-7).unwrap();
            let w = w.expect("certified weights must exist");
            let heavy = w.as_slice().iter().filter(|&&x| x >= out.alpha - 1e-7).count();
            assert!(heavy >= out.gamma);
            let back = w.recombine(&normals).unwrap();
            assert!(back.distance_inf(&out.value) < 1e-6);
        }
    }

    #[test]
    fn algorithm_weights_reproduce_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (obs, _) = random_instance(&mut rng);
            let out = resilient_combination(&obs, TOL).unwrap();
            let back = out.weights.recombine(obs.neighbors()).unwrap();
            assert!(back.distance_inf(&out.value) < 1e-8);
            assert!((out.weights.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn combination_is_deterministic_and_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let (obs, _) = random_instance(&mut rng);
            let a = resilient_combination(&obs, TOL).unwrap();
            let b = resilient_combination(&obs, TOL).unwrap();
            assert_eq!(a, b);
            // Same labelled states listed in reverse order.
            let set = obs.neighbors();
            let mut pts = set.points().to_vec();
            let mut labels = set.labels().to_vec();
            pts.reverse();
            labels.reverse();
            let shuffled = NeighborObservation::new(
                obs.self_id(),
                PointSet::new(pts, labels).unwrap(),
                obs.kappa(),
                obs.sigma(),
            )
            .unwrap();
            assert_eq!(resilient_combination(&shuffled, TOL).unwrap().value, a.value);
        }
    }

    #[test]
    fn trace_lists_b_subsets_when_intersection_runs() {
        let obs = walkthrough();
        let trace = trace_combination(&obs, TOL).unwrap();
        assert_eq!(trace.len(), 5);
        let first = &trace[0];
        assert_eq!(first.s_subset, ids(&[1, 2, 3, 4, 5]));
        assert!(!first.self_in_hull);
        assert_eq!(first.b_subsets.len(), 4);
        let direct = resilient_combination(&obs, TOL).unwrap();
        assert_eq!(trace.iter().map(|t| t.phi.clone()).collect::<Vec<_>>(), direct.phis);
    }
}
