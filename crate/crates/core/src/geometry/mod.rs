//! Convex geometry primitives: hull membership, feasibility over hull
//! intersections, Carathéodory reduction and Euclidean projections.
//!
//! Every decision here is taken against an explicit tolerance. Membership
//! within `tol` counts as inside, so callers branching on a membership test
//! behave deterministically near boundaries.

pub(crate) mod hull;
pub(crate) mod planar;
mod projection;
pub mod simplex;

pub use hull::{
    caratheodory_decompose, feasible_point_in_intersection, hull_contains, hull_residual,
    IntersectionPoint,
};
pub use projection::{project, DYKSTRA_MAX_ITER, DYKSTRA_TOL};

use std::ops::Deref;

use thiserror::Error;

use crate::id::AgentId;

/// Default feasibility tolerance for LP-backed geometry decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("LP solver did not terminate after {iterations} pivots")]
    Solver { iterations: usize },
    #[error("point is not in the convex hull of the generators (residual {residual:e})")]
    NotInHull { residual: f64 },
    #[error("projection did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize, last: Point },
}

/// A point in R^n with finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() {
            return Err(GeometryError::InvalidInput("point must have n >= 1".into()));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(GeometryError::InvalidInput(format!("non-finite coordinate {c}")));
        }
        Ok(Point { coords })
    }

    pub fn zeros(dim: usize) -> Self {
        Point { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        distance(&self.coords, &other.coords)
    }

    pub fn distance_inf(&self, other: &Point) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

impl From<Vec<f64>> for Point {
    /// Unchecked conversion; debug builds still assert finiteness.
    fn from(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Point { coords }
    }
}

impl From<&[f64]> for Point {
    fn from(coords: &[f64]) -> Self {
        Point::from(coords.to_vec())
    }
}

/// An ordered, labelled collection of same-dimension points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    labels: Vec<AgentId>,
}

impl PointSet {
    pub fn new(points: Vec<Point>, labels: Vec<AgentId>) -> Result<Self, GeometryError> {
        if points.is_empty() {
            return Err(GeometryError::InvalidInput("point set must be non-empty".into()));
        }
        if points.len() != labels.len() {
            return Err(GeometryError::InvalidInput(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let dim = points[0].dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(GeometryError::DimensionMismatch { expected: dim, found: p.dim() });
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeometryError::InvalidInput(format!("duplicate label {}", w[0])));
        }
        Ok(PointSet { points, labels })
    }

    /// Labels the points `1..=k` in order.
    pub fn from_points(points: Vec<Point>) -> Result<Self, GeometryError> {
        let labels = (0..points.len()).map(AgentId::from_index).collect();
        Self::new(points, labels)
    }

    pub fn from_coords(rows: &[&[f64]]) -> Result<Self, GeometryError> {
        let points = rows.iter().map(|r| Point::new(r.to_vec())).collect::<Result<Vec<_>, _>>()?;
        Self::from_points(points)
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> &[AgentId] {
        &self.labels
    }

    pub fn position(&self, label: AgentId) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn get(&self, label: AgentId) -> Option<&Point> {
        self.position(label).map(|i| &self.points[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentId, &Point)> {
        self.labels.iter().copied().zip(self.points.iter())
    }

    /// Sorts entries by label, keeping each point with its label.
    pub fn sorted_by_label(mut self) -> Self {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.labels[i]);
        let points = order.iter().map(|&i| std::mem::replace(&mut self.points[i], Point::zeros(1)));
        let points: Vec<Point> = points.collect();
        let labels = order.iter().map(|&i| self.labels[i]).collect();
        PointSet { points, labels }
    }

    pub(crate) fn coord_slices(&self) -> Vec<&[f64]> {
        self.points.iter().map(|p| p.coords()).collect()
    }
}

/// Convex weights aligned with a [`PointSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexWeights {
    weights: Vec<f64>,
}

impl ConvexWeights {
    /// Validates non-negativity and unit sum within `tol`.
    pub fn new(weights: Vec<f64>, tol: f64) -> Result<Self, GeometryError> {
        if weights.is_empty() {
            return Err(GeometryError::InvalidInput("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -tol) {
            return Err(GeometryError::InvalidInput(format!("weight {w} is negative")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol * weights.len() as f64 {
            return Err(GeometryError::InvalidInput(format!("weights sum to {sum}")));
        }
        Ok(ConvexWeights { weights })
    }

    /// Unit weight on `index` out of `len`.
    pub fn vertex(len: usize, index: usize) -> Self {
        let mut weights = vec![0.0; len];
        weights[index] = 1.0;
        ConvexWeights { weights }
    }

    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        ConvexWeights { weights }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support_size(&self, threshold: f64) -> usize {
        self.weights.iter().filter(|&&w| w > threshold).count()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Σ w_j · gens_j.
    pub fn recombine(&self, gens: &PointSet) -> Result<Point, GeometryError> {
        if gens.len() != self.weights.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: gens.len(),
                found: self.weights.len(),
            });
        }
        Ok(Point::from(combine(&self.weights, &gens.coord_slices())))
    }
}

/// A convex constraint set with an exact or iterative projection.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintSet {
    WholeSpace,
    /// `{x : normal · x >= offset}`.
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    Intersection(Vec<ConstraintSet>),
}

impl ConstraintSet {
    pub fn halfspace(normal: Vec<f64>, offset: f64) -> Result<Self, GeometryError> {
        if normal.iter().any(|c| !c.is_finite()) || !offset.is_finite() {
            return Err(GeometryError::InvalidInput("non-finite halfspace".into()));
        }
        if norm(&normal) == 0.0 {
            return Err(GeometryError::InvalidInput("halfspace normal is zero".into()));
        }
        Ok(ConstraintSet::Halfspace { normal, offset })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidInput(format!("ball radius {radius}")));
        }
        Ok(ConstraintSet::Ball { center, radius })
    }

    pub fn intersection(sets: Vec<ConstraintSet>) -> Result<Self, GeometryError> {
        if sets.is_empty() {
            return Err(GeometryError::InvalidInput("empty intersection".into()));
        }
        Ok(ConstraintSet::Intersection(sets))
    }

    /// Dimension the set is pinned to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ConstraintSet::WholeSpace => None,
            ConstraintSet::Halfspace { normal, .. } => Some(normal.len()),
            ConstraintSet::Ball { center, .. } => Some(center.dim()),
            ConstraintSet::Intersection(sets) => sets.iter().find_map(|s| s.dim()),
        }
    }

    pub fn validate_dim(&self, dim: usize) -> Result<(), GeometryError> {
        match self {
            ConstraintSet::WholeSpace => Ok(()),
            ConstraintSet::Intersection(sets) => {
                if sets.is_empty() {
                    return Err(GeometryError::InvalidInput("empty intersection".into()));
                }
                sets.iter().try_for_each(|s| s.validate_dim(dim))
            }
            other => match other.dim() {
                Some(d) if d != dim => {
                    Err(GeometryError::DimensionMismatch { expected: dim, found: d })
                }
                _ => Ok(()),
            },
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            ConstraintSet::WholeSpace => true,
            ConstraintSet::Halfspace { normal, offset } => {
                dot(normal, x) >= offset - tol * norm(normal)
            }
            ConstraintSet::Ball { center, radius } => distance(x, center) <= radius + tol,
            ConstraintSet::Intersection(sets) => sets.iter().all(|s| s.contains(x, tol)),
        }
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &Point, tol: f64, max_iter: usize) -> Result<f64, GeometryError> {
        if self.contains(x, 0.0) {
            return Ok(0.0);
        }
        let p = project(x, self, tol, max_iter)?;
        Ok(p.distance(x))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn combine(weights: &[f64], gens: &[&[f64]]) -> Vec<f64> {
    let dim = gens.first().map_or(0, |g| g.len());
    let mut out = vec![0.0; dim];
    for (w, g) in weights.iter().zip(gens) {
        if *w != 0.0 {
            for (o, c) in out.iter_mut().zip(g.iter()) {
                *o += w * c;
            }
        }
    }
    out
}

fn check_dim(q: &[f64], gens: &PointSet) -> Result<(), GeometryError> {
    if q.len() != gens.dim() {
        return Err(GeometryError::DimensionMismatch { expected: gens.dim(), found: q.len() });
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), GeometryError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(GeometryError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_rejects_non_finite_and_empty() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![1.0, 2.0]).is_ok());
    }

    #[test]
    fn point_set_rejects_mixed_dimensions_and_duplicate_labels() {
        let a = Point::from(vec![0.0, 0.0]);
        let b = Point::from(vec![1.0]);
        assert!(matches!(
            PointSet::from_points(vec![a.clone(), b]),
            Err(GeometryError::DimensionMismatch { .. })
        ));
        assert!(PointSet::new(vec![a.clone(), a], vec![AgentId(3), AgentId(3)]).is_err());
    }

    #[test]
    fn sorted_by_label_keeps_pairs() {
        let set = PointSet::new(
            vec![Point::from(vec![3.0]), Point::from(vec![1.0]), Point::from(vec![2.0])],
            vec![AgentId(3), AgentId(1), AgentId(2)],
        )
        .unwrap()
        .sorted_by_label();
        assert_eq!(set.labels(), &[AgentId(1), AgentId(2), AgentId(3)]);
        assert_eq!(set.points()[0].coords(), &[1.0]);
        assert_eq!(set.points()[2].coords(), &[3.0]);
    }

    #[test]
    fn convex_weights_validation() {
        assert!(ConvexWeights::new(vec![0.5, 0.5], 1e-9).is_ok());
        assert!(ConvexWeights::new(vec![0.7, 0.5], 1e-9).is_err());
        assert!(ConvexWeights::new(vec![1.1, -0.1], 1e-9).is_err());
    }

    #[test]
    fn constraint_constructors_validate() {
        assert!(ConstraintSet::ball(Point::from(vec![0.0]), -1.0).is_err());
        assert!(ConstraintSet::halfspace(vec![0.0, 0.0], 1.0).is_err());
        assert!(ConstraintSet::intersection(vec![]).is_err());
        let c = ConstraintSet::intersection(vec![
            ConstraintSet::ball(Point::from(vec![0.0, 0.0]), 1.0).unwrap(),
            ConstraintSet::halfspace(vec![1.0, 0.0, 0.0], 0.0).unwrap(),
        ])
        .unwrap();
        assert!(c.validate_dim(2).is_err());
    }

    #[test]
    fn halfspace_and_ball_membership() {
        let h = ConstraintSet::halfspace(vec![1.0, -1.0], 0.0).unwrap();
        assert!(h.contains(&[1.0, 0.5], 0.0));
        assert!(!h.contains(&[0.0, 0.5], 1e-9));
        let b = ConstraintSet::ball(Point::from(vec![0.0, 0.0]), 1.0).unwrap();
        assert!(b.contains(&[0.6, 0.8], 1e-12));
        assert!(!b.contains(&[1.0, 1.0], 1e-9));
    }
}
