use super::{check_tol, dot, ConstraintSet, GeometryError, Point};

/// Stopping tolerance used for intersection projections in simulations.
pub const DYKSTRA_TOL: f64 = 1e-10;
/// Cycle budget used for intersection projections in simulations.
pub const DYKSTRA_MAX_ITER: usize = 10_000;

/// Euclidean projection of `q` onto `c`.
///
/// Halfspaces and balls are projected in closed form. Intersections are
/// flattened to their elementary members and handled by Dykstra's
/// alternating projections, stopping once a full cycle moves neither the
/// iterate nor any correction term by more than `tol`.
pub fn project(
    q: &Point,
    c: &ConstraintSet,
    tol: f64,
    max_iter: usize,
) -> Result<Point, GeometryError> {
    check_tol(tol)?;
    c.validate_dim(q.dim())?;
    let mut atoms = Vec::new();
    flatten(c, &mut atoms);
    match atoms.len() {
        0 => Ok(q.clone()),
        1 => Ok(Point::from(project_atom(q, atoms[0]))),
        _ => dykstra(q, &atoms, tol, max_iter),
    }
}

fn flatten<'a>(c: &'a ConstraintSet, out: &mut Vec<&'a ConstraintSet>) {
    match c {
        ConstraintSet::WholeSpace => {}
        ConstraintSet::Intersection(sets) => sets.iter().for_each(|s| flatten(s, out)),
        atom => out.push(atom),
    }
}

fn project_atom(x: &[f64], atom: &ConstraintSet) -> Vec<f64> {
    match atom {
        ConstraintSet::Halfspace { normal, offset } => {
            let gap = offset - dot(normal, x);
            if gap <= 0.0 {
                return x.to_vec();
            }
            let scale = gap / dot(normal, normal);
            x.iter().zip(normal).map(|(xi, ai)| xi + scale * ai).collect()
        }
        ConstraintSet::Ball { center, radius } => {
            let r = super::distance(x, center);
            if r <= *radius {
                return x.to_vec();
            }
            let s = radius / r;
            center.iter().zip(x).map(|(ci, xi)| ci + s * (xi - ci)).collect()
        }
        ConstraintSet::WholeSpace | ConstraintSet::Intersection(_) => {
            unreachable!("atoms are flattened")
        }
    }
}

fn dykstra(
    q: &Point,
    atoms: &[&ConstraintSet],
    tol: f64,
    max_iter: usize,
) -> Result<Point, GeometryError> {
    if atoms.iter().all(|a| a.contains(q, 0.0)) {
        return Ok(q.clone());
    }
    let dim = q.dim();
    let mut x = q.to_vec();
    let mut corrections = vec![vec![0.0; dim]; atoms.len()];
    let mut y = vec![0.0; dim];
    for _ in 0..max_iter {
        let start = x.clone();
        let mut correction_shift = 0.0;
        for (atom, corr) in atoms.iter().zip(corrections.iter_mut()) {
            for ((yi, xi), ci) in y.iter_mut().zip(&x).zip(corr.iter()) {
                *yi = xi + ci;
            }
            let z = project_atom(&y, atom);
            for ((ci, yi), zi) in corr.iter_mut().zip(&y).zip(&z) {
                let next = yi - zi;
                correction_shift += (next - *ci) * (next - *ci);
                *ci = next;
            }
            x = z;
        }
        let moved = super::distance(&x, &start);
        if moved <= tol && correction_shift.sqrt() <= tol {
            return Ok(Point::from(x));
        }
    }
    Err(GeometryError::NonConvergence { iterations: max_iter, last: Point::from(x) })
}
