use super::simplex::{LinearProgram, LpStatus, Precision, Relation, SimplexOptions};
use super::{check_dim, check_tol, combine, ConvexWeights, GeometryError, Point, PointSet};

/// Weights below this are reported as exact zeros.
const ZERO_WEIGHT: f64 = 1e-13;

/// Decides `q ∈ H(gens)` within `tol` in the max-norm.
///
/// Solves `min t` over convex weights `w` with `|Σ w_j g_j − q|_∞ <= t`, so
/// the verdict is exactly "some convex combination lands within `tol`".
pub fn hull_contains(q: &Point, gens: &PointSet, tol: f64) -> Result<bool, GeometryError> {
    check_dim(q, gens)?;
    check_tol(tol)?;
    let (_, residual) = min_residual_weights(q, &gens.coord_slices(), tol)?;
    Ok(residual <= tol)
}

/// Smallest max-norm distance from `q` to `H(gens)` together with the weights
/// attaining it.
pub fn hull_residual(q: &Point, gens: &PointSet) -> Result<(ConvexWeights, f64), GeometryError> {
    check_dim(q, gens)?;
    let (w, residual) = min_residual_weights(q, &gens.coord_slices(), f64::MIN_POSITIVE)?;
    Ok((ConvexWeights::from_raw(w), residual))
}

pub(crate) fn contains_slices(q: &[f64], gens: &[&[f64]], tol: f64) -> Result<bool, GeometryError> {
    let (_, residual) = min_residual_weights(q, gens, tol)?;
    Ok(residual <= tol)
}

pub(crate) fn min_residual_weights(
    q: &[f64],
    gens: &[&[f64]],
    tol: f64,
) -> Result<(Vec<f64>, f64), GeometryError> {
    let k = gens.len();
    // A generator coinciding with q settles membership without an LP.
    if let Some(j) = gens.iter().position(|g| max_abs_diff(g, q) <= tol) {
        let mut w = vec![0.0; k];
        w[j] = 1.0;
        return Ok((w, max_abs_diff(gens[j], q)));
    }

    let n = q.len();
    let t_col = k;
    let mut lp = LinearProgram::new(k + 1);
    let mut cost = vec![0.0; k + 1];
    cost[t_col] = 1.0;
    lp.set_objective(&cost);

    let mut row = vec![0.0; k + 1];
    row[..k].iter_mut().for_each(|v| *v = 1.0);
    lp.add_row(&row, Relation::Eq, 1.0);
    for c in 0..n {
        for (j, g) in gens.iter().enumerate() {
            row[j] = g[c];
        }
        row[t_col] = -1.0;
        lp.add_row(&row, Relation::Le, q[c]);
        for v in row[..k].iter_mut() {
            *v = -*v;
        }
        lp.add_row(&row, Relation::Le, -q[c]);
    }

    match lp.solve(&SimplexOptions::default())? {
        LpStatus::Optimal(sol) => {
            let mut w = sol.x[..k].to_vec();
            clean_weights(&mut w);
            let residual = max_abs_diff(&combine(&w, gens), q);
            Ok((w, residual))
        }
        // The program is always feasible (t large) and bounded below by 0.
        _ => Err(GeometryError::Solver { iterations: 0 }),
    }
}

/// A point common to several hulls, with one weight vector per hull.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionPoint {
    pub point: Point,
    pub weights: Vec<ConvexWeights>,
}

/// Finds a point in `H(P_0) ∩ H(P_1) ∩ … ∩ H(P_K)` by a feasibility LP.
///
/// Variables are one convex weight block per polytope. Rows pin every block
/// to unit sum and equate the first block's combination with each other
/// block's, in coordinates translated to the centroid of all generators.
/// The objective is the normalized all-ones vector; because every block
/// sums to one, it is constant on the feasible set and the solver returns
/// the first vertex phase one reaches.
///
/// The returned point is the first block's combination, so it lies in
/// `H(P_0)`; it is accepted once its recomputed max-norm distance to every
/// other block's combination is at most `tol`. When the float solve fails
/// that check or reports infeasibility, the program is solved again in exact
/// arithmetic, so `None` means the intersection is empty.
pub fn feasible_point_in_intersection(
    polytopes: &[PointSet],
    tol: f64,
) -> Result<Option<IntersectionPoint>, GeometryError> {
    check_tol(tol)?;
    let Some(first) = polytopes.first() else {
        return Err(GeometryError::InvalidInput("no polytopes given".into()));
    };
    let dim = first.dim();
    if let Some(p) = polytopes.iter().find(|p| p.dim() != dim) {
        return Err(GeometryError::DimensionMismatch { expected: dim, found: p.dim() });
    }
    let slices: Vec<Vec<&[f64]>> = polytopes.iter().map(|p| p.coord_slices()).collect();
    let refs: Vec<&[&[f64]]> = slices.iter().map(|s| s.as_slice()).collect();
    Ok(intersection_slices(&refs, dim, tol)?.map(|(point, weights)| IntersectionPoint {
        point: Point::from(point),
        weights: weights.into_iter().map(ConvexWeights::from_raw).collect(),
    }))
}

pub(crate) type Intersection = (Vec<f64>, Vec<Vec<f64>>);

pub(crate) fn intersection_slices(
    polytopes: &[&[&[f64]]],
    dim: usize,
    tol: f64,
) -> Result<Option<Intersection>, GeometryError> {
    let offsets: Vec<usize> = polytopes
        .iter()
        .scan(0, |acc, p| {
            let start = *acc;
            *acc += p.len();
            Some(start)
        })
        .collect();
    let num_vars: usize = polytopes.iter().map(|p| p.len()).sum();

    // Translation removes the cancellation that a large common offset causes
    // once the hulls are small.
    let count = num_vars.max(1) as f64;
    let center: Vec<f64> = (0..dim)
        .map(|c| polytopes.iter().flat_map(|p| p.iter()).map(|x| x[c]).sum::<f64>() / count)
        .collect();
    let layout = Layout { polytopes, offsets: &offsets, num_vars, dim, center: &center };

    let float = SimplexOptions { feas_tol: tol, ..Default::default() };
    // Cheapest first: equality form in floats, then the residual form, whose
    // inequality rows tolerate slivers better, then the equality form exactly.
    let attempts =
        [(false, float), (true, SimplexOptions::default()), (false, SimplexOptions::exact())];
    for (residual_form, opts) in attempts {
        let exact = opts.precision == Precision::Exact;
        let sol = match layout.program(residual_form).solve(&opts) {
            Ok(LpStatus::Optimal(sol)) => sol,
            Ok(LpStatus::Infeasible { .. }) if exact => return Ok(None),
            Ok(LpStatus::Infeasible { .. }) => continue,
            // A float run that stalls is retried.
            Err(GeometryError::Solver { .. }) if !exact => continue,
            Err(e) => return Err(e),
            // Every variable lives in a unit simplex, so the objective is bounded.
            Ok(LpStatus::Unbounded) => return Err(GeometryError::Solver { iterations: 0 }),
        };
        let weights: Vec<Vec<f64>> = polytopes
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let mut w = sol.x[offsets[k]..offsets[k] + p.len()].to_vec();
                clean_weights(&mut w);
                normalize(&mut w);
                w
            })
            .collect();
        let point = combine(&weights[0], polytopes[0]);
        let residual = polytopes
            .iter()
            .zip(&weights)
            .skip(1)
            .map(|(p, w)| max_abs_diff(&combine(w, p), &point))
            .fold(0.0, f64::max);
        if residual <= tol {
            return Ok(Some((point, weights)));
        }
    }
    Ok(None)
}

struct Layout<'a> {
    polytopes: &'a [&'a [&'a [f64]]],
    offsets: &'a [usize],
    num_vars: usize,
    dim: usize,
    center: &'a [f64],
}

impl Layout<'_> {
    /// The intersection program. With `residual`, an extra last variable `t`
    /// bounds every coupling row in absolute value and is minimized instead.
    fn program(&self, residual: bool) -> LinearProgram {
        let n = self.num_vars;
        let width = n + usize::from(residual);
        let mut lp = LinearProgram::new(width);
        let mut cost = vec![0.0; width];
        if residual {
            cost[n] = 1.0;
        } else {
            cost.iter_mut().for_each(|v| *v = 1.0 / (n as f64).sqrt());
        }
        lp.set_objective(&cost);

        let base = self.polytopes[0];
        let mut row = vec![0.0; width];
        for (k, poly) in self.polytopes.iter().enumerate() {
            let start = self.offsets[k];
            row.iter_mut().for_each(|v| *v = 0.0);
            row[start..start + poly.len()].iter_mut().for_each(|v| *v = 1.0);
            lp.add_row(&row, Relation::Eq, 1.0);
            if k == 0 {
                continue;
            }
            for c in 0..self.dim {
                row.iter_mut().for_each(|v| *v = 0.0);
                for (l, x) in base.iter().enumerate() {
                    row[l] = x[c] - self.center[c];
                }
                for (l, x) in poly.iter().enumerate() {
                    row[start + l] = self.center[c] - x[c];
                }
                if residual {
                    row[n] = -1.0;
                    lp.add_row(&row, Relation::Le, 0.0);
                    row[..n].iter_mut().for_each(|v| *v = -*v);
                    lp.add_row(&row, Relation::Le, 0.0);
                } else {
                    lp.add_row(&row, Relation::Eq, 0.0);
                }
            }
        }
        lp
    }
}

/// Rescales non-negative weights to unit sum.
fn normalize(w: &mut [f64]) {
    let sum: f64 = w.iter().sum();
    if sum > 0.0 {
        w.iter_mut().for_each(|v| *v /= sum);
    }
}

/// Re-expresses `q` with at most `n + 1` positive weights.
///
/// Starts from LP weights and repeatedly steps along an affine dependency of
/// the supporting generators until one weight reaches zero.
pub fn caratheodory_decompose(
    q: &Point,
    gens: &PointSet,
    tol: f64,
) -> Result<ConvexWeights, GeometryError> {
    check_dim(q, gens)?;
    check_tol(tol)?;
    let slices = gens.coord_slices();
    let (mut w, residual) = min_residual_weights(q, &slices, tol)?;
    if residual > tol {
        return Err(GeometryError::NotInHull { residual });
    }
    let n = q.dim();
    loop {
        let support: Vec<usize> = (0..w.len()).filter(|&j| w[j] > 0.0).collect();
        if support.len() <= n + 1 {
            break;
        }
        let y = affine_dependency(&support, &slices, n);
        // Σ y = 0 and y ≠ 0, so some entry is positive.
        let mut step = f64::INFINITY;
        let mut hit = support[0];
        for (idx, &j) in support.iter().enumerate() {
            if y[idx] > 1e-14 {
                let s = w[j] / y[idx];
                if s < step {
                    step = s;
                    hit = j;
                }
            }
        }
        for (idx, &j) in support.iter().enumerate() {
            w[j] -= step * y[idx];
        }
        w[hit] = 0.0;
        clean_weights(&mut w);
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    Ok(ConvexWeights::from_raw(w))
}

/// Non-zero `y` with `Σ y_i g_i = 0` and `Σ y_i = 0` over `support`
/// (which must exceed `n + 1` entries), by Gauss-Jordan elimination.
fn affine_dependency(support: &[usize], gens: &[&[f64]], n: usize) -> Vec<f64> {
    let k = support.len();
    let rows = n + 1;
    let mut a = vec![0.0; rows * k];
    for (col, &j) in support.iter().enumerate() {
        for r in 0..n {
            a[r * k + col] = gens[j][r];
        }
        a[n * k + col] = 1.0;
    }
    let mut pivot_cols = Vec::with_capacity(rows);
    let mut r = 0;
    for col in 0..k {
        if r == rows {
            break;
        }
        let (best, best_abs) = (r..rows)
            .map(|i| (i, a[i * k + col].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= 1e-12 {
            continue;
        }
        for c in 0..k {
            a.swap(r * k + c, best * k + c);
        }
        let p = a[r * k + col];
        for c in 0..k {
            a[r * k + c] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = a[i * k + col];
                if f != 0.0 {
                    for c in 0..k {
                        a[i * k + c] -= f * a[r * k + c];
                    }
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    let free = (0..k).find(|c| !pivot_cols.contains(c)).expect("k > rank");
    let mut y = vec![0.0; k];
    y[free] = 1.0;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        y[pc] = -a[row * k + free];
    }
    y
}

fn clean_weights(w: &mut [f64]) {
    for v in w.iter_mut() {
        if *v < ZERO_WEIGHT {
            *v = 0.0;
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-9;

    fn set(rows: &[&[f64]]) -> PointSet {
        PointSet::from_coords(rows).unwrap()
    }

    fn pt(c: &[f64]) -> Point {
        Point::from(c.to_vec())
    }

    #[test]
    fn generator_is_in_own_hull() {
        let gens = set(&[&[0.3, -1.0], &[2.0, 2.0], &[-1.0, 0.5]]);
        assert!(hull_contains(&pt(&[0.3, -1.0]), &gens, TOL).unwrap());
    }

    #[test]
    fn centroid_of_cross_is_inside() {
        let gens = set(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        assert!(hull_contains(&pt(&[0.0, 0.0]), &gens, TOL).unwrap());
    }

    #[test]
    fn outside_bounding_box() {
        let gens = set(&[&[0.0, 0.0], &[1.0, 0.0], &[1.0, 1.0], &[0.0, 1.0]]);
        assert!(!hull_contains(&pt(&[2.0, 0.0]), &gens, TOL).unwrap());
    }

    #[test]
    fn boundary_within_tolerance_counts_as_inside() {
        let gens = set(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert!(hull_contains(&pt(&[0.5, 0.5 + 0.5e-9]), &gens, TOL).unwrap());
        assert!(!hull_contains(&pt(&[0.5, 0.5 + 1e-6]), &gens, TOL).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let gens = set(&[&[0.0, 0.0]]);
        assert!(matches!(
            hull_contains(&pt(&[0.0]), &gens, TOL),
            Err(GeometryError::DimensionMismatch { .. })
        ));
        assert!(hull_contains(&pt(&[0.0, 0.0]), &gens, 0.0).is_err());
    }

    // Brute-force 2-D oracle: q is in the hull iff it lies in some triangle
    // (or segment, or point) of generators, tested by signed areas.
    fn oracle_in_hull_2d(q: [f64; 2], gens: &[[f64; 2]], eps: f64) -> bool {
        let cross = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
            (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        };
        let k = gens.len();
        for i in 0..k {
            for j in i..k {
                for l in j..k {
                    let (a, b, c) = (gens[i], gens[j], gens[l]);
                    let area = cross(a, b, c);
                    if area.abs() > 1e-12 {
                        let s = area.signum();
                        let e1 = cross(a, b, q) * s;
                        let e2 = cross(b, c, q) * s;
                        let e3 = cross(c, a, q) * s;
                        if e1 >= -eps && e2 >= -eps && e3 >= -eps {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn random_2d_instances_agree_with_signed_area_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut disagreements = 0;
        for _ in 0..400 {
            let k = rng.random_range(3..8);
            let gens: Vec<[f64; 2]> = (0..k)
                .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
                .collect();
            let q = [rng.random_range(-1.2..1.2), rng.random_range(-1.2..1.2)];
            let rows: Vec<&[f64]> = gens.iter().map(|g| g.as_slice()).collect();
            let got = hull_contains(&pt(&q), &set(&rows), TOL).unwrap();
            // Skip instances sitting on the boundary band.
            let inner = oracle_in_hull_2d(q, &gens, -1e-7);
            let outer = oracle_in_hull_2d(q, &gens, 1e-7);
            if inner == outer && got != inner {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn single_polytope_feasibility_returns_barycentric_weights() {
        let p = set(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let hit = feasible_point_in_intersection(&[p], TOL).unwrap().unwrap();
        let w = hit.weights[0].as_slice();
        assert!(w.iter().all(|&v| v >= 0.0));
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_intervals_meet_in_overlap() {
        let a = set(&[&[0.0], &[2.0]]);
        let b = set(&[&[1.0], &[3.0]]);
        let hit = feasible_point_in_intersection(&[a, b], TOL).unwrap().unwrap();
        let x = hit.point[0];
        assert!((1.0 - 1e-9..=2.0 + 1e-9).contains(&x), "{x}");
    }

    #[test]
    fn disjoint_intervals_have_no_common_point() {
        let a = set(&[&[0.0], &[1.0]]);
        let b = set(&[&[2.0], &[3.0]]);
        assert!(feasible_point_in_intersection(&[a, b], TOL).unwrap().is_none());
    }

    #[test]
    fn intersection_witness_weights_reproduce_point() {
        let a = set(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]);
        let b = set(&[&[1.0, 1.0], &[-1.0, 1.0], &[1.0, -1.0]]);
        let c = set(&[&[0.5, -3.0], &[0.5, 3.0], &[-3.0, 0.0]]);
        let polys = [a, b, c];
        let hit = feasible_point_in_intersection(&polys, TOL).unwrap().unwrap();
        for (poly, w) in polys.iter().zip(&hit.weights) {
            let back = w.recombine(poly).unwrap();
            assert!(back.distance_inf(&hit.point) < 1e-8);
        }
    }

    // Brute-force interval oracle for 1-D hulls.
    fn interval(p: &[f64]) -> (f64, f64) {
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    #[test]
    fn random_interval_intersections_agree_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let count = rng.random_range(1..4);
            let polys: Vec<Vec<f64>> = (0..count)
                .map(|_| (0..rng.random_range(1..4)).map(|_| rng.random_range(-3.0..3.0)).collect())
                .collect();
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for p in &polys {
                let (a, b) = interval(p);
                lo = lo.max(a);
                hi = hi.min(b);
            }
            if (hi - lo).abs() < 1e-7 {
                continue;
            }
            let sets: Vec<PointSet> = polys
                .iter()
                .map(|p| {
                    let rows: Vec<Vec<f64>> = p.iter().map(|&x| vec![x]).collect();
                    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
                    set(&refs)
                })
                .collect();
            let got = feasible_point_in_intersection(&sets, TOL).unwrap();
            match got {
                Some(hit) => {
                    assert!(lo <= hi, "oracle says empty, LP found {:?}", hit.point);
                    assert!(hit.point[0] >= lo - 1e-8 && hit.point[0] <= hi + 1e-8);
                }
                None => assert!(lo > hi, "oracle interval [{lo}, {hi}] but LP empty"),
            }
        }
    }

    #[test]
    fn caratheodory_on_generator_is_a_vertex() {
        let gens = set(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let w = caratheodory_decompose(&pt(&[0.0, 0.0]), &gens, TOL).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn caratheodory_midpoint_with_redundant_generator() {
        let gens = set(&[&[0.0, 0.0], &[2.0, 0.0], &[1.0, 1.0]]);
        let w = caratheodory_decompose(&pt(&[1.0, 0.0]), &gens, TOL).unwrap();
        let w = w.as_slice();
        assert!((w[0] - 0.5).abs() < 1e-9 && (w[1] - 0.5).abs() < 1e-9 && w[2].abs() < 1e-9);
    }

    #[test]
    fn caratheodory_outside_is_an_error() {
        let gens = set(&[&[0.0, 0.0], &[1.0, 0.0]]);
        assert!(matches!(
            caratheodory_decompose(&pt(&[0.5, 1.0]), &gens, TOL),
            Err(GeometryError::NotInHull { .. })
        ));
    }

    #[test]
    fn random_caratheodory_support_and_weight_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.random_range(1..4);
            let k = rng.random_range(n + 2..n + 9);
            let rows: Vec<Vec<f64>> =
                (0..k).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
            let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
            let gens = set(&refs);
            // Interior point: a random dense convex combination.
            let mut w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= s);
            let q = Point::from(combine(&w, &refs));
            let dec = caratheodory_decompose(&q, &gens, TOL).unwrap();
            assert!(dec.support_size(0.0) <= n + 1);
            assert!(dec.max_weight() >= 1.0 / (n as f64 + 1.0) - TOL);
            let back = dec.recombine(&gens).unwrap();
            assert!(back.distance_inf(&q) <= 10.0 * TOL, "{}", back.distance_inf(&q));
        }
    }

    #[test]
    fn clustered_hulls_with_a_far_vertex_still_meet() {
        // Three states within 1e-2 and one far point: the intersection is
        // a sliver that a plain float tableau loses.
        let near = [
            [-0.4190543382510299, 0.4513304898967144],
            [-0.4190493840720402, 0.45132560596102506],
            [-0.42791433408482876, 0.455960520683984],
        ];
        let far = [-2.4387950443720197, 2.225890981144847];
        let polys = vec![
            set(&[&near[0], &near[1], &far]),
            set(&[&near[0], &near[1], &near[2]]),
            set(&[&near[0], &near[2], &far]),
            set(&[&near[1], &near[2], &far]),
        ];
        let hit = feasible_point_in_intersection(&polys, TOL).unwrap().expect("non-empty");
        for (p, w) in polys.iter().zip(&hit.weights) {
            let q = combine(w.as_slice(), &p.coord_slices());
            assert!(max_abs_diff(&q, hit.point.coords()) <= TOL);
        }
    }
}
