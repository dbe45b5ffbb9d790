//! Planar shortcuts for hull membership and hull intersections.
//!
//! In the plane a non-empty intersection of hulls is a polygon, a segment or
//! a point, and each of its vertices is either a generator or the crossing
//! of two hull edges. Enumerating those candidates finds a common point
//! without an LP, including the common case where the intersection has no
//! interior. Nothing here proves emptiness: `None` only means no candidate
//! was confirmed, and callers then fall back to the LP.

type P = [f64; 2];

/// Unique edge lines beyond which candidate enumeration is not attempted.
const MAX_LINES: usize = 64;

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: P, b: P) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: P, b: P) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn segment_distance(q: P, a: P, b: P) -> f64 {
    let ab = sub(b, a);
    let aq = sub(q, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 { (dot(aq, ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let d = [aq[0] - t * ab[0], aq[1] - t * ab[1]];
    dot(d, d).sqrt()
}

/// Largest generator count handled without allocation.
const CAP: usize = 16;

/// Convex hull of a small planar point set, counter-clockwise, without
/// repeated or collinear vertices. `idx[k]` is the generator position of
/// vertex `k`.
struct Hull {
    buf: [P; CAP],
    pos: [usize; CAP],
    len: usize,
}

impl Hull {
    /// `None` when there are more than `CAP` generators.
    fn new(gens: &[&[f64]], origin: P) -> Option<Self> {
        let n = gens.len();
        if n > CAP {
            return None;
        }
        let mut pts = [[0.0; 2]; CAP];
        for (p, x) in pts.iter_mut().zip(gens) {
            *p = [x[0] - origin[0], x[1] - origin[1]];
        }
        let mut order = [0usize; CAP];
        order.iter_mut().enumerate().for_each(|(k, o)| *o = k);
        let order = &mut order[..n];
        order.sort_unstable_by(|&a, &b| {
            pts[a].partial_cmp(&pts[b]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        let mut distinct = 0;
        for k in 0..n {
            if distinct == 0 || pts[order[k]] != pts[order[distinct - 1]] {
                order[distinct] = order[k];
                distinct += 1;
            }
        }
        let order = &order[..distinct];
        let mut hull = Hull { buf: [[0.0; 2]; CAP], pos: [0; CAP], len: 0 };
        if distinct < 3 {
            for &k in order {
                hull.push(pts[k], k);
            }
            return Some(hull);
        }
        // Andrew's monotone chain; non-left turns are popped.
        let mut chain = [0usize; 2 * CAP];
        let mut top = 0;
        for pass in 0..2 {
            let start = top;
            for step in 0..distinct {
                let k = if pass == 0 { order[step] } else { order[distinct - 1 - step] };
                while top >= start + 2 {
                    let (o, a) = (pts[chain[top - 2]], pts[chain[top - 1]]);
                    if cross(sub(a, o), sub(pts[k], o)) > 0.0 {
                        break;
                    }
                    top -= 1;
                }
                chain[top] = k;
                top += 1;
            }
            top -= 1;
        }
        for &k in &chain[..top] {
            hull.push(pts[k], k);
        }
        Some(hull)
    }

    fn push(&mut self, p: P, pos: usize) {
        self.buf[self.len] = p;
        self.pos[self.len] = pos;
        self.len += 1;
    }

    fn verts(&self) -> &[P] {
        &self.buf[..self.len]
    }

    fn distance(&self, q: P) -> f64 {
        let verts = self.verts();
        match verts.len() {
            0 => f64::INFINITY,
            1 => {
                let d = sub(q, verts[0]);
                dot(d, d).sqrt()
            }
            2 => segment_distance(q, verts[0], verts[1]),
            n => {
                let edges = (0..n).map(|k| (verts[k], verts[(k + 1) % n]));
                if edges.clone().all(|(a, b)| cross(sub(b, a), sub(q, a)) >= 0.0) {
                    return 0.0;
                }
                edges.map(|(a, b)| segment_distance(q, a, b)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    fn edges(&self) -> impl Iterator<Item = (P, P)> + '_ {
        let n = self.len;
        let count = match n {
            0 | 1 => 0,
            2 => 1,
            _ => n,
        };
        (0..count).map(move |k| (self.buf[k], self.buf[(k + 1) % n]))
    }

    /// Convex weights over the generators reproducing a point within (or
    /// within rounding of) the hull. Triangles of a fan from the first
    /// vertex are scored by their smallest barycentric coordinate.
    fn weights(&self, q: P, generators: usize) -> Vec<f64> {
        let mut w = vec![0.0; generators];
        let (verts, idx) = (self.verts(), &self.pos[..self.len]);
        match verts.len() {
            0 => {}
            1 => w[idx[0]] = 1.0,
            2 => {
                let ab = sub(verts[1], verts[0]);
                let t = (dot(sub(q, verts[0]), ab) / dot(ab, ab)).clamp(0.0, 1.0);
                w[idx[0]] = 1.0 - t;
                w[idx[1]] = t;
            }
            n => {
                let a = verts[0];
                let mut best: Option<(f64, usize, [f64; 3])> = None;
                for k in 1..n - 1 {
                    let (b, c) = (verts[k], verts[k + 1]);
                    let area = cross(sub(b, a), sub(c, a));
                    let la = cross(sub(c, b), sub(q, b)) / area;
                    let lb = cross(sub(a, c), sub(q, c)) / area;
                    let lc = 1.0 - la - lb;
                    let score = la.min(lb).min(lc);
                    if best.is_none_or(|(s, _, _)| score > s) {
                        best = Some((score, k, [la, lb, lc]));
                    }
                }
                let (_, k, bary) = best.expect("a polygon has a triangle");
                let bary = bary.map(|v| v.max(0.0));
                let sum: f64 = bary.iter().sum();
                for (&slot, v) in [idx[0], idx[k], idx[k + 1]].iter().zip(bary) {
                    w[slot] += v / sum;
                }
            }
        }
        w
    }
}

/// Euclidean distance from `q` to the hull of `gens`; `None` past the
/// generator cap.
pub(crate) fn hull_distance(q: &[f64], gens: &[&[f64]]) -> Option<f64> {
    Hull::new(gens, [q[0], q[1]]).map(|h| h.distance([0.0, 0.0]))
}

/// A point of `H(P_0) ∩ … ∩ H(P_K)` together with weights over `P_0` that
/// reproduce it. The point is the `P_0` combination and lies within `tol` of
/// every other hull.
pub(crate) fn intersection_point(
    polytopes: &[&[&[f64]]],
    tol: f64,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let first = polytopes.first()?;
    let count = polytopes.iter().map(|p| p.len()).sum::<usize>() as f64;
    let mut center = [0.0, 0.0];
    for x in polytopes.iter().flat_map(|p| p.iter()) {
        center[0] += x[0] / count;
        center[1] += x[1] / count;
    }
    let mut hulls: Vec<Hull> = Vec::with_capacity(polytopes.len());
    for p in polytopes {
        hulls.push(Hull::new(p, center)?);
    }
    let fits = |q: P| hulls.iter().all(|h| h.distance(q) <= tol);

    let mut lines: Vec<(P, P)> = Vec::with_capacity(MAX_LINES);
    for (a, b) in hulls.iter().flat_map(|h| h.edges()) {
        let key = if a <= b { (a, b) } else { (b, a) };
        if !lines.contains(&key) {
            lines.push(key);
        }
    }
    if lines.len() > MAX_LINES {
        return None;
    }

    let mut sum = [0.0, 0.0];
    let mut found = 0usize;
    let mut accept = |q: P| {
        if fits(q) {
            sum[0] += q[0];
            sum[1] += q[1];
            found += 1;
        }
    };
    let mut vertices: Vec<P> = Vec::with_capacity(hulls.iter().map(|h| h.len).sum());
    for &v in hulls.iter().flat_map(|h| h.verts()) {
        if !vertices.contains(&v) {
            vertices.push(v);
            accept(v);
        }
    }
    // A crossing vertex lies on both edges, so crossings well outside
    // either segment are skipped before the full check.
    let slack = |w: P| tol / dot(w, w).sqrt() + 1e-9;
    for (k, &(a, b)) in lines.iter().enumerate() {
        let u = sub(b, a);
        let su = slack(u);
        for &(c, d) in &lines[k + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            let v = sub(d, c);
            let den = cross(u, v);
            if den == 0.0 {
                continue;
            }
            let ac = sub(c, a);
            let s = cross(ac, v) / den;
            if !(-su..=1.0 + su).contains(&s) {
                continue;
            }
            let sv = slack(v);
            if !(-sv..=1.0 + sv).contains(&(cross(ac, u) / den)) {
                continue;
            }
            accept([a[0] + s * u[0], a[1] + s * u[1]]);
        }
    }
    if found == 0 {
        return None;
    }

    // The mean of confirmed candidates is confirmed too: distance to a
    // convex set is a convex function.
    let mean = [sum[0] / found as f64, sum[1] / found as f64];
    let weights = hulls[0].weights(mean, first.len());
    let point = super::combine(&weights, first);
    let local = [point[0] - center[0], point[1] - center[1]];
    hulls[1..].iter().all(|h| h.distance(local) <= tol).then_some((point, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slices(rows: &[[f64; 2]]) -> Vec<&[f64]> {
        rows.iter().map(|r| r.as_slice()).collect()
    }

    #[test]
    fn hull_drops_interior_duplicate_and_collinear_points() {
        let pts =
            [[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [2.0, 2.0], [0.0, 2.0], [1.0, 1.0], [0.0, 0.0]];
        let h = Hull::new(&slices(&pts), [0.0, 0.0]).unwrap();
        assert_eq!(h.verts(), &[[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]]);
        let line = [[1.0, 1.0], [3.0, 3.0], [2.0, 2.0]];
        assert_eq!(Hull::new(&slices(&line), [0.0, 0.0]).unwrap().verts().len(), 2);
        assert!(Hull::new(&slices(&[[0.0, 0.0]; CAP + 1]), [0.0, 0.0]).is_none());
    }

    #[test]
    fn distances() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let s = slices(&square);
        assert_eq!(hull_distance(&[0.5, 0.5], &s), Some(0.0));
        assert!((hull_distance(&[2.0, 0.5], &s).unwrap() - 1.0).abs() < 1e-15);
        assert!((hull_distance(&[2.0, 2.0], &s).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let seg = [[0.0, 0.0], [2.0, 0.0]];
        assert!((hull_distance(&[1.0, 3.0], &slices(&seg)).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn crossing_segments_meet_at_their_crossing() {
        let a = [[0.0, 0.0], [2.0, 2.0]];
        let b = [[0.0, 2.0], [2.0, 0.0]];
        let (sa, sb) = (slices(&a), slices(&b));
        let (p, w) = intersection_point(&[&sa, &sb], 1e-12).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && (p[1] - 1.0).abs() < 1e-12);
        assert!((w[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn separated_hulls_give_nothing() {
        let a = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let b = [[3.0, 3.0], [4.0, 3.0], [3.0, 4.0]];
        assert!(intersection_point(&[&slices(&a), &slices(&b)], 1e-9).is_none());
    }

    #[test]
    fn weights_reproduce_interior_points() {
        let pent = [[0.0, 0.0], [2.0, -1.0], [3.0, 1.0], [1.5, 3.0], [-1.0, 1.5]];
        let h = Hull::new(&slices(&pent), [0.0, 0.0]).unwrap();
        for q in [[1.0, 1.0], [2.5, 0.5], [0.0, 1.0]] {
            let w = h.weights(q, 5);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let p = super::super::combine(&w, &slices(&pent));
            assert!((p[0] - q[0]).abs() < 1e-14 && (p[1] - q[1]).abs() < 1e-14);
        }
    }
}
