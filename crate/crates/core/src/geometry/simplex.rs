//! Dense two-phase primal simplex.
//!
//! Problems are stated as `min c·x` subject to rows `a·x {=,<=,>=} b` and
//! `x >= 0`. Pricing is Dantzig's rule; after a run of degenerate pivots the
//! phase switches to Bland's rule, which cannot cycle.
//!
//! Artificial columns are never stored. An artificial variable that leaves
//! the basis can never re-enter, so only the basis bookkeeping remembers it.
//!
//! The tableau runs in `f64` or in exact rational arithmetic. Every finite
//! `f64` is a dyadic rational, so the exact mode solves the stated program
//! without rounding; it is meant for nearly degenerate programs where `f64`
//! elimination loses the feasible set.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::GeometryError;

/// Arithmetic used for the tableau.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Double,
    /// Rational arithmetic; tolerances other than `feas_tol` are ignored.
    Exact,
}

trait Scalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn of(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;

    /// `dst -= f * src`, where `src` vanishes outside the sorted index list `nz`.
    fn sub_scaled(dst: &mut [Self], f: &Self, src: &[Self], nz: &[usize]) {
        for &k in nz {
            dst[k] = dst[k].clone() - f.clone() * src[k].clone();
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn of(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn of(v: f64) -> Self {
        BigRational::from_float(v).expect("tableau entries are finite")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    /// Largest phase-one residual (sum of artificials) still called feasible.
    pub feas_tol: f64,
    /// Smallest magnitude accepted as a pivot element.
    pub pivot_tol: f64,
    /// Reduced costs above `-opt_tol` are treated as non-negative.
    pub opt_tol: f64,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_limit: usize,
    /// Bound relaxation of the ratio test; basic values may dip this far
    /// below zero.
    pub bound_relax: f64,
    /// Pivot budget per phase; `None` derives one from the problem size.
    pub max_iter: Option<usize>,
    pub precision: Precision,
}

impl SimplexOptions {
    pub fn exact() -> Self {
        SimplexOptions { precision: Precision::Exact, ..Default::default() }
    }
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feas_tol: super::DEFAULT_TOL,
            pivot_tol: 1e-11,
            opt_tol: 1e-11,
            degenerate_limit: 64,
            bound_relax: 1e-12,
            max_iter: None,
            precision: Precision::Double,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpStatus {
    Optimal(LpSolution),
    Infeasible { residual: f64 },
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    num_vars: usize,
    cost: Vec<f64>,
    coeffs: Vec<f64>,
    relations: Vec<Relation>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    /// A program over `num_vars` non-negative variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            cost: vec![0.0; num_vars],
            coeffs: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn set_objective(&mut self, cost: &[f64]) {
        assert_eq!(cost.len(), self.num_vars, "objective length");
        self.cost.copy_from_slice(cost);
    }

    /// Adds a dense row.
    pub fn add_row(&mut self, coeffs: &[f64], relation: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars, "row length");
        self.coeffs.extend_from_slice(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
    }

    /// Adds a row given as `(column, coefficient)` pairs.
    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], relation: Relation, rhs: f64) {
        let start = self.coeffs.len();
        self.coeffs.resize(start + self.num_vars, 0.0);
        for &(j, a) in entries {
            self.coeffs[start + j] += a;
        }
        self.relations.push(relation);
        self.rhs.push(rhs);
    }

    pub fn solve(&self, opts: &SimplexOptions) -> Result<LpStatus, GeometryError> {
        match opts.precision {
            Precision::Double => self.solve_in::<f64>(opts),
            Precision::Exact => self.solve_in::<BigRational>(opts),
        }
    }

    fn solve_in<S: Scalar>(&self, opts: &SimplexOptions) -> Result<LpStatus, GeometryError> {
        let mut tab = Tableau::<S>::build(self, opts);
        let budget = opts.max_iter.unwrap_or(1000 + 100 * (tab.m + tab.cols));

        if tab.has_artificials() {
            tab.load_phase_one_objective();
            match tab.run(opts, budget, None)? {
                PhaseEnd::Optimal => {}
                // Phase one is bounded below by zero; only numerical trouble lands here.
                PhaseEnd::Unbounded => {
                    return Err(GeometryError::Solver { iterations: tab.iterations })
                }
            }
            let exact_residual = -tab.obj[tab.cols].clone();
            let residual = exact_residual.to_f64();
            let infeasible = match opts.precision {
                Precision::Double => residual > opts.feas_tol,
                Precision::Exact => exact_residual > S::zero(),
            };
            if infeasible {
                return Ok(LpStatus::Infeasible { residual });
            }
            tab.drive_out_artificials();
        }

        let cost: Vec<S> = self.cost.iter().map(|&c| S::of(c)).collect();
        tab.load_objective(&cost);
        match tab.run(opts, budget, Some(&cost))? {
            PhaseEnd::Unbounded => Ok(LpStatus::Unbounded),
            PhaseEnd::Optimal => {
                let x = tab.primal(self.num_vars);
                let objective = x.iter().zip(&self.cost).map(|(a, b)| a * b).sum();
                Ok(LpStatus::Optimal(LpSolution { x, objective, iterations: tab.iterations }))
            }
        }
    }
}

/// Leaving row, degeneracy of the step, relative pivot magnitude.
type RatioStep = (usize, bool, f64);

/// Relative pivot size below which another entering column is preferred.
const PIVOT_QUALITY: f64 = 1e-3;

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau<S> {
    m: usize,
    /// Structural plus slack columns; the right-hand side sits at index `cols`.
    cols: usize,
    width: usize,
    t: Vec<S>,
    obj: Vec<S>,
    /// Basic variable per row; values `>= cols` denote the row's artificial.
    basis: Vec<usize>,
    redundant: Vec<bool>,
    iterations: usize,
    scratch: Vec<S>,
    nz: Vec<usize>,
    pivot_tol: S,
    neg_opt_tol: S,
    relax: S,
    /// Steps at or below this count as degenerate.
    degenerate_step: S,
    /// Smallest entry that may replace a zero-level artificial.
    drive_tol: S,
}

impl<S: Scalar> Tableau<S> {
    fn build(lp: &LinearProgram, opts: &SimplexOptions) -> Self {
        let m = lp.rhs.len();
        let n = lp.num_vars;
        let slacks = lp.relations.iter().filter(|r| **r != Relation::Eq).count();
        let cols = n + slacks;
        let width = cols + 1;
        let mut t = vec![S::zero(); m * width];
        let mut basis = vec![0; m];
        let mut slack = n;
        for r in 0..m {
            let row = &mut t[r * width..(r + 1) * width];
            for (dst, &src) in row[..n].iter_mut().zip(&lp.coeffs[r * n..(r + 1) * n]) {
                if src != 0.0 {
                    *dst = S::of(src);
                }
            }
            row[cols] = S::of(lp.rhs[r]);
            let slack_col = match lp.relations[r] {
                Relation::Eq => None,
                Relation::Le => {
                    row[slack] = S::one();
                    slack += 1;
                    Some(slack - 1)
                }
                Relation::Ge => {
                    row[slack] = -S::one();
                    slack += 1;
                    Some(slack - 1)
                }
            };
            if row[cols] < S::zero() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            basis[r] = match slack_col {
                Some(s) if row[s] > S::zero() => s,
                _ => cols + r,
            };
        }
        let tol = |v: f64| match opts.precision {
            Precision::Double => S::of(v),
            Precision::Exact => S::zero(),
        };
        Tableau {
            m,
            cols,
            width,
            t,
            obj: vec![S::zero(); width],
            basis,
            redundant: vec![false; m],
            iterations: 0,
            scratch: vec![S::zero(); width],
            nz: Vec::with_capacity(width),
            pivot_tol: tol(opts.pivot_tol),
            neg_opt_tol: -tol(opts.opt_tol),
            relax: tol(opts.bound_relax),
            degenerate_step: tol(0.1 * opts.bound_relax),
            drive_tol: tol(100.0 * opts.pivot_tol),
        }
    }

    fn has_artificials(&self) -> bool {
        self.basis.iter().any(|&b| b >= self.cols)
    }

    fn row(&self, r: usize) -> &[S] {
        &self.t[r * self.width..(r + 1) * self.width]
    }

    fn load_phase_one_objective(&mut self) {
        let mut obj = vec![S::zero(); self.width];
        for r in 0..self.m {
            if self.basis[r] >= self.cols {
                for (o, v) in obj.iter_mut().zip(self.row(r)) {
                    if !v.is_zero() {
                        *o = o.clone() - v.clone();
                    }
                }
            }
        }
        self.obj = obj;
    }

    fn refresh_objective(&mut self, cost: Option<&[S]>) {
        match cost {
            Some(c) => self.load_objective(c),
            None => self.load_phase_one_objective(),
        }
    }

    fn load_objective(&mut self, cost: &[S]) {
        let mut obj = vec![S::zero(); self.width];
        obj[..cost.len()].clone_from_slice(cost);
        for r in 0..self.m {
            if self.redundant[r] {
                continue;
            }
            let b = self.basis[r];
            let f = obj[b].clone();
            if !f.is_zero() {
                for (o, v) in obj.iter_mut().zip(self.row(r)) {
                    if !v.is_zero() {
                        *o = o.clone() - f.clone() * v.clone();
                    }
                }
                obj[b] = S::zero();
            }
        }
        self.obj = obj;
    }

    /// Pivots until optimal or unbounded. `cost` is `None` in phase one. A
    /// verdict is only returned once it survives recomputing the objective
    /// row from the current tableau, which discards drift accumulated in it.
    fn run(
        &mut self,
        opts: &SimplexOptions,
        budget: usize,
        cost: Option<&[S]>,
    ) -> Result<PhaseEnd, GeometryError> {
        let mut fresh = false;
        let mut bland = false;
        let mut degenerate_run = 0usize;
        let mut phase_iters = 0usize;
        loop {
            let choice = if bland {
                (0..self.cols)
                    .find(|&j| self.obj[j] < self.neg_opt_tol)
                    .map(|c| (c, self.ratio_test(c, true)))
            } else {
                self.dantzig_choice()
            };
            let Some((c, step)) = choice else {
                if fresh {
                    return Ok(PhaseEnd::Optimal);
                }
                self.refresh_objective(cost);
                fresh = true;
                continue;
            };
            let Some((r, degenerate, _)) = step else {
                if fresh {
                    return Ok(PhaseEnd::Unbounded);
                }
                self.refresh_objective(cost);
                fresh = true;
                continue;
            };
            fresh = false;

            if degenerate {
                degenerate_run += 1;
                if degenerate_run > opts.degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }

            self.pivot(r, c);
            phase_iters += 1;
            if phase_iters > budget {
                return Err(GeometryError::Solver { iterations: self.iterations });
            }
        }
    }

    /// Most negative reduced cost whose pivot is not tiny relative to its
    /// column. Columns failing that test are passed over for the next best;
    /// when all fail, the best-conditioned pivot among them is taken. An
    /// unbounded column is returned at once.
    fn dantzig_choice(&self) -> Option<(usize, Option<RatioStep>)> {
        let mut first = None;
        for j in 0..self.cols {
            if self.obj[j] < *first.map_or(&self.neg_opt_tol, |f: usize| &self.obj[f]) {
                first = Some(j);
            }
        }
        let first = first?;
        let Some(step) = self.ratio_test(first, false) else {
            return Some((first, None));
        };
        if step.2 >= PIVOT_QUALITY {
            return Some((first, Some(step)));
        }
        let mut order: Vec<usize> =
            (0..self.cols).filter(|&j| j != first && self.obj[j] < self.neg_opt_tol).collect();
        order.sort_by(|&a, &b| {
            self.obj[a]
                .partial_cmp(&self.obj[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut fallback = (first, step);
        for c in order {
            let Some(step) = self.ratio_test(c, false) else {
                return Some((c, None));
            };
            if step.2 >= PIVOT_QUALITY {
                return Some((c, Some(step)));
            }
            if step.2 > fallback.1 .2 {
                fallback = (c, step);
            }
        }
        Some((fallback.0, Some(fallback.1)))
    }

    /// Two-pass (Harris) ratio test. The first pass bounds the step with a
    /// small relaxation; the second picks, among rows within that bound, the
    /// largest pivot (artificial rows weighted double), or the smallest basis
    /// index under Bland's rule. Returns the row, whether the step is
    /// degenerate, and the pivot magnitude relative to the largest entry of
    /// the column.
    fn ratio_test(&self, c: usize, bland: bool) -> Option<RatioStep> {
        let w = self.width;
        let zero = S::zero();
        let eligible = |r: usize| !self.redundant[r] && self.t[r * w + c] > self.pivot_tol;
        let level = |r: usize| {
            let b = &self.t[r * w + self.cols];
            if *b > zero {
                b.clone()
            } else {
                zero.clone()
            }
        };
        let mut bound: Option<S> = None;
        for r in (0..self.m).filter(|&r| eligible(r)) {
            let q = (level(r) + self.relax.clone()) / self.t[r * w + c].clone();
            if bound.as_ref().is_none_or(|m| q < *m) {
                bound = Some(q);
            }
        }
        let bound = bound?;
        let mut best: Option<(usize, S, S)> = None;
        for r in (0..self.m).filter(|&r| eligible(r)) {
            let a = &self.t[r * w + c];
            let ratio = level(r) / a.clone();
            if ratio > bound {
                continue;
            }
            let score = if self.basis[r] >= self.cols { a.clone() + a.clone() } else { a.clone() };
            let better = match &best {
                None => true,
                Some((p, _, _)) if bland => self.basis[r] < self.basis[*p],
                Some((_, s, _)) => score > *s,
            };
            if better {
                best = Some((r, score, ratio));
            }
        }
        let (r, _, ratio) = best?;
        let scale = (0..self.m).map(|i| self.t[i * w + c].to_f64().abs()).fold(0.0, f64::max);
        let quality = self.t[r * w + c].to_f64() / scale;
        Some((r, ratio <= self.degenerate_step, quality))
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let inv = S::one() / self.t[r * w + c].clone();
        self.nz.clear();
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for (k, v) in row.iter_mut().enumerate() {
                if !v.is_zero() {
                    *v = v.clone() * inv.clone();
                    self.nz.push(k);
                }
            }
            row[c] = S::one();
            self.scratch.clone_from_slice(row);
        }
        let rhs = self.cols;
        let floor = -(self.relax.clone() + self.relax.clone());
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            S::sub_scaled(row, &f, &self.scratch, &self.nz);
            row[c] = S::zero();
            // Harris steps may overshoot a bound by at most the relaxation.
            if row[rhs] < S::zero() && row[rhs] > floor {
                row[rhs] = S::zero();
            }
        }
        let f = self.obj[c].clone();
        if !f.is_zero() {
            S::sub_scaled(&mut self.obj, &f, &self.scratch, &self.nz);
            self.obj[c] = S::zero();
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Pivots zero-level artificials out of the basis; rows with no usable
    /// structural entry are linearly dependent and get retired.
    fn drive_out_artificials(&mut self) {
        let w = self.width;
        for r in 0..self.m {
            if self.basis[r] < self.cols {
                continue;
            }
            let mut best = None;
            let mut best_abs = self.drive_tol.clone();
            for j in 0..self.cols {
                let v = &self.t[r * w + j];
                let a = if *v < S::zero() { -v.clone() } else { v.clone() };
                if a > best_abs && !self.basis.contains(&j) {
                    best_abs = a;
                    best = Some(j);
                }
            }
            match best {
                Some(c) => self.pivot(r, c),
                None => {
                    self.t[r * w..(r + 1) * w].iter_mut().for_each(|v| *v = S::zero());
                    self.redundant[r] = true;
                }
            }
        }
    }

    fn primal(&self, num_vars: usize) -> Vec<f64> {
        let mut x = vec![0.0; num_vars];
        for r in 0..self.m {
            let b = self.basis[r];
            if !self.redundant[r] && b < num_vars {
                x[b] = self.t[r * self.width + self.cols].to_f64().max(0.0);
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(lp: &LinearProgram) -> LpSolution {
        match lp.solve(&SimplexOptions::default()).unwrap() {
            LpStatus::Optimal(s) => s,
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
        let mut lp = LinearProgram::new(2);
        lp.set_objective(&[-3.0, -5.0]);
        lp.add_row(&[1.0, 0.0], Relation::Le, 4.0);
        lp.add_row(&[0.0, 2.0], Relation::Le, 12.0);
        lp.add_row(&[3.0, 2.0], Relation::Le, 18.0);
        let s = optimal(&lp);
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn equality_and_ge_rows_need_phase_one() {
        // min x + y s.t. x + y = 2, x - y >= 1, x <= 10  ->  objective 2, x >= 1.5
        let mut lp = LinearProgram::new(2);
        lp.set_objective(&[1.0, 1.0]);
        lp.add_row(&[1.0, 1.0], Relation::Eq, 2.0);
        lp.add_row(&[1.0, -1.0], Relation::Ge, 1.0);
        lp.add_row(&[1.0, 0.0], Relation::Le, 10.0);
        let s = optimal(&lp);
        assert!((s.objective - 2.0).abs() < 1e-9);
        assert!(s.x[0] - s.x[1] >= 1.0 - 1e-9);
    }

    #[test]
    fn detects_infeasibility() {
        let mut lp = LinearProgram::new(1);
        lp.add_row(&[1.0], Relation::Ge, 3.0);
        lp.add_row(&[1.0], Relation::Le, 1.0);
        match lp.solve(&SimplexOptions::default()).unwrap() {
            LpStatus::Infeasible { residual } => assert!((residual - 2.0).abs() < 1e-9),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn detects_unboundedness() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(&[-1.0, 0.0]);
        lp.add_row(&[1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(lp.solve(&SimplexOptions::default()).unwrap(), LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities_are_retired() {
        let mut lp = LinearProgram::new(3);
        lp.set_objective(&[1.0, 2.0, 3.0]);
        lp.add_row(&[1.0, 1.0, 1.0], Relation::Eq, 1.0);
        lp.add_row(&[2.0, 2.0, 2.0], Relation::Eq, 2.0);
        lp.add_row(&[0.0, 1.0, 1.0], Relation::Eq, 0.5);
        let s = optimal(&lp);
        assert!((s.objective - 1.5).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Cycles under textbook Dantzig pricing without anti-cycling.
        let mut lp = LinearProgram::new(4);
        lp.set_objective(&[-0.75, 20.0, -0.5, 6.0]);
        lp.add_row(&[0.25, -8.0, -1.0, 9.0], Relation::Le, 0.0);
        lp.add_row(&[0.5, -12.0, -0.5, 3.0], Relation::Le, 0.0);
        lp.add_row(&[0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let s = optimal(&lp);
        assert!((s.objective + 1.25).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn iteration_budget_is_reported() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(&[-1.0, -1.0]);
        lp.add_row(&[1.0, 0.0], Relation::Le, 1.0);
        lp.add_row(&[0.0, 1.0], Relation::Le, 1.0);
        let opts = SimplexOptions { max_iter: Some(0), ..Default::default() };
        assert!(matches!(lp.solve(&opts), Err(GeometryError::Solver { .. })));
    }

    #[test]
    fn exact_mode_agrees_on_small_programs() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(&[-3.0, -5.0]);
        lp.add_row(&[1.0, 0.0], Relation::Le, 4.0);
        lp.add_row(&[0.0, 2.0], Relation::Le, 12.0);
        lp.add_row(&[3.0, 2.0], Relation::Le, 18.0);
        match lp.solve(&SimplexOptions::exact()).unwrap() {
            LpStatus::Optimal(s) => assert_eq!(s.x, vec![2.0, 6.0]),
            other => panic!("{other:?}"),
        }

        let mut lp = LinearProgram::new(1);
        lp.add_row(&[1.0], Relation::Ge, 3.0);
        lp.add_row(&[1.0], Relation::Le, 1.0);
        assert!(matches!(lp.solve(&SimplexOptions::exact()).unwrap(), LpStatus::Infeasible { .. }));
    }

    #[test]
    fn exact_mode_sees_infeasibility_below_the_float_tolerance() {
        // x = 1 and x = 1 + 2^-40 differ by less than `feas_tol`.
        let mut lp = LinearProgram::new(1);
        lp.add_row(&[1.0], Relation::Eq, 1.0);
        lp.add_row(&[1.0], Relation::Eq, 1.0 + 2f64.powi(-40));
        assert!(matches!(lp.solve(&SimplexOptions::default()).unwrap(), LpStatus::Optimal(_)));
        assert!(matches!(lp.solve(&SimplexOptions::exact()).unwrap(), LpStatus::Infeasible { .. }));
    }
}
