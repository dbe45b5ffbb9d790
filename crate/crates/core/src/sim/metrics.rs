use std::fmt::Write as _;

use super::SimError;
use crate::geometry::{ConstraintSet, Point};

/// `V = Σ_i Σ_j ‖x_i − x_j‖²` over ordered pairs.
pub fn disagreement(states: &[Point]) -> f64 {
    let mut total = 0.0;
    for (a, x) in states.iter().enumerate() {
        for y in &states[a + 1..] {
            total += x.iter().zip(y.iter()).map(|(p, q)| (p - q) * (p - q)).sum::<f64>();
        }
    }
    2.0 * total
}

/// `W = Σ_i ‖θ_i − θ*‖²`.
pub fn optimality_gap(states: &[Point], target: &Point) -> f64 {
    states.iter().map(|x| x.distance(target).powi(2)).sum()
}

/// Largest distance from an agent to its own constraint set.
pub fn max_infeasibility(
    states: &[Point],
    constraints: &[ConstraintSet],
    tol: f64,
    max_iter: usize,
) -> Result<f64, SimError> {
    let mut worst: f64 = 0.0;
    for (x, c) in states.iter().zip(constraints) {
        worst = worst.max(c.distance(x, tol, max_iter)?);
    }
    Ok(worst)
}

/// One row of the metric log.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSample {
    pub t: usize,
    pub v: f64,
    pub w: Option<f64>,
    pub feasibility: f64,
}

/// Trailing window used for the `rate_window` column.
pub const RATE_WINDOW: usize = 10;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricSeries {
    pub t: Vec<usize>,
    pub v: Vec<f64>,
    /// Present for learning runs.
    pub w: Option<Vec<f64>>,
    pub feasibility: Vec<f64>,
}

impl MetricSeries {
    pub fn push(&mut self, s: &MetricSample) {
        self.t.push(s.t);
        self.v.push(s.v);
        if let Some(w) = s.w {
            self.w.get_or_insert_with(Vec::new).push(w);
        }
        self.feasibility.push(s.feasibility);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last_v(&self) -> Option<f64> {
        self.v.last().copied()
    }

    /// Slope of `ln V` over the `RATE_WINDOW` samples ending at row `k`,
    /// when all of them are positive.
    pub fn rate_window(&self, k: usize) -> Option<f64> {
        if k + 1 < RATE_WINDOW {
            return None;
        }
        let window = &self.v[k + 1 - RATE_WINDOW..=k];
        if window.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
            return None;
        }
        let logs: Vec<f64> = window.iter().map(|v| v.ln()).collect();
        least_squares(&logs).map(|(slope, _)| slope)
    }

    /// CSV with header `t,V,W,feasibility,rate_window`; undefined cells are
    /// left empty. Values are written with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,V,W,feasibility,rate_window\n");
        for k in 0..self.len() {
            let w = self.w.as_ref().map(|w| num(w[k])).unwrap_or_default();
            let rate = self.rate_window(k).map(num).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{}",
                self.t[k],
                num(self.v[k]),
                w,
                num(self.feasibility[k]),
                rate
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Slope and r² of the least-squares line through `(k, ys[k])`.
fn least_squares(ys: &[f64]) -> Option<(f64, f64)> {
    let k = ys.len() as f64;
    if ys.len() < 2 {
        return None;
    }
    let mean_x = (k - 1.0) / 2.0;
    let mean_y = ys.iter().sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (i, &y) in ys.iter().enumerate() {
        let dx = i as f64 - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some((slope, r2))
}

/// Minimum usable samples for a rate fit.
pub const MIN_FIT_SAMPLES: usize = 5;

/// Fitted `ln V(t) ≈ a + rate·t` after dropping `burn_in` samples. The window
/// ends before the first non-positive or non-finite sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub rate: f64,
    pub r_squared: f64,
    pub samples: usize,
}

pub fn fit_exponential_rate(series: &[f64], burn_in: usize) -> Result<RateFit, SimError> {
    let usable: Vec<f64> = series
        .iter()
        .skip(burn_in)
        .take_while(|v| **v > 0.0 && v.is_finite())
        .map(|v| v.ln())
        .collect();
    if usable.len() < MIN_FIT_SAMPLES {
        return Err(SimError::InsufficientData { usable: usable.len(), required: MIN_FIT_SAMPLES });
    }
    let (rate, r_squared) = least_squares(&usable).expect("at least two samples");
    Ok(RateFit { rate, r_squared, samples: usable.len() })
}
