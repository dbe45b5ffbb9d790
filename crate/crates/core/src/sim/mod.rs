//! Synchronous discrete-time engine for resilient constrained consensus and
//! resilient distributed learning.

mod learning;
mod metrics;

use std::collections::VecDeque;

use thiserror::Error;

use crate::adversary::AdversaryModel;
use crate::geometry::{
    self, ConstraintSet, GeometryError, Point, PointSet, DEFAULT_TOL, DYKSTRA_MAX_ITER, DYKSTRA_TOL,
};
use crate::graph::{Topology, TopologySchedule};
use crate::id::AgentId;
use crate::resilient::{
    default_sigma, recover_weights, required_degree, resilient_combination, NeighborObservation,
    ResilientCombination, ResilientError,
};

pub use learning::{FeatureMap, LearningProblem, ReferenceBatch, Sample, SynthesisSpec};
pub use metrics::{
    disagreement, fit_exponential_rate, max_infeasibility, optimality_gap, MetricSample,
    MetricSeries, RateFit, MIN_FIT_SAMPLES, RATE_WINDOW,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SimError {
    #[error("invalid experiment: {0}")]
    InvalidInput(String),
    #[error("validation failed:\n{}", .0.join("\n"))]
    Validation(Vec<String>),
    #[error("step {step}, agent {agent}: {source}")]
    Resilient { step: usize, agent: AgentId, source: ResilientError },
    #[error("step {step}, agent {agent}: projection failed: {source}")]
    Projection { step: usize, agent: AgentId, source: GeometryError },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{usable} usable samples, at least {required} needed")]
    InsufficientData { usable: usize, required: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Resilient convex combination, then projection.
    Resilient,
    /// Uniform average of every received state, then projection.
    Naive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaPolicy {
    /// `σ = nκ + 2`.
    Default,
    Fixed(usize),
}

impl SigmaPolicy {
    pub fn sigma(&self, dim: usize, kappa: usize) -> usize {
        match *self {
            SigmaPolicy::Default => default_sigma(dim, kappa),
            SigmaPolicy::Fixed(s) => s,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepConfig {
    pub branch: Branch,
    pub sigma: SigmaPolicy,
    /// Geometry tolerance for hull tests and LPs.
    pub tol: f64,
    pub dykstra_tol: f64,
    pub dykstra_max_iter: usize,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            branch: Branch::Resilient,
            sigma: SigmaPolicy::Default,
            tol: DEFAULT_TOL,
            dykstra_tol: DYKSTRA_TOL,
            dykstra_max_iter: DYKSTRA_MAX_ITER,
        }
    }
}

/// Number of recent metric samples kept on the state.
pub const HISTORY_LEN: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub t: usize,
    /// `states[k]` belongs to agent `k + 1`.
    pub states: Vec<Point>,
    pub history: VecDeque<MetricSample>,
}

impl SimState {
    pub fn new(states: Vec<Point>) -> Self {
        SimState { t: 0, states, history: VecDeque::with_capacity(HISTORY_LEN) }
    }

    pub fn state(&self, i: AgentId) -> &Point {
        &self.states[i.index()]
    }

    fn record(&mut self, sample: MetricSample) {
        if self.history.len() == HISTORY_LEN {
            self.history.pop_front();
        }
        self.history.push_back(sample);
    }

    fn advance(&self, states: Vec<Point>) -> SimState {
        SimState { t: self.t + 1, states, history: self.history.clone() }
    }
}

/// Everything an agent computed in one step, kept for analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// Combined value before the gradient and projection steps.
    pub pre_projection: Vec<Point>,
    /// Normal in-neighbor states each agent received, its own included.
    pub normal_views: Vec<PointSet>,
    /// Resilient branch only.
    pub combinations: Vec<Option<ResilientCombination>>,
}

/// Composes the inbox of agent `i`: normal in-neighbor states, then the
/// adversary's vectors labelled `m + 1, m + 2, …`.
fn inbox(
    state: &SimState,
    topo: &Topology,
    adv: Option<&AdversaryModel>,
    i: AgentId,
) -> Result<(PointSet, PointSet), GeometryError> {
    let ids = topo.in_neighbors(i).to_vec();
    let pts: Vec<Point> = ids.iter().map(|&j| state.state(j).clone()).collect();
    let normals = PointSet::new(pts.clone(), ids.clone())?;
    let Some(adv) = adv else {
        return Ok((normals.clone(), normals));
    };
    let kappa = adv.kappa_at(i, topo.byzantine_in(i));
    let injected = adv.inject(i, state.t, &normals, kappa);
    let m = topo.m();
    let mut all_pts = pts;
    let mut all_ids = ids;
    for (k, p) in injected.into_iter().enumerate() {
        all_pts.push(p);
        all_ids.push(AgentId(m + 1 + k));
    }
    Ok((normals, PointSet::new(all_pts, all_ids)?))
}

fn combine_all(
    state: &SimState,
    topo: &Topology,
    adv: Option<&AdversaryModel>,
    cfg: &StepConfig,
) -> Result<StepRecord, SimError> {
    let m = topo.m();
    let mut record = StepRecord {
        pre_projection: Vec::with_capacity(m),
        normal_views: Vec::with_capacity(m),
        combinations: Vec::with_capacity(m),
    };
    for i in topo.agents() {
        let (normals, all) = inbox(state, topo, adv, i)?;
        let wrap = |source| SimError::Resilient { step: state.t, agent: i, source };
        let (value, combo) = match cfg.branch {
            Branch::Resilient => {
                let kappa = topo.byzantine_in(i);
                let sigma = cfg.sigma.sigma(all.dim(), kappa);
                let obs = NeighborObservation::new(i, all, kappa, sigma).map_err(wrap)?;
                let combo = resilient_combination(&obs, cfg.tol).map_err(wrap)?;
                (combo.value.clone(), Some(combo))
            }
            Branch::Naive => (mean(all.points()), None),
        };
        record.pre_projection.push(value);
        record.normal_views.push(normals);
        record.combinations.push(combo);
    }
    Ok(record)
}

fn mean(points: &[Point]) -> Point {
    let mut c = vec![0.0; points[0].dim()];
    for p in points {
        for (a, v) in c.iter_mut().zip(p.iter()) {
            *a += v;
        }
    }
    let k = points.len() as f64;
    Point::from(c.into_iter().map(|v| v / k).collect::<Vec<_>>())
}

fn project_all(
    step: usize,
    values: impl Iterator<Item = (Point, AgentId)>,
    constraint: impl Fn(AgentId) -> ConstraintSet,
    cfg: &StepConfig,
) -> Result<Vec<Point>, SimError> {
    values
        .map(|(v, i)| {
            geometry::project(&v, &constraint(i), cfg.dykstra_tol, cfg.dykstra_max_iter)
                .map_err(|source| SimError::Projection { step, agent: i, source })
        })
        .collect()
}

/// `x_i(t+1) = P_i(v_i(t))`, all agents reading time-`t` states.
pub fn step_consensus(
    state: &SimState,
    topo: &Topology,
    adv: Option<&AdversaryModel>,
    constraints: &[ConstraintSet],
    cfg: &StepConfig,
) -> Result<(SimState, StepRecord), SimError> {
    let record = combine_all(state, topo, adv, cfg)?;
    let next = project_all(
        state.t,
        record.pre_projection.iter().cloned().zip(topo.agents()),
        |i| constraints[i.index()].clone(),
        cfg,
    )?;
    Ok((state.advance(next), record))
}

/// `θ_i(t+1) = P(v_i(t) − η g_i(θ_i(t)))` with `η = 1/t`; `t` starts at 1.
pub fn step_learning(
    state: &SimState,
    topo: &Topology,
    adv: Option<&AdversaryModel>,
    problem: &LearningProblem,
    t: usize,
    sample_seed: u64,
    cfg: &StepConfig,
) -> Result<(SimState, StepRecord), SimError> {
    if t == 0 {
        return Err(SimError::InvalidInput("learning steps start at t = 1".into()));
    }
    let record = combine_all(state, topo, adv, cfg)?;
    let eta = 1.0 / t as f64;
    let moved = record.pre_projection.iter().zip(topo.agents()).map(|(v, i)| {
        let theta = state.state(i);
        let s = &problem.samples[i.index()][problem.sample_index(sample_seed, i, t)];
        let g = problem.gradient(theta.coords(), s);
        let c: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a - eta * b).collect();
        (Point::from(c), i)
    });
    let ball = problem.constraint();
    let next = project_all(state.t, moved, |_| ball.clone(), cfg)?;
    Ok((state.advance(next), record))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearningSetup {
    pub problem: LearningProblem,
    pub sample_seed: u64,
}

/// A fully specified run.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub schedule: TopologySchedule,
    pub adversary: Option<AdversaryModel>,
    /// One per agent; ignored for learning runs, which use the `ρ`-ball.
    pub constraints: Vec<ConstraintSet>,
    pub init: Vec<Point>,
    pub step: StepConfig,
    pub horizon: usize,
    /// Stop once `V` drops below this value.
    pub stop_below: Option<f64>,
    pub learning: Option<LearningSetup>,
}

/// Default consensus threshold.
pub const CONSENSUS_THRESHOLD: f64 = 1e-12;
/// Default horizon.
pub const DEFAULT_HORIZON: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub metrics: MetricSeries,
    pub final_state: SimState,
    /// Step at which `V` first fell below `stop_below`.
    pub stopped_at: Option<usize>,
}

impl Experiment {
    pub fn m(&self) -> usize {
        self.schedule.m()
    }

    fn dim(&self) -> usize {
        self.init.first().map(Point::dim).unwrap_or(0)
    }

    /// Checks shapes and, for the resilient branch, that every agent in every
    /// scheduled topology receives at least `(n + 1)κ + 2` states.
    pub fn validate(&self) -> Result<(), SimError> {
        let m = self.m();
        let n = self.dim();
        let mut problems = Vec::new();
        if self.init.len() != m {
            problems.push(format!("{} initial states for {m} agents", self.init.len()));
        }
        if n == 0 || self.init.iter().any(|p| p.dim() != n) {
            problems.push("initial states must share a positive dimension".into());
        }
        match &self.learning {
            Some(l) => {
                if l.problem.agents() != m || l.problem.dim() != n {
                    problems.push("learning problem does not match agents or dimension".into());
                }
            }
            None => {
                if self.constraints.len() != m {
                    problems
                        .push(format!("{} constraint sets for {m} agents", self.constraints.len()));
                }
                for (k, c) in self.constraints.iter().enumerate() {
                    if c.validate_dim(n).is_err() {
                        problems.push(format!(
                            "agent {}: constraint dimension differs from {n}",
                            k + 1
                        ));
                    }
                }
            }
        }
        for (idx, (g, _)) in self.schedule.entries().iter().enumerate() {
            for i in g.agents() {
                let declared = g.byzantine_in(i);
                let sent = self.adversary.as_ref().map_or(0, |a| a.kappa_at(i, declared));
                if sent > declared {
                    problems.push(format!(
                        "topology {idx}, agent {i}: adversary sends {sent} > declared κ = {declared}"
                    ));
                }
                if self.step.branch == Branch::Resilient {
                    let d = g.in_neighbors(i).len() + sent;
                    let need = required_degree(n, declared);
                    if d < need {
                        problems.push(format!(
                            "topology {idx}, agent {i}: d = {d} < (n+1)κ+2 = {need}"
                        ));
                    }
                    let sigma = self.step.sigma.sigma(n, declared);
                    if sigma < default_sigma(n, declared) || sigma + declared > d {
                        problems.push(format!(
                            "topology {idx}, agent {i}: σ = {sigma} outside [{}, {}]",
                            default_sigma(n, declared),
                            d.saturating_sub(declared)
                        ));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SimError::Validation(problems))
        }
    }

    fn sample(&self, state: &SimState) -> Result<MetricSample, SimError> {
        let v = disagreement(&state.states);
        let (w, feasibility) = match &self.learning {
            Some(l) => {
                let ball = vec![l.problem.constraint(); self.m()];
                (
                    Some(optimality_gap(&state.states, &l.problem.theta_star)),
                    max_infeasibility(
                        &state.states,
                        &ball,
                        self.step.dykstra_tol,
                        self.step.dykstra_max_iter,
                    )?,
                )
            }
            None => (
                None,
                max_infeasibility(
                    &state.states,
                    &self.constraints,
                    self.step.dykstra_tol,
                    self.step.dykstra_max_iter,
                )?,
            ),
        };
        Ok(MetricSample { t: state.t, v, w, feasibility })
    }
}

pub fn run(exp: &Experiment) -> Result<RunOutput, SimError> {
    run_observed(exp, |_, _, _| {})
}

/// Like [`run`], calling `observe(before, topology, record)` after each step.
pub fn run_observed(
    exp: &Experiment,
    mut observe: impl FnMut(&SimState, &Topology, &StepRecord),
) -> Result<RunOutput, SimError> {
    exp.validate()?;
    let mut state = SimState::new(exp.init.clone());
    let mut metrics = MetricSeries::default();
    let first = exp.sample(&state)?;
    metrics.push(&first);
    state.record(first);
    let below = |s: &MetricSample| exp.stop_below.is_some_and(|th| s.v < th);
    if metrics.v.first().is_some_and(|&v| exp.stop_below.is_some_and(|th| v < th)) {
        return Ok(RunOutput { metrics, final_state: state, stopped_at: Some(0) });
    }
    let mut stopped_at = None;
    for t in 0..exp.horizon {
        let topo = exp.schedule.at(t);
        let adv = exp.adversary.as_ref();
        let (mut next, record) = match &exp.learning {
            Some(l) => {
                step_learning(&state, topo, adv, &l.problem, t + 1, l.sample_seed, &exp.step)?
            }
            None => step_consensus(&state, topo, adv, &exp.constraints, &exp.step)?,
        };
        observe(&state, topo, &record);
        let sample = exp.sample(&next)?;
        metrics.push(&sample);
        let done = below(&sample);
        next.record(sample);
        state = next;
        if done {
            stopped_at = Some(state.t);
            break;
        }
    }
    Ok(RunOutput { metrics, final_state: state, stopped_at })
}

/// Recovered resilient weights `w*_iℓ` for one step.
#[derive(Clone, Debug, PartialEq)]
pub struct ResilientSubgraph {
    /// `in_edges[k]` holds `(sender, weight)` pairs of weight at least `tol`
    /// for agent `k + 1`.
    pub in_edges: Vec<Vec<(AgentId, f64)>>,
    /// Agents whose value admits no certified weights over their normal
    /// neighbors, which means κ was under-declared.
    pub unrecovered: Vec<AgentId>,
}

impl ResilientSubgraph {
    /// Agents that `j` influences.
    pub fn out_neighbors(&self, j: AgentId) -> Vec<AgentId> {
        self.in_edges
            .iter()
            .enumerate()
            .filter(|(k, edges)| *k != j.index() && edges.iter().any(|(s, _)| *s == j))
            .map(|(k, _)| AgentId::from_index(k))
            .collect()
    }
}

/// Rebuilds the weighted graph implied by a resilient step: for each agent,
/// certified weights over its true normal in-neighbors.
pub fn resilient_subgraph(record: &StepRecord, tol: f64) -> Result<ResilientSubgraph, SimError> {
    let mut in_edges = Vec::with_capacity(record.normal_views.len());
    let mut unrecovered = Vec::new();
    for (k, (normals, combo)) in record.normal_views.iter().zip(&record.combinations).enumerate() {
        let Some(combo) = combo else {
            return Err(SimError::InvalidInput("step was not resilient".into()));
        };
        match recover_weights(&combo.value, normals, combo.gamma, combo.alpha, tol)? {
            Some(w) => in_edges.push(
                normals
                    .labels()
                    .iter()
                    .zip(w.as_slice())
                    .filter(|(_, &x)| x >= tol)
                    .map(|(&id, &x)| (id, x))
                    .collect(),
            ),
            None => {
                unrecovered.push(AgentId::from_index(k));
                in_edges.push(Vec::new());
            }
        }
    }
    Ok(ResilientSubgraph { in_edges, unrecovered })
}
