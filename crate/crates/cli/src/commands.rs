//! `run`, `verify` and `combine`. Each returns the text for stdout; the
//! binary only maps errors to exit codes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use rescon_core::geometry::hull_contains;
use rescon_core::graph::{check_corollary1, is_r_robust, parse_topology};
use rescon_core::id::format_set;
use rescon_core::resilient::{default_sigma, required_degree, trace_combination};
use rescon_core::sim::{
    fit_exponential_rate, run_observed, RateFit, ReferenceBatch, CONSENSUS_THRESHOLD,
};
use rescon_core::{
    resilient_combination, AgentId, Branch, Experiment, GraphError, NeighborObservation, Point,
    ResilientError, RunOutput, SimError, Witness,
};

use crate::report::{self, num, Series};
use crate::scenario::{Scenario, SeedRange};
use crate::states::parse_states;
use crate::{presets, CliError};

/// Samples dropped before fitting `ln V`.
pub const BURN_IN: usize = 10;

/// RMS pairwise distance, in units of the geometry tolerance, below which
/// tolerance slack in the combination step dominates the contraction.
pub const FLOOR_SPREAD: f64 = 100.0;

/// Where the pre-floor window ends: the consensus threshold, or the level at
/// which the RMS distance over the `agents(agents − 1)` ordered pairs is
/// `FLOOR_SPREAD · tol`, whichever is higher.
pub fn v_floor(agents: usize, tol: f64) -> f64 {
    let pairs = (agents * agents.saturating_sub(1)) as f64;
    CONSENSUS_THRESHOLD.max(pairs * (FLOOR_SPREAD * tol).powi(2))
}

/// Rate fit over the samples before `V` first drops below
/// [`v_floor`], after the burn-in.
pub fn pre_floor_fit(v: &[f64], agents: usize, tol: f64) -> Result<RateFit, SimError> {
    let floor = v_floor(agents, tol);
    let end = v.iter().position(|&x| x < floor).unwrap_or(v.len());
    fit_exponential_rate(&v[..end], BURN_IN)
}

/// Where a scenario came from; file scenarios resolve relative paths
/// against their directory.
pub struct Loaded {
    pub scenario: Scenario,
    pub base_dir: PathBuf,
}

/// `preset:NAME` selects a built-in scenario, anything else is a file path.
pub fn load_scenario(arg: &str) -> Result<Loaded, CliError> {
    if let Some(name) = arg.strip_prefix("preset:") {
        let scenario = presets::by_name(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown preset {name:?}, expected one of {}",
                presets::NAMES.join(", ")
            ))
        })?;
        return Ok(Loaded { scenario, base_dir: PathBuf::from(".") });
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{arg}: {e}")))?;
    let scenario = Scenario::from_json(&text)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { scenario, base_dir })
}

/// One finished seed.
pub struct SeedRun {
    pub seed: u64,
    pub experiment: Experiment,
    pub output: RunOutput,
    /// Steps whose pre-projection values were checked against the hull.
    pub safety_checked: usize,
    /// `m‖θ_ref(t) − θ*‖²` for the one-sample-per-step centralized
    /// reference, learning runs only.
    pub reference_w: Option<Vec<f64>>,
    /// The same for the reference that averages every agent's draw.
    pub batch_reference_w: Option<Vec<f64>>,
}

fn sim_error(e: SimError) -> CliError {
    match e {
        SimError::InvalidInput(_) | SimError::Validation(_) => CliError::Invalid(e.to_string()),
        _ => CliError::Runtime(e.to_string()),
    }
}

pub fn run_seed(sc: &Scenario, seed: u64, tol: f64, base_dir: &Path) -> Result<SeedRun, CliError> {
    let experiment = sc.build(seed, tol, base_dir)?;
    let check = sc.safety_tol.filter(|_| experiment.step.branch == Branch::Resilient);
    let mut checked = 0;
    let mut violation: Option<String> = None;
    let output = run_observed(&experiment, |before, _, record| {
        let Some(stol) = check else { return };
        if violation.is_some() {
            return;
        }
        for (k, (v, normals)) in record.pre_projection.iter().zip(&record.normal_views).enumerate() {
            match hull_contains(v, normals, stol) {
                Ok(true) => {}
                Ok(false) => {
                    violation = Some(format!(
                        "step {}, agent {}: combined value {} lies outside the hull of its normal neighbors (tol {stol:e})",
                        before.t,
                        AgentId::from_index(k),
                        report::point(v.coords())
                    ));
                    return;
                }
                Err(e) => {
                    violation = Some(format!("step {}, agent {}: {e}", before.t, AgentId::from_index(k)));
                    return;
                }
            }
        }
        checked += 1;
    })
    .map_err(sim_error)?;
    if let Some(v) = violation {
        return Err(CliError::Runtime(format!("seed {seed}: safety invariant violated at {v}")));
    }
    let reference = |batch| {
        experiment.learning.as_ref().map(|l| {
            let m = experiment.m();
            let mut mean = vec![0.0; l.problem.dim()];
            for p in &experiment.init {
                for (a, c) in mean.iter_mut().zip(p.iter()) {
                    *a += c / m as f64;
                }
            }
            l.problem
                .centralized_reference(
                    &Point::from(mean),
                    l.sample_seed,
                    output.metrics.len() - 1,
                    batch,
                )
                .iter()
                .map(|th| m as f64 * th.distance(&l.problem.theta_star).powi(2))
                .collect()
        })
    };
    let reference_w = reference(ReferenceBatch::RoundRobin);
    let batch_reference_w = reference(ReferenceBatch::AllAgents);
    Ok(SeedRun {
        seed,
        experiment,
        output,
        safety_checked: checked,
        reference_w,
        batch_reference_w,
    })
}

pub fn summary(sc: &Scenario, run: &SeedRun, tol: f64) -> String {
    let out = &run.output;
    let states = &out.final_state.states;
    let m = states.len();
    let n = states.first().map_or(0, Point::dim);
    let mut mean = vec![0.0; n];
    for p in states {
        for (a, c) in mean.iter_mut().zip(p.iter()) {
            *a += c / m as f64;
        }
    }
    let spread =
        states.iter().flat_map(|a| states.iter().map(move |b| a.distance(b))).fold(0.0, f64::max);
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, "scenario: {}", sc.name);
    if let Some(p) = &sc.provenance {
        let _ = writeln!(w, "provenance: {p}");
    }
    let _ = writeln!(w, "seed: {}", run.seed);
    let branch = match run.experiment.step.branch {
        Branch::Resilient => "resilient",
        Branch::Naive => "naive",
    };
    let _ = writeln!(w, "branch: {branch}");
    let _ = writeln!(w, "agents: {m}");
    let _ = writeln!(w, "dimension: {n}");
    let _ = writeln!(w, "tolerance: {tol:e}");
    let _ = writeln!(w, "steps: {}", out.metrics.len() - 1);
    match out.stopped_at {
        Some(t) => {
            let _ = writeln!(w, "stopped_at: {t}");
        }
        None => {
            let _ = writeln!(w, "stopped_at: horizon");
        }
    }
    let _ = writeln!(w, "final_V: {}", num(out.metrics.last_v().unwrap_or(f64::NAN)));
    let _ = writeln!(
        w,
        "final_feasibility: {}",
        num(*out.metrics.feasibility.last().unwrap_or(&f64::NAN))
    );
    let _ = writeln!(w, "consensus_point: {}", report::point(&mean));
    let _ = writeln!(w, "max_pairwise_distance: {}", num(spread));
    match pre_floor_fit(&out.metrics.v, m, tol) {
        Ok(fit) => {
            let _ = writeln!(w, "fitted_rate: {}", num(fit.rate));
            let _ = writeln!(w, "fit_r_squared: {}", num(fit.r_squared));
            let _ = writeln!(
                w,
                "fit_samples: {} (burn-in {BURN_IN}, window ends below V = {})",
                fit.samples,
                num(v_floor(m, tol))
            );
        }
        Err(e) => {
            let _ = writeln!(w, "fitted_rate: unavailable ({e})");
        }
    }
    if let (Some(ws), Some(rs)) = (&out.metrics.w, &run.reference_w) {
        let (fw, fr) =
            (ws.last().copied().unwrap_or(f64::NAN), rs.last().copied().unwrap_or(f64::NAN));
        let _ = writeln!(w, "final_W: {}", num(fw));
        let _ = writeln!(w, "reference_W: {}", num(fr));
        let _ = writeln!(w, "W_ratio: {}", num(fw / fr));
    }
    if let (Some(ws), Some(rs)) = (&out.metrics.w, &run.batch_reference_w) {
        let (fw, fr) =
            (ws.last().copied().unwrap_or(f64::NAN), rs.last().copied().unwrap_or(f64::NAN));
        let _ = writeln!(w, "batch_reference_W: {}", num(fr));
        let _ = writeln!(w, "batch_W_ratio: {}", num(fw / fr));
    }
    match sc.safety_tol {
        Some(t) if run.experiment.step.branch == Branch::Resilient => {
            let _ = writeln!(w, "safety: held at tol {t:e} over {} steps", run.safety_checked);
        }
        _ => {
            let _ = writeln!(w, "safety: not checked");
        }
    }
    s
}

pub fn chart(sc: &Scenario, run: &SeedRun) -> String {
    let metrics = &run.output.metrics;
    let mut series = vec![Series { label: "V(t)", color: "#1f4e9c", values: &metrics.v }];
    if let Some(w) = &metrics.w {
        series.push(Series { label: "W(t)", color: "#c0392b", values: w });
    }
    if let Some(r) = &run.reference_w {
        series.push(Series { label: "W reference", color: "#7f8c8d", values: r });
    }
    if let Some(r) = &run.batch_reference_w {
        series.push(Series { label: "W batch reference", color: "#27ae60", values: r });
    }
    report::log_chart(&format!("{} (seed {})", sc.name, run.seed), &series)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_artifacts(dir: &Path, sc: &Scenario, run: &SeedRun, tol: f64) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write(&dir.join("metrics.csv"), &run.output.metrics.to_csv())?;
    write(&dir.join("metrics.svg"), &chart(sc, run))?;
    write(&dir.join("summary.txt"), &summary(sc, run, tol))
}

/// Runs every seed, in parallel, and writes `<out>/` for a single seed or
/// `<out>/seed-<s>/` plus `<out>/seeds.csv` for several. Seeds that finish
/// are written even when another one fails; the first failure in seed
/// order is returned.
pub fn cmd_run(
    arg: &str,
    out: Option<&Path>,
    seeds: Option<SeedRange>,
    tol: f64,
) -> Result<String, CliError> {
    let Loaded { scenario: sc, base_dir } = load_scenario(arg)?;
    let seeds = seeds.unwrap_or(sc.seeds);
    let out_dir = match (out, &sc.output) {
        (Some(o), _) => o.to_path_buf(),
        (None, Some(o)) => base_dir.join(o),
        (None, None) => PathBuf::from("rescon-out").join(&sc.name),
    };
    let list: Vec<u64> = seeds.seeds().collect();
    let results: Vec<Result<SeedRun, CliError>> =
        list.par_iter().map(|&s| run_seed(&sc, s, tol, &base_dir)).collect();
    let single = list.len() == 1;
    let mut stdout = String::new();
    let mut table =
        String::from("seed,steps,final_V,final_feasibility,fitted_rate,fit_r_squared\n");
    let mut first_err = None;
    for r in results {
        match r {
            Ok(run) => {
                let dir = if single {
                    out_dir.clone()
                } else {
                    out_dir.join(format!("seed-{}", run.seed))
                };
                write_artifacts(&dir, &sc, &run, tol)?;
                let m = &run.output.metrics;
                let fit = pre_floor_fit(&m.v, run.output.final_state.states.len(), tol).ok();
                let _ = writeln!(
                    table,
                    "{},{},{},{},{},{}",
                    run.seed,
                    m.len() - 1,
                    num(m.last_v().unwrap_or(f64::NAN)),
                    num(*m.feasibility.last().unwrap_or(&f64::NAN)),
                    fit.map(|f| num(f.rate)).unwrap_or_default(),
                    fit.map(|f| num(f.r_squared)).unwrap_or_default(),
                );
                let _ = writeln!(
                    stdout,
                    "seed {}: {} steps, final V {:e}, output in {}",
                    run.seed,
                    m.len() - 1,
                    m.last_v().unwrap_or(f64::NAN),
                    dir.display()
                );
            }
            Err(e) => {
                let _ = writeln!(stdout, "error: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    if !single {
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
        write(&out_dir.join("seeds.csv"), &table)?;
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(stdout),
    }
}

/// What `verify` checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyCheck {
    Robust(usize),
    Corollary1 { n: usize, kappa_bar: usize, core: Vec<AgentId> },
}

/// Returns the report and whether the check passed.
pub fn cmd_verify(graph_text: &str, check: &VerifyCheck) -> Result<(String, bool), CliError> {
    let g = parse_topology(graph_text).map_err(|e| CliError::Invalid(format!("graph: {e}")))?;
    let graph_err = |e: GraphError| match e {
        GraphError::Capacity { .. } => CliError::Capacity(e.to_string()),
        _ => CliError::Invalid(e.to_string()),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "graph: {} agents, {} edges, max Byzantine in-degree {}",
        g.m(),
        g.edge_count(),
        g.kappa_bar()
    );
    let (cert, reach) = match check {
        VerifyCheck::Robust(r) => {
            let _ = writeln!(s, "check: {r}-robust");
            (is_r_robust(&g, *r).map_err(graph_err)?, *r)
        }
        VerifyCheck::Corollary1 { n, kappa_bar, core } => {
            let _ = writeln!(
                s,
                "check: complete core {} with n = {n}, kappa_bar = {kappa_bar}",
                format_set(core)
            );
            (check_corollary1(&g, *n, *kappa_bar, core).map_err(graph_err)?, n * kappa_bar + 1)
        }
    };
    let _ = writeln!(s, "verdict: {}", if cert.verdict { "PASS" } else { "FAIL" });
    if let Some(phi) = cert.phi {
        let _ = writeln!(s, "phi: {phi}");
    }
    if let Some(w) = &cert.witness {
        let text = match w {
            Witness::Pair(a, b) => format!(
                "{} and {} are disjoint and neither is {reach}-reachable",
                format_set(a),
                format_set(b)
            ),
            Witness::Subset(a) => format!("{} is not {reach}-reachable", format_set(a)),
            Witness::CoreSize { found, required } => {
                format!("core has {found} agents, at least {required} required")
            }
            Witness::MissingEdge { from, to } => {
                format!("core agent {to} does not hear from core agent {from}")
            }
        };
        let _ = writeln!(s, "witness: {text}");
    }
    Ok((s, cert.verdict))
}

/// `sigma = None` selects `nκ + 2`.
pub fn cmd_combine(
    states_text: &str,
    self_id: AgentId,
    kappa: usize,
    sigma: Option<usize>,
    trace: bool,
    tol: f64,
) -> Result<String, CliError> {
    let set = parse_states(states_text)?;
    let (n, d) = (set.dim(), set.len());
    let sigma = sigma.unwrap_or_else(|| default_sigma(n, kappa));
    let obs = NeighborObservation::new(self_id, set, kappa, sigma).map_err(|e| match e {
        ResilientError::TooFewNeighbors { .. } => CliError::Invalid(format!(
            "redundancy bound violated: d = {d} < (n + 1)κ + 2 = {} (n = {n}, κ = {kappa})",
            required_degree(n, kappa)
        )),
        other => CliError::Invalid(other.to_string()),
    })?;
    let comb = resilient_combination(&obs, tol).map_err(|e| CliError::Runtime(e.to_string()))?;
    let mut s = String::new();
    let _ = writeln!(s, "self: {self_id}");
    let _ = writeln!(
        s,
        "n: {n}, d: {d}, kappa: {kappa}, sigma: {sigma}, subsets: {}",
        comb.subset_count
    );
    let _ = writeln!(s, "v*: {}", fmt_point(&comb.value));
    let _ = writeln!(s, "gamma: {}", comb.gamma);
    let _ = writeln!(s, "alpha: {}", comb.alpha);
    let _ = writeln!(s, "weights:");
    for (id, wt) in obs.neighbors().labels().iter().zip(comb.weights.as_slice()) {
        let _ = writeln!(s, "  {id}: {wt}");
    }
    if trace {
        let steps = trace_combination(&obs, tol).map_err(|e| CliError::Runtime(e.to_string()))?;
        for (j, st) in steps.iter().enumerate() {
            let j = j + 1;
            let _ = writeln!(s, "S_{self_id},{j} = {}", format_set(&st.s_subset));
            if st.self_in_hull {
                let _ = writeln!(s, "  own state lies in the hull of the others");
            }
            for (k, b) in st.b_subsets.iter().enumerate() {
                let _ = writeln!(s, "  B_{self_id},{j},{} = {}", k + 1, format_set(b));
            }
            let _ = writeln!(s, "  phi_{self_id},{j} = {}", fmt_point(&st.phi));
        }
    }
    Ok(s)
}

/// Shortest round-trip formatting.
fn fmt_point(p: &Point) -> String {
    let inner: Vec<String> = p.iter().map(|c| c.to_string()).collect();
    format!("[{}]", inner.join(", "))
}
