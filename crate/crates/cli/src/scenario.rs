//! JSON scenario files.
//!
//! Every object rejects unknown keys and the top level must carry
//! `"schema": "rescon.scenario/1"`, so a typo in a redundancy parameter is an
//! error rather than a silently ignored default.

use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rescon_core::graph::{
    generate_corollary1_graph, generate_preferential_attachment, parse_topology, random_subgraph,
    PaParams,
};
use rescon_core::sim::{
    FeatureMap, LearningProblem, LearningSetup, SynthesisSpec, DEFAULT_HORIZON,
};
use rescon_core::{
    AdversaryModel, AttackModel, Branch, ConstraintSet, Experiment, KappaSchedule, Point,
    SigmaPolicy, StepConfig, Topology, TopologySchedule,
};

use crate::CliError;

pub const SCHEMA: &str = "rescon.scenario/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub dimension: usize,
    pub topology: TopologySpec,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<AdversarySpec>,
    /// Agents not covered by any group are unconstrained.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintGroup>,
    pub init: InitSpec,
    #[serde(default)]
    pub branch: BranchSpec,
    /// `null` selects `σ = nκ + 2` per agent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<usize>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_below: Option<f64>,
    #[serde(default)]
    pub seeds: SeedRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning: Option<LearningSpec>,
    /// When set, every resilient step checks that each pre-projection value
    /// lies in the hull of the normal states it was built from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safety_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TopologySpec {
    /// Adjacency-list text, as accepted by `rescon verify`.
    Inline {
        text: String,
    },
    /// Path relative to the scenario file.
    File {
        path: PathBuf,
    },
    Complete {
        agents: usize,
        byzantine: usize,
    },
    PreferentialAttachment {
        agents: usize,
        #[serde(default = "three")]
        seed_size: usize,
        #[serde(default = "two")]
        edges_per_node: usize,
        #[serde(default)]
        target_degree: Option<usize>,
        byzantine: usize,
    },
    /// Complete core `{1..core}` plus outside agents with `min_links` core
    /// in-neighbors each.
    Corollary1 {
        agents: usize,
        kappa_bar: usize,
        core: usize,
        min_links: usize,
    },
}

fn two() -> usize {
    2
}

fn three() -> usize {
    3
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScheduleSpec {
    #[default]
    Fixed,
    /// Cycles through the base graph and `subgraphs` random subgraphs, each
    /// dropping `drop_per_agent` in-edges per agent, `duration` steps apiece.
    AlternateSubgraphs {
        subgraphs: usize,
        drop_per_agent: usize,
        #[serde(default = "one")]
        duration: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySpec {
    pub attack: AttackSpec,
    /// Vectors per agent per step; `null` fills every declared Byzantine edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AttackSpec {
    Box { lows: Vec<f64>, highs: Vec<f64> },
    Fixed { point: Vec<f64> },
    Pursuit { gain: f64, lure: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintGroup {
    /// Inclusive 1-based id range `[first, last]`.
    pub agents: [usize; 2],
    pub set: SetSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSpec {
    WholeSpace,
    /// `{x : normal · x >= offset}`.
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Intersection {
        sets: Vec<SetSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitSpec {
    /// Uniform per coordinate.
    Box {
        lows: Vec<f64>,
        highs: Vec<f64>,
    },
    Points {
        points: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchSpec {
    #[default]
    Resilient,
    Naive,
}

/// Half-open `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl Default for SeedRange {
    fn default() -> Self {
        SeedRange { start: 0, end: 1 }
    }
}

impl SeedRange {
    /// Parses `A..B` (half-open) or a single seed `A`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("bad seed range {text:?}, expected A..B"));
        let (start, end) = match text.split_once("..") {
            Some((a, b)) => {
                (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
            }
            None => {
                let a: u64 = text.trim().parse().map_err(|_| bad())?;
                (a, a.checked_add(1).ok_or_else(bad)?)
            }
        };
        if start >= end {
            return Err(bad());
        }
        Ok(SeedRange { start, end })
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> {
        self.start..self.end
    }

    pub fn len(&self) -> u64 {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearningSpec {
    pub features: FeatureSpec,
    pub input_dim: usize,
    pub theta_star: Vec<f64>,
    pub samples_per_agent: usize,
    pub z_range: [f64; 2],
    #[serde(default = "default_noise")]
    pub noise_std: f64,
    pub rho: f64,
}

fn default_noise() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FeatureSpec {
    Identity,
    Affine,
    Polynomial { degree: usize },
}

/// Independent sub-seeds of one run seed.
#[derive(Clone, Copy, Debug)]
enum Stream {
    Topology = 1,
    Subgraph = 2,
    Adversary = 3,
    Init = 4,
    Data = 5,
    Samples = 6,
}

fn derive_seed(seed: u64, stream: Stream, k: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 32) | k);
    rng.next_u64()
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let sc: Scenario =
            serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("scenario: {e}")))?;
        if sc.schema != SCHEMA {
            return Err(CliError::Invalid(format!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                sc.schema
            )));
        }
        Ok(sc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios serialize") + "\n"
    }

    /// The experiment for one seed. `base_dir` resolves `file` topologies.
    pub fn build(&self, seed: u64, tol: f64, base_dir: &Path) -> Result<Experiment, CliError> {
        let n = self.dimension;
        if n == 0 {
            return Err(CliError::Invalid("dimension must be positive".into()));
        }
        let base = self.base_topology(seed, base_dir)?;
        let m = base.m();
        let schedule = match &self.schedule {
            ScheduleSpec::Fixed => TopologySchedule::fixed(base),
            ScheduleSpec::AlternateSubgraphs { subgraphs, drop_per_agent, duration } => {
                let mut entries = vec![(base.clone(), *duration)];
                for k in 0..*subgraphs {
                    let sub = random_subgraph(
                        &base,
                        *drop_per_agent,
                        derive_seed(seed, Stream::Subgraph, k as u64),
                    )
                    .map_err(invalid)?;
                    entries.push((sub, *duration));
                }
                TopologySchedule::new(entries).map_err(invalid)?
            }
        };
        let adversary = self
            .adversary
            .as_ref()
            .map(|a| {
                let attack = match &a.attack {
                    AttackSpec::Box { lows, highs } => {
                        AttackModel::BoxRandom { lows: lows.clone(), highs: highs.clone() }
                    }
                    AttackSpec::Fixed { point } => AttackModel::FixedPoint(point.clone().into()),
                    AttackSpec::Pursuit { gain, lure } => {
                        AttackModel::Pursuit { gain: *gain, lure: lure.clone().into() }
                    }
                };
                if attack.dim() != n {
                    return Err(CliError::Invalid(format!(
                        "attack dimension {} differs from {n}",
                        attack.dim()
                    )));
                }
                let kappa = a.kappa.map_or(KappaSchedule::FollowTopology, KappaSchedule::Constant);
                AdversaryModel::new(attack, derive_seed(seed, Stream::Adversary, 0), kappa)
                    .map_err(invalid)
            })
            .transpose()?;
        let constraints = self.constraint_sets(m)?;
        let init = self.initial_states(m, seed)?;
        let learning = self
            .learning
            .as_ref()
            .map(|l| {
                let spec = SynthesisSpec {
                    features: match l.features {
                        FeatureSpec::Identity => FeatureMap::Identity,
                        FeatureSpec::Affine => FeatureMap::Affine,
                        FeatureSpec::Polynomial { degree } => FeatureMap::Polynomial { degree },
                    },
                    input_dim: l.input_dim,
                    theta_star: l.theta_star.clone().into(),
                    samples_per_agent: l.samples_per_agent,
                    z_low: l.z_range[0],
                    z_high: l.z_range[1],
                    noise_std: l.noise_std,
                    rho: l.rho,
                };
                let problem =
                    LearningProblem::synthesize(&spec, m, derive_seed(seed, Stream::Data, 0))
                        .map_err(invalid)?;
                Ok::<_, CliError>(LearningSetup {
                    problem,
                    sample_seed: derive_seed(seed, Stream::Samples, 0),
                })
            })
            .transpose()?;
        let step = StepConfig {
            branch: match self.branch {
                BranchSpec::Resilient => Branch::Resilient,
                BranchSpec::Naive => Branch::Naive,
            },
            sigma: self.sigma.map_or(SigmaPolicy::Default, SigmaPolicy::Fixed),
            tol,
            ..StepConfig::default()
        };
        Ok(Experiment {
            schedule,
            adversary,
            constraints,
            init,
            step,
            horizon: self.horizon,
            stop_below: self.stop_below,
            learning,
        })
    }

    fn base_topology(&self, seed: u64, base_dir: &Path) -> Result<Topology, CliError> {
        let gseed = derive_seed(seed, Stream::Topology, 0);
        match &self.topology {
            TopologySpec::Inline { text } => parse_topology(text).map_err(invalid),
            TopologySpec::File { path } => {
                let full = base_dir.join(path);
                let text = std::fs::read_to_string(&full)
                    .map_err(|e| CliError::Io(format!("{}: {e}", full.display())))?;
                parse_topology(&text).map_err(invalid)
            }
            TopologySpec::Complete { agents, byzantine } => {
                Topology::complete(*agents, *byzantine).map_err(invalid)
            }
            TopologySpec::PreferentialAttachment {
                agents,
                seed_size,
                edges_per_node,
                target_degree,
                byzantine,
            } => {
                let params = PaParams {
                    seed_size: *seed_size,
                    edges_per_node: *edges_per_node,
                    target_degree: *target_degree,
                    byzantine: *byzantine,
                };
                generate_preferential_attachment(*agents, gseed, &params).map_err(invalid)
            }
            TopologySpec::Corollary1 { agents, kappa_bar, core, min_links } => {
                generate_corollary1_graph(
                    *agents,
                    self.dimension,
                    *kappa_bar,
                    *core,
                    *min_links,
                    gseed,
                )
                .map_err(invalid)
            }
        }
    }

    fn constraint_sets(&self, m: usize) -> Result<Vec<ConstraintSet>, CliError> {
        let mut sets: Vec<Option<ConstraintSet>> = vec![None; m];
        for g in &self.constraints {
            let [first, last] = g.agents;
            if first == 0 || first > last || last > m {
                return Err(CliError::Invalid(format!(
                    "constraint group [{first}, {last}] outside 1..={m}"
                )));
            }
            let set = build_set(&g.set)?;
            for slot in &mut sets[first - 1..last] {
                if slot.is_some() {
                    return Err(CliError::Invalid(format!(
                        "constraint group [{first}, {last}] overlaps an earlier group"
                    )));
                }
                *slot = Some(set.clone());
            }
        }
        Ok(sets.into_iter().map(|s| s.unwrap_or(ConstraintSet::WholeSpace)).collect())
    }

    fn initial_states(&self, m: usize, seed: u64) -> Result<Vec<Point>, CliError> {
        let n = self.dimension;
        match &self.init {
            InitSpec::Box { lows, highs } => {
                if lows.len() != n || highs.len() != n || lows.iter().zip(highs).any(|(l, h)| l > h)
                {
                    return Err(CliError::Invalid(format!("init box must be {n}-dimensional")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, Stream::Init, 0));
                Ok((0..m)
                    .map(|_| {
                        let c: Vec<f64> = lows
                            .iter()
                            .zip(highs)
                            .map(|(&l, &h)| rng.random_range(l..=h))
                            .collect();
                        Point::from(c)
                    })
                    .collect())
            }
            InitSpec::Points { points } => {
                if points.len() != m {
                    return Err(CliError::Invalid(format!(
                        "{} initial points for {m} agents",
                        points.len()
                    )));
                }
                points.iter().map(|p| Point::new(p.clone()).map_err(invalid)).collect()
            }
        }
    }
}

fn build_set(spec: &SetSpec) -> Result<ConstraintSet, CliError> {
    match spec {
        SetSpec::WholeSpace => Ok(ConstraintSet::WholeSpace),
        SetSpec::Halfspace { normal, offset } => {
            ConstraintSet::halfspace(normal.clone(), *offset).map_err(invalid)
        }
        SetSpec::Ball { center, radius } => {
            ConstraintSet::ball(center.clone().into(), *radius).map_err(invalid)
        }
        SetSpec::Intersection { sets } => {
            let sets = sets.iter().map(build_set).collect::<Result<Vec<_>, _>>()?;
            ConstraintSet::intersection(sets).map_err(invalid)
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}
