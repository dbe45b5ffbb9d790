//! Built-in scenarios. `presets/*.json` in this crate are their serialized
//! form and are checked against these definitions by the test suite.

use crate::scenario::{
    AdversarySpec, AttackSpec, BranchSpec, ConstraintGroup, FeatureSpec, InitSpec, LearningSpec,
    Scenario, ScheduleSpec, SeedRange, SetSpec, TopologySpec, SCHEMA,
};

pub const NAMES: [&str; 3] = ["unconstrained-8", "constrained-30", "learning-8"];

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "unconstrained-8" => Some(unconstrained_8()),
        "constrained-30" => Some(constrained_30()),
        "learning-8" => Some(learning_8()),
        _ => None,
    }
}

fn eight_agent_network() -> (TopologySpec, ScheduleSpec) {
    (
        TopologySpec::PreferentialAttachment {
            agents: 8,
            seed_size: 3,
            edges_per_node: 2,
            target_degree: Some(4),
            byzantine: 1,
        },
        ScheduleSpec::AlternateSubgraphs { subgraphs: 2, drop_per_agent: 1, duration: 1 },
    )
}

fn box_attack() -> Option<AdversarySpec> {
    Some(AdversarySpec {
        attack: AttackSpec::Box { lows: vec![-4.0, -5.0], highs: vec![4.0, 5.0] },
        kappa: None,
    })
}

fn square(r: f64) -> InitSpec {
    InitSpec::Box { lows: vec![-r, -r], highs: vec![r, r] }
}

/// 8 agents, 4 undirected neighbors each plus one Byzantine in-edge
/// (`d = 6`, `σ = 4`, `γ = 3`); every third step uses the full graph.
pub fn unconstrained_8() -> Scenario {
    let (topology, schedule) = eight_agent_network();
    Scenario {
        schema: SCHEMA.into(),
        name: "unconstrained-8".into(),
        provenance: Some(
            "published 8-agent unconstrained resilient consensus experiment: states drawn \
             from [-2,2]x[-2,2], one Byzantine in-edge per agent sending uniform draws from \
             [-4,4]x[-5,5]; the two sparser graphs of the schedule are this artifact's choice"
                .into(),
        ),
        dimension: 2,
        topology,
        schedule,
        adversary: box_attack(),
        constraints: Vec::new(),
        init: square(2.0),
        branch: BranchSpec::Resilient,
        sigma: None,
        horizon: 200,
        stop_below: None,
        seeds: SeedRange { start: 0, end: 20 },
        learning: None,
        safety_tol: Some(1e-7),
        output: None,
    }
}

fn ball() -> SetSpec {
    SetSpec::Ball { center: vec![0.0, 0.0], radius: 1.0 }
}

fn halfspace(normal: [f64; 2]) -> SetSpec {
    SetSpec::Halfspace { normal: normal.to_vec(), offset: 0.0 }
}

/// 30 agents with a complete 15-agent core and `κ̄ = 2`; three groups of ten
/// agents, each constrained to the intersection of two of: the unit ball,
/// `x₁ − x₂ ≥ 0`, `x₁ ≥ 0`.
pub fn constrained_30() -> Scenario {
    let group = |first: usize, a: SetSpec, b: SetSpec| ConstraintGroup {
        agents: [first, first + 9],
        set: SetSpec::Intersection { sets: vec![a, b] },
    };
    Scenario {
        schema: SCHEMA.into(),
        name: "constrained-30".into(),
        provenance: Some(
            "published 30-agent resilient constrained consensus experiment: f = 15 complete \
             core, two Byzantine in-edges per agent, halfspaces x1 - x2 >= 0 and x1 >= 0 \
             paired with the unit ball; the published run agreed at (0.7071, 0.7071), one \
             initialization-dependent outcome among many"
                .into(),
        ),
        dimension: 2,
        topology: TopologySpec::Corollary1 { agents: 30, kappa_bar: 2, core: 15, min_links: 6 },
        schedule: ScheduleSpec::Fixed,
        adversary: box_attack(),
        constraints: vec![
            group(1, ball(), halfspace([1.0, -1.0])),
            group(11, halfspace([1.0, -1.0]), halfspace([1.0, 0.0])),
            group(21, halfspace([1.0, 0.0]), ball()),
        ],
        init: square(2.0),
        branch: BranchSpec::Resilient,
        sigma: None,
        horizon: 1000,
        stop_below: Some(1e-12),
        seeds: SeedRange { start: 0, end: 20 },
        learning: None,
        safety_tol: Some(1e-7),
        output: None,
    }
}

/// `Q_θ(z) = θ₁z + θ₂` learned over the 8-agent network under the same attack,
/// with `‖θ‖ ≤ 1.5` and step size `1/t`.
pub fn learning_8() -> Scenario {
    let (topology, schedule) = eight_agent_network();
    Scenario {
        schema: SCHEMA.into(),
        name: "learning-8".into(),
        provenance: Some(
            "published 8-agent safe multi-agent learning experiment: linear value function \
             over features psi(z), projected stochastic gradient with step 1/t onto \
             ||theta|| <= rho under the 8-agent attack; the data here is synthetic"
                .into(),
        ),
        dimension: 2,
        topology,
        schedule,
        adversary: box_attack(),
        constraints: Vec::new(),
        init: square(1.0),
        branch: BranchSpec::Resilient,
        sigma: None,
        horizon: 500,
        stop_below: None,
        seeds: SeedRange { start: 0, end: 20 },
        learning: Some(LearningSpec {
            features: FeatureSpec::Affine,
            input_dim: 1,
            theta_star: vec![0.8, -0.5],
            samples_per_agent: 40,
            z_range: [-1.5, 1.5],
            noise_std: 0.05,
            rho: 1.5,
        }),
        safety_tol: None,
        output: None,
    }
}
