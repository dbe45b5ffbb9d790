//! Byzantine-resilient convex combinations and the consensus and learning
//! dynamics built on them.
//!
//! Agent ids are 1-based everywhere. Byzantine agents have no state of their
//! own; they exist only as injected vectors on declared in-edges.

pub mod adversary;
pub mod combinatorics;
pub mod geometry;
pub mod graph;
pub mod id;
pub mod resilient;
pub mod sim;

pub use adversary::{AdversaryModel, AttackModel, KappaSchedule};
pub use geometry::{ConstraintSet, ConvexWeights, GeometryError, Point, PointSet, DEFAULT_TOL};
pub use graph::{GraphError, RobustnessCertificate, Topology, TopologySchedule, Witness};
pub use id::AgentId;
pub use resilient::{
    complexity_estimate, compute_phi, recover_weights, resilient_combination, ComplexityEstimate,
    NeighborObservation, ResilientCombination, ResilientError,
};
pub use sim::{Branch, Experiment, MetricSeries, RunOutput, SigmaPolicy, SimError, StepConfig};
