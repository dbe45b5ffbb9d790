//! Directed communication graphs over normal agents.
//!
//! Byzantine senders are not nodes. Each agent instead carries the number of
//! Byzantine in-edges it receives, since one adversary may feed different
//! values to different targets.

mod generate;
mod io;
mod robust;
mod scc;

use std::fmt;

use thiserror::Error;

use crate::id::AgentId;

pub use generate::{
    generate_corollary1_graph, generate_preferential_attachment, random_subgraph, PaParams,
};
pub use io::{parse_topology, write_topology};
pub use robust::{
    check_corollary1, is_r_reachable, is_r_robust, RobustnessCertificate, Witness,
    COROLLARY1_OUTSIDE_BOUND, ROBUST_EXHAUSTIVE_BOUND,
};
pub use scc::{is_rooted, root_components, strongly_connected_components};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    InvalidInput(String),
    #[error("exhaustive check over {size} nodes exceeds the bound of {bound}")]
    Capacity { size: usize, bound: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidInput(msg.into())
}

/// In-neighbor lists (self included, sorted) plus Byzantine in-edge counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    in_neighbors: Vec<Vec<AgentId>>,
    byzantine_in: Vec<usize>,
}

impl Topology {
    /// `in_neighbors[k]` lists the senders of agent `k + 1`. Lists are sorted
    /// and must contain the agent itself.
    pub fn new(
        in_neighbors: Vec<Vec<AgentId>>,
        byzantine_in: Vec<usize>,
    ) -> Result<Self, GraphError> {
        let m = in_neighbors.len();
        if m == 0 {
            return Err(invalid("no agents"));
        }
        if byzantine_in.len() != m {
            return Err(invalid(format!("{} Byzantine counts for {m} agents", byzantine_in.len())));
        }
        let mut lists = in_neighbors;
        for (k, list) in lists.iter_mut().enumerate() {
            let me = AgentId::from_index(k);
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("agent {me} lists a neighbor twice")));
            }
            if let Some(bad) = list.iter().find(|id| id.0 == 0 || id.0 > m) {
                return Err(invalid(format!("agent {me} lists unknown agent {bad}")));
            }
            if list.binary_search(&me).is_err() {
                return Err(invalid(format!("agent {me} has no self-loop")));
            }
        }
        Ok(Topology { in_neighbors: lists, byzantine_in })
    }

    /// Complete digraph with self-loops.
    pub fn complete(m: usize, kappa: usize) -> Result<Self, GraphError> {
        let all: Vec<AgentId> = (1..=m).map(AgentId).collect();
        Topology::new(vec![all; m], vec![kappa; m])
    }

    pub fn m(&self) -> usize {
        self.in_neighbors.len()
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (1..=self.m()).map(AgentId)
    }

    pub fn in_neighbors(&self, i: AgentId) -> &[AgentId] {
        &self.in_neighbors[i.index()]
    }

    pub fn byzantine_in(&self, i: AgentId) -> usize {
        self.byzantine_in[i.index()]
    }

    pub fn byzantine_counts(&self) -> &[usize] {
        &self.byzantine_in
    }

    pub fn kappa_bar(&self) -> usize {
        self.byzantine_in.iter().copied().max().unwrap_or(0)
    }

    /// `|N⁺_i| = |N_i| + κ_i`, the number of states agent `i` receives.
    pub fn observed_degree(&self, i: AgentId) -> usize {
        self.in_neighbors(i).len() + self.byzantine_in(i)
    }

    /// True when `from` sends to `to`.
    pub fn has_edge(&self, from: AgentId, to: AgentId) -> bool {
        self.in_neighbors(to).binary_search(&from).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.in_neighbors.iter().map(Vec::len).sum()
    }

    pub fn with_byzantine(&self, byzantine_in: Vec<usize>) -> Result<Self, GraphError> {
        Topology::new(self.in_neighbors.clone(), byzantine_in)
    }

    /// Drops the in-edges `removed[k]` of agent `k + 1`. Self-loops cannot be
    /// removed.
    pub fn without_in_edges(&self, removed: &[Vec<AgentId>]) -> Result<Self, GraphError> {
        if removed.len() != self.m() {
            return Err(invalid("removal list length differs from agent count"));
        }
        let mut lists = self.in_neighbors.clone();
        for (k, (list, drop)) in lists.iter_mut().zip(removed).enumerate() {
            if drop.contains(&AgentId::from_index(k)) {
                return Err(invalid(format!("cannot remove the self-loop of agent {}", k + 1)));
            }
            list.retain(|id| !drop.contains(id));
        }
        Topology::new(lists, self.byzantine_in.clone())
    }

    /// Bitmask of in-neighbors other than self; requires `m <= 64`.
    pub(crate) fn in_masks(&self) -> Vec<u64> {
        debug_assert!(self.m() <= 64);
        self.in_neighbors
            .iter()
            .enumerate()
            .map(|(k, list)| {
                list.iter().filter(|id| id.index() != k).fold(0u64, |acc, id| acc | 1 << id.index())
            })
            .collect()
    }

    /// True when the undirected version of the graph is connected.
    pub fn is_weakly_connected(&self) -> bool {
        let m = self.m();
        let mut adj = vec![Vec::new(); m];
        for (k, list) in self.in_neighbors.iter().enumerate() {
            for id in list {
                adj[k].push(id.index());
                adj[id.index()].push(k);
            }
        }
        let mut seen = vec![false; m];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_topology(self))
    }
}

/// A periodic sequence of topologies, each held for a number of steps.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologySchedule {
    entries: Vec<(Topology, usize)>,
    period: usize,
}

impl TopologySchedule {
    pub fn new(entries: Vec<(Topology, usize)>) -> Result<Self, GraphError> {
        let Some((first, _)) = entries.first() else {
            return Err(invalid("empty schedule"));
        };
        let m = first.m();
        if entries.iter().any(|(g, _)| g.m() != m) {
            return Err(invalid("schedule mixes agent counts"));
        }
        if entries.iter().any(|&(_, d)| d == 0) {
            return Err(invalid("schedule durations must be at least 1"));
        }
        let period = entries.iter().map(|&(_, d)| d).sum();
        Ok(TopologySchedule { entries, period })
    }

    pub fn fixed(g: Topology) -> Self {
        TopologySchedule { entries: vec![(g, 1)], period: 1 }
    }

    pub fn m(&self) -> usize {
        self.entries[0].0.m()
    }

    /// Length of one repetition; every window of this many steps visits each
    /// entry, so it bounds the interval in the connectivity conditions.
    pub fn interval_bound(&self) -> usize {
        self.period
    }

    pub fn entries(&self) -> &[(Topology, usize)] {
        &self.entries
    }

    /// Topology in force at step `t` (steps start at 0).
    pub fn at(&self, t: usize) -> &Topology {
        let mut r = t % self.period;
        for (g, d) in &self.entries {
            if r < *d {
                return g;
            }
            r -= d;
        }
        unreachable!("period is the sum of durations")
    }
}
