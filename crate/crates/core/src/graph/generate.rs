use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{invalid, GraphError, Topology};
use crate::id::AgentId;

/// Probability that an agent outside the complete core hears from a given
/// other outside agent.
const PEER_EDGE_PROB: f64 = 0.1;

/// Complete core `{1..f}` plus `m − f` outside agents. Each outside agent
/// hears from `min_links` distinct core agents and from each other outside
/// agent with probability 0.1. Core agents hear only the core. Every agent
/// gets `kappa_bar` Byzantine in-edges.
pub fn generate_corollary1_graph(
    m: usize,
    n: usize,
    kappa_bar: usize,
    f: usize,
    min_links: usize,
    seed: u64,
) -> Result<Topology, GraphError> {
    if f < 2 * n * kappa_bar + 1 {
        return Err(invalid(format!("core size {f} below 2nκ̄ + 1 = {}", 2 * n * kappa_bar + 1)));
    }
    if m < f {
        return Err(invalid(format!("core size {f} exceeds agent count {m}")));
    }
    if m > f && (min_links < n * kappa_bar + 1 || min_links > f) {
        return Err(invalid(format!("min_links {min_links} outside [{}, {f}]", n * kappa_bar + 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core: Vec<AgentId> = (1..=f).map(AgentId).collect();
    let mut lists = vec![core.clone(); f];
    for i in f + 1..=m {
        let mut list: Vec<AgentId> = core.choose_multiple(&mut rng, min_links).copied().collect();
        list.push(AgentId(i));
        for j in f + 1..=m {
            if j != i && rng.random_bool(PEER_EDGE_PROB) {
                list.push(AgentId(j));
            }
        }
        lists.push(list);
    }
    Topology::new(lists, vec![kappa_bar; m])
}

/// Preferential-attachment parameters. Degrees count undirected neighbors,
/// excluding the self-loop and Byzantine edges.
#[derive(Clone, Debug, PartialEq)]
pub struct PaParams {
    /// Size of the initial complete graph.
    pub seed_size: usize,
    /// Edges each arriving node tries to attach.
    pub edges_per_node: usize,
    /// When set, nodes stop accepting edges at this degree and a completion
    /// phase pairs up deficient nodes until every degree equals it.
    pub target_degree: Option<usize>,
    /// Byzantine in-edges per agent.
    pub byzantine: usize,
}

impl Default for PaParams {
    fn default() -> Self {
        PaParams { seed_size: 3, edges_per_node: 2, target_degree: None, byzantine: 0 }
    }
}

const PA_ATTEMPTS: usize = 1000;

/// Undirected preferential attachment (probability ∝ degree + 1),
/// symmetrized into a digraph with self-loops.
pub fn generate_preferential_attachment(
    m: usize,
    seed: u64,
    params: &PaParams,
) -> Result<Topology, GraphError> {
    if m < 2 {
        return Err(invalid("preferential attachment needs at least 2 agents"));
    }
    if params.seed_size < 2 {
        return Err(invalid("seed graph needs at least 2 nodes"));
    }
    let seed_size = params.seed_size.min(m);
    if let Some(k) = params.target_degree {
        if k >= m || (m * k) % 2 == 1 || seed_size - 1 > k {
            return Err(invalid(format!("no {k}-regular graph fits {m} nodes with this seed")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..PA_ATTEMPTS {
        if let Some(adj) = pa_attempt(m, seed_size, params, &mut rng) {
            let lists = adj
                .iter()
                .enumerate()
                .map(|(k, set)| {
                    set.iter()
                        .map(|&j| AgentId::from_index(j))
                        .chain([AgentId::from_index(k)])
                        .collect()
                })
                .collect();
            let g = Topology::new(lists, vec![params.byzantine; m])?;
            if g.is_weakly_connected() {
                return Ok(g);
            }
        }
    }
    Err(invalid(format!("no admissible graph after {PA_ATTEMPTS} attempts")))
}

fn pa_attempt(
    m: usize,
    seed_size: usize,
    params: &PaParams,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<BTreeSet<usize>>> {
    let cap = params.target_degree.unwrap_or(usize::MAX);
    let mut adj = vec![BTreeSet::new(); m];
    for u in 0..seed_size {
        for v in 0..u {
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    for v in seed_size..m {
        for _ in 0..params.edges_per_node {
            let candidates: Vec<usize> =
                (0..v).filter(|&u| adj[u].len() < cap && !adj[v].contains(&u)).collect();
            if adj[v].len() >= cap {
                break;
            }
            let Ok(&u) = candidates.choose_weighted(rng, |&u| adj[u].len() as f64 + 1.0) else {
                break;
            };
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    if let Some(k) = params.target_degree {
        loop {
            let deficient: Vec<usize> = (0..m).filter(|&u| adj[u].len() < k).collect();
            if deficient.is_empty() {
                break;
            }
            let mut pairs = Vec::new();
            for (a, &u) in deficient.iter().enumerate() {
                for &v in &deficient[a + 1..] {
                    if !adj[u].contains(&v) {
                        pairs.push((u, v));
                    }
                }
            }
            let &(u, v) = pairs.choose(rng)?;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    Some(adj)
}

/// Removes `drop_per_agent` random non-self in-neighbors from every agent.
pub fn random_subgraph(
    g: &Topology,
    drop_per_agent: usize,
    seed: u64,
) -> Result<Topology, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let removed = g
        .agents()
        .map(|i| {
            let mut others: Vec<AgentId> =
                g.in_neighbors(i).iter().copied().filter(|&j| j != i).collect();
            if others.len() < drop_per_agent {
                return Err(invalid(format!(
                    "agent {i} has {} in-neighbors, cannot drop {drop_per_agent}",
                    others.len()
                )));
            }
            others.shuffle(&mut rng);
            others.truncate(drop_per_agent);
            Ok(others)
        })
        .collect::<Result<Vec<_>, _>>()?;
    g.without_in_edges(&removed)
}
