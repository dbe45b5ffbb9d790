use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;

use super::Topology;
use crate::id::AgentId;

/// Components as sorted id lists, ordered by smallest member.
pub fn strongly_connected_components(g: &Topology) -> Vec<Vec<AgentId>> {
    let mut dg: DiGraph<(), ()> = DiGraph::with_capacity(g.m(), g.edge_count());
    let nodes: Vec<_> = (0..g.m()).map(|_| dg.add_node(())).collect();
    for i in g.agents() {
        for j in g.in_neighbors(i) {
            if *j != i {
                dg.add_edge(nodes[j.index()], nodes[i.index()], ());
            }
        }
    }
    let mut comps: Vec<Vec<AgentId>> = kosaraju_scc(&dg)
        .into_iter()
        .map(|c| {
            let mut ids: Vec<AgentId> = c.iter().map(|n| AgentId::from_index(n.index())).collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    comps.sort_unstable_by_key(|c| c[0]);
    comps
}

/// Components with no in-edge from outside themselves.
pub fn root_components(g: &Topology) -> Vec<Vec<AgentId>> {
    strongly_connected_components(g)
        .into_iter()
        .filter(|comp| {
            comp.iter().all(|&i| g.in_neighbors(i).iter().all(|j| comp.binary_search(j).is_ok()))
        })
        .collect()
}

/// A digraph has a spanning tree rooted somewhere iff its condensation has
/// exactly one source.
pub fn is_rooted(g: &Topology) -> bool {
    root_components(g).len() == 1
}
