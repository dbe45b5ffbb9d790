//! Adjacency-list text format, one agent per line:
//!
//! ```text
//! # comment
//! 1: 1 2 3 | 1
//! 2: 1 2 | 0
//! ```
//!
//! The list after the colon holds the agent's in-neighbors (self included);
//! the number after `|` is its Byzantine in-edge count and defaults to 0.

use super::{GraphError, Topology};
use crate::id::AgentId;

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

fn parse_id(tok: &str, line: usize) -> Result<usize, GraphError> {
    tok.parse::<usize>().map_err(|_| parse_err(line, format!("bad agent id {tok:?}")))
}

pub fn parse_topology(text: &str) -> Result<Topology, GraphError> {
    let mut rows: Vec<(usize, usize, Vec<AgentId>, usize)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (head, rest) =
            body.split_once(':').ok_or_else(|| parse_err(line, "expected `id: neighbors | κ`"))?;
        let id = parse_id(head.trim(), line)?;
        let (list, kappa) = match rest.split_once('|') {
            Some((l, kap)) => {
                let kap = kap.trim();
                let kappa = kap
                    .parse::<usize>()
                    .map_err(|_| parse_err(line, format!("bad Byzantine count {kap:?}")))?;
                (l, kappa)
            }
            None => (rest, 0),
        };
        let neighbors = list
            .split_whitespace()
            .map(|t| parse_id(t, line).map(AgentId))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((line, id, neighbors, kappa));
    }
    if rows.is_empty() {
        return Err(parse_err(0, "no agents"));
    }
    let m = rows.len();
    let mut lists = vec![None; m];
    let mut kappas = vec![0; m];
    for (line, id, neighbors, kappa) in rows {
        if id == 0 || id > m {
            return Err(parse_err(line, format!("agent id {id} outside 1..={m}")));
        }
        if lists[id - 1].is_some() {
            return Err(parse_err(line, format!("agent {id} listed twice")));
        }
        if !neighbors.contains(&AgentId(id)) {
            return Err(parse_err(line, format!("agent {id} is missing its self-loop")));
        }
        lists[id - 1] = Some(neighbors);
        kappas[id - 1] = kappa;
    }
    let lists: Vec<Vec<AgentId>> = lists.into_iter().map(|l| l.expect("ids cover 1..=m")).collect();
    Topology::new(lists, kappas)
}

pub fn write_topology(g: &Topology) -> String {
    let mut out = String::new();
    for i in g.agents() {
        out.push_str(&i.to_string());
        out.push(':');
        for j in g.in_neighbors(i) {
            out.push(' ');
            out.push_str(&j.to_string());
        }
        out.push_str(&format!(" | {}\n", g.byzantine_in(i)));
    }
    out
}
