use std::fmt;

/// One-based agent identifier.
///
/// Ids are 1-based everywhere they are visible (graph files, CSV inputs,
/// reports). Use [`AgentId::index`] to get the 0-based slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AgentId(pub usize);

impl AgentId {
    pub fn from_index(index: usize) -> Self {
        AgentId(index + 1)
    }

    pub fn index(self) -> usize {
        debug_assert!(self.0 >= 1, "agent ids are 1-based");
        self.0 - 1
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for AgentId {
    fn from(id: usize) -> Self {
        AgentId(id)
    }
}

/// Formats a set of ids as `{1,2,3}`.
pub fn format_set(ids: &[AgentId]) -> String {
    let inner: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}
