use std::fmt;

/// Logical cost measures of one run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    /// Non-concurrent logic operations: table accesses along the critical path.
    pub nclo: u64,
    /// Payload units over all messages: one per table cell, one per
    /// assignment pair, plus one envelope unit per message.
    pub network_load: u64,
    pub message_count: usize,
    pub util_messages: usize,
    pub value_messages: usize,
    /// Most dimensions of any table materialized by any agent.
    pub max_dims: usize,
    /// Share of directed cost entries another agent can deduce exactly.
    pub privacy_loss: f64,
    pub leaked_entries: usize,
    pub total_entries: usize,
    /// Table cells sent during the utility phase.
    pub util_cells: u64,
    pub max_message_cells: usize,
    /// Most table cells held by one agent at any time.
    pub peak_agent_cells: usize,
    /// Table accesses summed over all agents.
    pub total_accesses: u64,
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nclo {}", self.nclo)?;
        writeln!(f, "network_load {}", self.network_load)?;
        writeln!(
            f,
            "messages {} (util {}, value {})",
            self.message_count, self.util_messages, self.value_messages
        )?;
        writeln!(f, "max_dims {}", self.max_dims)?;
        writeln!(
            f,
            "privacy_loss {:.6} ({}/{})",
            self.privacy_loss, self.leaked_entries, self.total_entries
        )?;
        writeln!(f, "util_cells {}", self.util_cells)?;
        writeln!(f, "max_message_cells {}", self.max_message_cells)?;
        writeln!(f, "peak_agent_cells {}", self.peak_agent_cells)?;
        write!(f, "total_accesses {}", self.total_accesses)
    }
}
