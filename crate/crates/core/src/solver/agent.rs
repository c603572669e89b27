use std::collections::{BTreeMap, BTreeSet};

use super::partition::{eliminate_with_mbes, partition_sides};
use super::ResolvedConfig;
use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::model::{Assignment, Problem};
use crate::pseudotree::PseudoTree;
use crate::tables::{AccessCounter, UtilityTable};

/// UTIL message: one table, or a set of tables under table-set propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilMessage<C = u64> {
    pub sender: usize,
    pub receiver: usize,
    pub tables: Vec<UtilityTable<C>>,
    /// Remaining elimination counters of the not-yet-eliminated variables
    /// from the sender's subtree (the sender's own included).
    pub counters: BTreeMap<usize, usize>,
}

impl<C: Cost> UtilMessage<C> {
    pub fn cells(&self) -> usize {
        self.tables.iter().map(|t| t.cells()).sum()
    }

    pub fn dims_union(&self) -> BTreeSet<usize> {
        self.tables
            .iter()
            .flat_map(|t| t.dims().iter().copied())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueMessage {
    pub sender: usize,
    pub receiver: usize,
    pub assignment: Assignment,
}

/// One joint min-elimination performed by an agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationBatch {
    pub agent: usize,
    /// The child whose branch the variables belong to.
    pub branch: usize,
    pub vars: Vec<usize>,
}

/// Everything one agent knows and holds. Built from the agent's own private
/// sides and its local roles in the pseudo tree; no other global structure
/// is consulted while running.
#[derive(Debug, Clone)]
pub struct AgentState<C = u64> {
    id: usize,
    domain_size: usize,
    parent: Option<usize>,
    /// Parent plus pseudo parents.
    uppers: BTreeSet<usize>,
    /// Children plus pseudo children.
    lowers: BTreeSet<usize>,
    children: BTreeSet<usize>,
    /// Private side toward every neighbor.
    private: BTreeMap<usize, UtilityTable<C>>,
    config: ResolvedConfig,

    /// Received child tables after joining private sides, before elimination.
    stored: BTreeMap<usize, Vec<UtilityTable<C>>>,
    /// Dims seen in each child's message.
    branch_dims: BTreeMap<usize, BTreeSet<usize>>,
    running: Vec<UtilityTable<C>>,
    pending_counters: BTreeMap<usize, usize>,
    eliminated: BTreeMap<usize, BTreeSet<usize>>,
    batches: Vec<EliminationBatch>,
    sent_util: bool,
    determined: Option<Assignment>,
    optimum: Option<C>,
}

impl<C: Cost> AgentState<C> {
    pub fn new(
        id: usize,
        problem: &Problem<C>,
        tree: &PseudoTree,
        config: ResolvedConfig,
    ) -> Result<Self> {
        let private = problem
            .neighbors(id)
            .into_iter()
            .map(|j| UtilityTable::from_side(problem, id, j).map(|t| (j, t)))
            .collect::<Result<_>>()?;
        Ok(Self {
            id,
            domain_size: problem.domain_size(id),
            parent: tree.parent(id),
            uppers: tree.all_parents(id),
            lowers: tree.lower_neighbors(id),
            children: tree.children(id).clone(),
            private,
            config,
            stored: BTreeMap::new(),
            branch_dims: BTreeMap::new(),
            running: Vec::new(),
            pending_counters: BTreeMap::new(),
            eliminated: BTreeMap::new(),
            batches: Vec::new(),
            sent_util: false,
            determined: None,
            optimum: None,
        })
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }

    /// All child messages are in.
    pub fn is_ready(&self) -> bool {
        self.stored.len() == self.children.len()
    }

    /// Has its own value (and has dispatched VALUE messages).
    pub fn is_done(&self) -> bool {
        self.determined.is_some()
    }

    pub fn value(&self) -> Option<usize> {
        self.determined.as_ref().and_then(|a| a.get(self.id))
    }

    /// Everything this agent has assigned or been told.
    pub fn known_assignment(&self) -> Option<&Assignment> {
        self.determined.as_ref()
    }

    /// Minimum total cost as computed by the root from eliminated tables.
    pub fn optimum(&self) -> Option<C> {
        self.optimum
    }

    /// Variables eliminated on receipt of each child's message.
    pub fn elimination_sets(&self) -> &BTreeMap<usize, BTreeSet<usize>> {
        &self.eliminated
    }

    pub fn batches(&self) -> &[EliminationBatch] {
        &self.batches
    }

    /// Cells currently held in stored and running tables.
    pub fn held_cells(&self) -> usize {
        self.stored
            .values()
            .flatten()
            .chain(&self.running)
            .map(|t| t.cells())
            .sum()
    }

    fn protocol(&self, msg: impl Into<String>) -> Error {
        Error::Protocol {
            agent: self.id,
            msg: msg.into(),
        }
    }

    /// Joins `side` into the table of `tables` that already covers its dims
    /// (fewest dims first); if none does, into the table that grows least.
    fn join_side_into(
        tables: &mut Vec<UtilityTable<C>>,
        side: &UtilityTable<C>,
        counter: &mut AccessCounter,
    ) -> Result<()> {
        let need = side.dim_set();
        let target = tables
            .iter()
            .enumerate()
            .min_by_key(|(k, t)| {
                let dims = t.dim_set();
                let growth = need.difference(&dims).count();
                (growth, dims.len(), *k)
            })
            .map(|(k, _)| k);
        match target {
            Some(k) => tables[k] = tables[k].join(side, counter)?,
            None => tables.push(side.clone()),
        }
        Ok(())
    }

    /// Handles a UTIL message from a child: joins the private sides toward
    /// the (pseudo) children in that branch into the received tables, stores
    /// them, and eliminates every variable whose counter reaches zero here.
    pub fn absorb_child_message(
        &mut self,
        msg: UtilMessage<C>,
        counter: &mut AccessCounter,
    ) -> Result<()> {
        let child = msg.sender;
        if msg.receiver != self.id || !self.children.contains(&child) {
            return Err(self.protocol(format!("UTIL from non-child {child}")));
        }
        if self.stored.contains_key(&child) {
            return Err(self.protocol(format!("second UTIL from {child}")));
        }
        let dims = msg.dims_union();
        let mut tables = msg.tables;
        for c in self.lowers.intersection(&dims) {
            Self::join_side_into(&mut tables, &self.private[c], counter)?;
        }

        let mut ev = BTreeSet::new();
        for (x, remaining) in msg.counters {
            let remaining = if self.lowers.contains(&x) {
                remaining
                    .checked_sub(1)
                    .ok_or_else(|| self.protocol(format!("counter of {x} underflows")))?
            } else {
                remaining
            };
            if remaining == 0 {
                ev.insert(x);
            } else {
                self.pending_counters.insert(x, remaining);
            }
        }

        let (reduced, batches) =
            eliminate_with_mbes(tables.clone(), &ev, self.config.k_e, counter)?;
        self.batches
            .extend(batches.into_iter().map(|vars| EliminationBatch {
                agent: self.id,
                branch: child,
                vars,
            }));
        self.running.extend(reduced);
        self.stored.insert(child, tables);
        self.branch_dims.insert(child, dims);
        self.eliminated.insert(child, ev);
        Ok(())
    }

    /// Builds the UTIL message for the parent once every child has reported.
    pub fn finalize_util(&mut self, counter: &mut AccessCounter) -> Result<UtilMessage<C>> {
        let parent = self
            .parent
            .ok_or_else(|| self.protocol("root has no parent to report to"))?;
        if !self.is_ready() {
            let missing: Vec<_> = self
                .children
                .iter()
                .filter(|c| !self.stored.contains_key(c))
                .collect();
            return Err(self.protocol(format!(
                "UTIL requested before children {missing:?} reported"
            )));
        }
        if self.sent_util {
            return Err(self.protocol("UTIL already sent"));
        }

        let mut tables = std::mem::take(&mut self.running);
        // Sides toward parents go into received tables that already span
        // them; the rest are partitioned by k_p.
        let mut residual = Vec::new();
        for j in &self.uppers {
            let side = &self.private[j];
            let need = side.dim_set();
            let host = tables
                .iter()
                .enumerate()
                .filter(|(_, t)| need.is_subset(&t.dim_set()))
                .min_by_key(|(k, t)| (t.dims().len(), *k))
                .map(|(k, _)| k);
            match host {
                Some(k) => tables[k] = tables[k].join(side, counter)?,
                None => residual.push(side.clone()),
            }
        }
        tables.extend(partition_sides(residual, self.config.k_p, counter)?);
        merge_contained(&mut tables, counter)?;
        if !self.config.table_sets && tables.len() > 1 {
            tables = vec![UtilityTable::join_all(tables.iter(), counter)?];
        }

        let mut counters = std::mem::take(&mut self.pending_counters);
        counters.insert(self.id, self.uppers.len());
        self.sent_util = true;
        Ok(UtilMessage {
            sender: self.id,
            receiver: parent,
            tables,
            counters,
        })
    }

    /// Root only: picks its own value from the fully eliminated tables and
    /// starts value propagation.
    pub fn root_decide(&mut self, counter: &mut AccessCounter) -> Result<Vec<ValueMessage>> {
        if !self.is_root() {
            return Err(self.protocol("only the root decides first"));
        }
        if !self.is_ready() {
            return Err(self.protocol("root decision before all children reported"));
        }
        if let Some(x) = self.pending_counters.keys().next() {
            return Err(self.protocol(format!("variable {x} was never eliminated")));
        }
        if let Some(t) = self
            .running
            .iter()
            .find(|t| t.dims().iter().any(|&d| d != self.id))
        {
            return Err(self.protocol(format!("residual foreign dims {:?} at root", t.dims())));
        }
        let own = UtilityTable::new(
            vec![self.id],
            vec![self.domain_size],
            vec![C::zero(); self.domain_size],
        )?;
        let mut refs: Vec<&UtilityTable<C>> = self.running.iter().collect();
        refs.push(&own);
        let (choice, optimum) = UtilityTable::argmin_joined(
            &refs,
            &BTreeSet::from([self.id]),
            &Assignment::new(),
            counter,
        )?;
        self.optimum = Some(optimum);
        self.dispatch(choice, counter)
    }

    /// Non-root: handles the VALUE message from the parent.
    pub fn on_value_message(
        &mut self,
        msg: ValueMessage,
        counter: &mut AccessCounter,
    ) -> Result<Vec<ValueMessage>> {
        if Some(msg.sender) != self.parent || msg.receiver != self.id {
            return Err(self.protocol(format!("VALUE from non-parent {}", msg.sender)));
        }
        if !msg.assignment.contains(self.id) {
            return Err(self.protocol("VALUE message does not assign the receiver"));
        }
        if self.determined.is_some() {
            return Err(self.protocol("second VALUE message"));
        }
        self.dispatch(msg.assignment, counter)
    }

    /// For each branch, jointly chooses the variables eliminated here under
    /// everything determined so far and forwards what the child needs.
    fn dispatch(
        &mut self,
        mut determined: Assignment,
        counter: &mut AccessCounter,
    ) -> Result<Vec<ValueMessage>> {
        let mut out = Vec::with_capacity(self.children.len());
        let mut decided: Vec<(usize, Assignment)> = Vec::new();
        for &c in &self.children {
            let ev = &self.eliminated[&c];
            let choice = if ev.is_empty() {
                Assignment::new()
            } else {
                let refs: Vec<&UtilityTable<C>> = self.stored[&c].iter().collect();
                UtilityTable::argmin_joined(&refs, ev, &determined, counter)?.0
            };
            decided.push((c, choice));
        }
        for (_, choice) in &decided {
            determined.extend(choice);
        }
        for (c, _) in decided {
            out.push(ValueMessage {
                sender: self.id,
                receiver: c,
                assignment: determined.slice(&self.branch_dims[&c]),
            });
        }
        self.determined = Some(determined);
        Ok(out)
    }
}

/// Joins every table whose dims are contained in another table's dims into
/// that table (equal dims: the later one into the earlier one).
fn merge_contained<C: Cost>(
    tables: &mut Vec<UtilityTable<C>>,
    counter: &mut AccessCounter,
) -> Result<()> {
    loop {
        let sets: Vec<BTreeSet<usize>> = tables.iter().map(|t| t.dim_set()).collect();
        let pair = (0..tables.len()).find_map(|a| {
            (0..tables.len())
                .filter(|&b| b != a && sets[a].is_subset(&sets[b]) && (sets[a] != sets[b] || b < a))
                .max_by_key(|&b| (std::cmp::Reverse(sets[b].len()), std::cmp::Reverse(b)))
                .map(|b| (a, b))
        });
        let Some((small, host)) = pair else {
            return Ok(());
        };
        let joined = tables[host].join(&tables[small], counter)?;
        tables[host] = joined;
        tables.remove(small);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CostMatrix;
    use crate::solver::{BatchSize, SolverConfig, TableLimit};

    fn merge_dims(dims: &[&[usize]]) -> Vec<Vec<usize>> {
        let mut tables: Vec<UtilityTable<u64>> = dims
            .iter()
            .map(|d| {
                UtilityTable::new(d.to_vec(), vec![2; d.len()], vec![1; 1 << d.len()]).unwrap()
            })
            .collect();
        merge_contained(&mut tables, &mut AccessCounter::new()).unwrap();
        tables.iter().map(|t| t.dims().to_vec()).collect()
    }

    #[test]
    fn merge_contained_tables() {
        assert_eq!(merge_dims(&[&[1, 2, 3], &[2], &[3]]), vec![vec![1, 2, 3]]);
        assert_eq!(
            merge_dims(&[&[2, 4, 5], &[3, 4]]),
            vec![vec![2, 4, 5], vec![3, 4]]
        );
        assert_eq!(merge_dims(&[&[3, 4], &[4, 3]]), vec![vec![3, 4]]);
        // the smaller table goes into the largest host
        assert_eq!(
            merge_dims(&[&[1, 2], &[1], &[1, 2, 3]]),
            vec![vec![1, 2, 3]]
        );
    }

    fn zero_chain3() -> (Problem<u64>, PseudoTree) {
        let p = Problem::unconstrained(vec![2, 2, 2])
            .unwrap()
            .with_constraint(0, 1, CostMatrix::zeros(2, 2), CostMatrix::zeros(2, 2))
            .unwrap()
            .with_constraint(1, 2, CostMatrix::zeros(2, 2), CostMatrix::zeros(2, 2))
            .unwrap();
        let t = PseudoTree::build_rooted(&p, 0).unwrap();
        (p, t)
    }

    #[test]
    fn protocol_errors() {
        let (p, t) = zero_chain3();
        let cfg = SolverConfig::new(TableLimit::Dims(2), BatchSize::Vars(1))
            .unwrap()
            .resolve(&t);
        let mut c = AccessCounter::new();
        let mut mid = AgentState::new(1, &p, &t, cfg).unwrap();
        assert!(mid.finalize_util(&mut c).is_err());
        let bogus = UtilMessage {
            sender: 0,
            receiver: 1,
            tables: vec![],
            counters: BTreeMap::new(),
        };
        assert!(matches!(
            mid.absorb_child_message(bogus, &mut c),
            Err(Error::Protocol { agent: 1, .. })
        ));
        let no_self = ValueMessage {
            sender: 0,
            receiver: 1,
            assignment: Assignment::new(),
        };
        assert!(mid.on_value_message(no_self, &mut c).is_err());
        let mut leaf = AgentState::new(2, &p, &t, cfg).unwrap();
        let from_child = ValueMessage {
            sender: 0,
            receiver: 2,
            assignment: [(2, 0)].into_iter().collect(),
        };
        assert!(leaf.on_value_message(from_child, &mut c).is_err());
        let mut root = AgentState::new(0, &p, &t, cfg).unwrap();
        assert!(root.root_decide(&mut c).is_err());
    }

    #[test]
    fn zero_problem_yields_zero_tables() {
        let (p, t) = zero_chain3();
        let cfg = SolverConfig::joint().resolve(&t);
        let mut c = AccessCounter::new();
        let mut leaf = AgentState::new(2, &p, &t, cfg).unwrap();
        let msg = leaf.finalize_util(&mut c).unwrap();
        let mut mid = AgentState::new(1, &p, &t, cfg).unwrap();
        mid.absorb_child_message(msg, &mut c).unwrap();
        let up = mid.finalize_util(&mut c).unwrap();
        assert!(up.tables.iter().all(|t| t.values().iter().all(|&v| v == 0)));
        assert_eq!(up.dims_union(), BTreeSet::from([0, 1]));
        assert_eq!(mid.elimination_sets()[&2], BTreeSet::from([2]));
    }
}
