//! Deterministic message-passing simulator.
//!
//! Each agent keeps a logical clock of table accesses. Messages carry the
//! sender's clock and a receiver first advances its own to the carried value,
//! so the largest clock at quiescence is the critical-path operation count.

mod metrics;
mod privacy;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use metrics::Metrics;
use privacy::LeakLedger;

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::model::{Assignment, Problem};
use crate::pseudotree::PseudoTree;
use crate::solver::{
    AgentState, EliminationBatch, ResolvedConfig, SolverConfig, UtilMessage, ValueMessage,
};
use crate::tables::AccessCounter;

/// Order in which pending events are delivered.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Scheduler {
    #[default]
    Fifo,
    /// Uniformly random pending event, reproducible from the seed.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub scheduler: Scheduler,
    pub trace: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageKind {
    Util,
    Value,
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MessageKind::Util => "UTIL",
            MessageKind::Value => "VALUE",
        })
    }
}

/// One sent message. For UTIL messages `dims` lists every table's
/// dimensions; for VALUE messages it holds the assigned variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub tick: usize,
    pub sender: usize,
    pub receiver: usize,
    pub kind: MessageKind,
    pub dims: Vec<Vec<usize>>,
    pub payload: u64,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self
            .dims
            .iter()
            .map(|d| {
                let vars: Vec<String> = d.iter().map(|v| v.to_string()).collect();
                format!("{{{}}}", vars.join(","))
            })
            .collect();
        write!(
            f,
            "{} {} {}->{} [{}] {}",
            self.tick,
            self.kind,
            self.sender,
            self.receiver,
            dims.join(" "),
            self.payload
        )
    }
}

/// Shape of one UTIL message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilRecord {
    pub sender: usize,
    pub receiver: usize,
    /// Dimensions of every table, in sent order.
    pub tables: Vec<Vec<usize>>,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<C = u64> {
    pub assignment: Assignment,
    /// Total cost of `assignment`.
    pub cost: C,
    /// Optimum as computed by the root during the run.
    pub optimum: C,
    pub metrics: Metrics,
    pub config: ResolvedConfig,
    /// Variables eliminated by agent `i` on the message of child `c`, keyed `(i, c)`.
    pub elimination_sets: BTreeMap<(usize, usize), BTreeSet<usize>>,
    /// Elimination batches in the order they were performed.
    pub eliminations: Vec<EliminationBatch>,
    pub util_log: Vec<UtilRecord>,
    pub trace: Option<Vec<TraceEntry>>,
}

enum Event<C> {
    Start(usize),
    Util(UtilMessage<C>, u64),
    Value(ValueMessage, u64),
}

struct Queue<C> {
    events: VecDeque<Event<C>>,
    rng: Option<ChaCha8Rng>,
}

impl<C> Queue<C> {
    fn new(scheduler: Scheduler) -> Self {
        let rng = match scheduler {
            Scheduler::Fifo => None,
            Scheduler::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        };
        Self {
            events: VecDeque::new(),
            rng,
        }
    }

    fn push(&mut self, event: Event<C>) {
        self.events.push_back(event);
    }

    fn pop(&mut self) -> Option<Event<C>> {
        match &mut self.rng {
            None => self.events.pop_front(),
            Some(_) if self.events.is_empty() => None,
            Some(rng) => {
                let k = rng.gen_range(0..self.events.len());
                self.events.swap_remove_back(k)
            }
        }
    }
}

/// Runs the solver on `problem` over `tree` with the default options.
pub fn run<C: Cost>(
    problem: &Problem<C>,
    tree: &PseudoTree,
    config: &SolverConfig,
) -> Result<RunResult<C>> {
    run_with(problem, tree, config, RunOptions::default())
}

pub fn run_with<C: Cost>(
    problem: &Problem<C>,
    tree: &PseudoTree,
    config: &SolverConfig,
    options: RunOptions,
) -> Result<RunResult<C>> {
    problem.validate()?;
    if tree.n_agents() != problem.n_agents() {
        return Err(Error::InvalidConfig(format!(
            "pseudo tree has {} agents, problem has {}",
            tree.n_agents(),
            problem.n_agents()
        )));
    }
    for (i, j) in problem.edges() {
        if tree.parent(i) != Some(j)
            && tree.parent(j) != Some(i)
            && !tree.pseudo_parents(i).contains(&j)
            && !tree.pseudo_parents(j).contains(&i)
        {
            return Err(Error::InvalidConfig(format!(
                "constraint {i}-{j} is not a tree or back edge"
            )));
        }
    }
    let resolved = config.resolve(tree);
    Simulation::new(problem, tree, resolved, options)?.execute()
}

struct Simulation<'a, C> {
    problem: &'a Problem<C>,
    tree: &'a PseudoTree,
    config: ResolvedConfig,
    agents: Vec<AgentState<C>>,
    clocks: Vec<u64>,
    queue: Queue<C>,
    metrics: Metrics,
    leaks: LeakLedger,
    util_log: Vec<UtilRecord>,
    eliminations: Vec<EliminationBatch>,
    trace: Option<Vec<TraceEntry>>,
    tick: usize,
}

impl<'a, C: Cost> Simulation<'a, C> {
    fn new(
        problem: &'a Problem<C>,
        tree: &'a PseudoTree,
        config: ResolvedConfig,
        options: RunOptions,
    ) -> Result<Self> {
        let agents = (0..problem.n_agents())
            .map(|i| AgentState::new(i, problem, tree, config))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            problem,
            tree,
            config,
            clocks: vec![0; agents.len()],
            agents,
            queue: Queue::new(options.scheduler),
            metrics: Metrics::default(),
            leaks: LeakLedger::new(),
            util_log: Vec::new(),
            eliminations: Vec::new(),
            trace: options.trace.then(Vec::new),
            tick: 0,
        })
    }

    fn execute(mut self) -> Result<RunResult<C>> {
        for i in 0..self.agents.len() {
            if self.tree.is_leaf(i) {
                self.queue.push(Event::Start(i));
            }
        }
        while let Some(event) = self.queue.pop() {
            self.tick += 1;
            self.handle(event)?;
        }
        self.finish()
    }

    fn handle(&mut self, event: Event<C>) -> Result<()> {
        let mut counter = AccessCounter::new();
        let agent = match event {
            Event::Start(i) => {
                self.after_util_ready(i, &mut counter)?;
                i
            }
            Event::Util(msg, clock) => {
                let i = msg.receiver;
                self.clocks[i] = self.clocks[i].max(clock);
                let lowers = self.tree.lower_neighbors(i);
                for table in &msg.tables {
                    self.leaks.observe(self.problem, i, &lowers, table);
                }
                self.agents[i].absorb_child_message(msg, &mut counter)?;
                if self.agents[i].is_ready() {
                    self.after_util_ready(i, &mut counter)?;
                }
                i
            }
            Event::Value(msg, clock) => {
                let i = msg.receiver;
                self.clocks[i] = self.clocks[i].max(clock);
                let out = self.agents[i].on_value_message(msg, &mut counter)?;
                self.charge(i, &counter);
                for m in out {
                    self.send_value(m);
                }
                return Ok(());
            }
        };
        self.charge(agent, &counter);
        Ok(())
    }

    /// Runs once all child messages of `i` are in: report to the parent, or
    /// decide at the root. Outgoing messages are charged with this handler's
    /// accesses by `charge`, which must run before they are queued.
    fn after_util_ready(&mut self, i: usize, counter: &mut AccessCounter) -> Result<()> {
        if self.agents[i].is_root() {
            let out = self.agents[i].root_decide(counter)?;
            self.charge(i, counter);
            *counter = AccessCounter::new();
            for m in out {
                self.send_value(m);
            }
        } else {
            let msg = self.agents[i].finalize_util(counter)?;
            self.charge(i, counter);
            *counter = AccessCounter::new();
            self.send_util(msg);
        }
        Ok(())
    }

    fn charge(&mut self, i: usize, counter: &AccessCounter) {
        self.clocks[i] += counter.accesses;
        self.metrics.total_accesses += counter.accesses;
        self.metrics.max_dims = self.metrics.max_dims.max(counter.max_dims);
        self.metrics.peak_agent_cells = self
            .metrics
            .peak_agent_cells
            .max(self.agents[i].held_cells());
        let done = self.eliminations.iter().filter(|b| b.agent == i).count();
        self.eliminations
            .extend(self.agents[i].batches()[done..].iter().cloned());
    }

    fn record(
        &mut self,
        sender: usize,
        receiver: usize,
        kind: MessageKind,
        dims: Vec<Vec<usize>>,
        payload: u64,
    ) {
        self.metrics.message_count += 1;
        self.metrics.network_load += payload;
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEntry {
                tick: self.tick,
                sender,
                receiver,
                kind,
                dims,
                payload,
            });
        }
    }

    fn send_util(&mut self, msg: UtilMessage<C>) {
        let cells = msg.cells();
        let dims: Vec<Vec<usize>> = msg.tables.iter().map(|t| t.dims().to_vec()).collect();
        for t in &msg.tables {
            self.metrics.max_dims = self.metrics.max_dims.max(t.dims().len());
        }
        self.metrics.util_messages += 1;
        self.metrics.util_cells += cells as u64;
        self.metrics.max_message_cells = self.metrics.max_message_cells.max(cells);
        self.util_log.push(UtilRecord {
            sender: msg.sender,
            receiver: msg.receiver,
            tables: dims.clone(),
            cells,
        });
        self.record(
            msg.sender,
            msg.receiver,
            MessageKind::Util,
            dims,
            1 + cells as u64,
        );
        let clock = self.clocks[msg.sender];
        self.queue.push(Event::Util(msg, clock));
    }

    fn send_value(&mut self, msg: ValueMessage) {
        let vars: Vec<usize> = msg.assignment.vars().collect();
        let payload = 1 + vars.len() as u64;
        self.metrics.value_messages += 1;
        self.record(
            msg.sender,
            msg.receiver,
            MessageKind::Value,
            vec![vars],
            payload,
        );
        let clock = self.clocks[msg.sender];
        self.queue.push(Event::Value(msg, clock));
    }

    fn finish(mut self) -> Result<RunResult<C>> {
        if let Some(stuck) = self.agents.iter().find(|a| !a.is_done()) {
            let i = stuck.id();
            let reported = self.agents[i].elimination_sets().len();
            let expected = self.tree.children(i).len();
            let msg = if reported < expected {
                format!("received {reported} of {expected} child UTIL messages")
            } else {
                "never received a VALUE message".to_string()
            };
            return Err(Error::Deadlock { agent: i, msg });
        }
        let assignment: Assignment = self
            .agents
            .iter()
            .map(|a| (a.id(), a.value().expect("done agents have a value")))
            .collect();
        let cost = self.problem.total_cost(&assignment)?;
        let root = self.tree.root();
        let optimum = self.agents[root].optimum().ok_or_else(|| Error::Protocol {
            agent: root,
            msg: "root finished without an optimum".into(),
        })?;

        self.metrics.nclo = self.clocks.iter().copied().max().unwrap_or(0);
        self.metrics.leaked_entries = self.leaks.len();
        self.metrics.total_entries = self.problem.directed_entries();
        self.metrics.privacy_loss = if self.metrics.total_entries == 0 {
            0.0
        } else {
            self.metrics.leaked_entries as f64 / self.metrics.total_entries as f64
        };

        let mut elimination_sets = BTreeMap::new();
        for a in &self.agents {
            for (&c, ev) in a.elimination_sets() {
                elimination_sets.insert((a.id(), c), ev.clone());
            }
        }
        Ok(RunResult {
            assignment,
            cost,
            optimum,
            metrics: self.metrics,
            config: self.config,
            elimination_sets,
            eliminations: self.eliminations,
            util_log: self.util_log,
            trace: self.trace,
        })
    }
}
