use std::collections::{BTreeMap, BTreeSet};

use adcop::engine::{MessageKind, TraceEntry};
use adcop::model::parse;
use adcop::solver::{AgentState, UtilMessage};
use adcop::{
    brute_force, run_with, AccessCounter, Assignment, BatchSize, IntProblem, PseudoTree,
    RunOptions, Scheduler, SolverConfig, TableLimit,
};

fn fixture(name: &str) -> IntProblem {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

fn dim_sets(entry: &TraceEntry) -> BTreeSet<BTreeSet<usize>> {
    entry
        .dims
        .iter()
        .map(|d| d.iter().copied().collect())
        .collect()
}

fn traced(problem: &IntProblem, config: SolverConfig) -> adcop::IntRunResult {
    let tree = PseudoTree::build_rooted(problem, 0).unwrap();
    let options = RunOptions {
        scheduler: Scheduler::Fifo,
        trace: true,
    };
    run_with(problem, &tree, &config, options).unwrap()
}

fn golden(name: &str, result: &adcop::IntRunResult) {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    if std::env::var_os("WRITE_GOLDEN").is_some() {
        let text: String = result
            .trace
            .as_ref()
            .unwrap()
            .iter()
            .map(|e| format!("{e}\n"))
            .collect();
        std::fs::write(&path, text).unwrap();
    }
    let expected = std::fs::read_to_string(path).unwrap();
    let actual: String = result
        .trace
        .as_ref()
        .unwrap()
        .iter()
        .map(|e| format!("{e}\n"))
        .collect();
    assert_eq!(actual, expected);
}

#[test]
fn four_agent_tree_roles() {
    let p = fixture("four_agent.adcop");
    let t = PseudoTree::build_rooted(&p, 0).unwrap();
    assert_eq!(t.parent(1), Some(0));
    assert_eq!(t.children(1), &set(&[2, 3]));
    assert_eq!(t.pseudo_parents(3), &set(&[0]));
    assert_eq!(t.separators(1), &set(&[0]));
    assert_eq!(t.interface_descendants(1), &set(&[3]));
    assert_eq!(t.induced_width(), 3);
}

#[test]
fn four_agent_messages() {
    let p = fixture("four_agent.adcop");
    let r = traced(&p, SolverConfig::joint());
    assert!(!r.config.table_sets);
    let trace = r.trace.as_ref().unwrap();
    let utils: Vec<_> = trace
        .iter()
        .filter(|e| e.kind == MessageKind::Util)
        .collect();
    let values: Vec<_> = trace
        .iter()
        .filter(|e| e.kind == MessageKind::Value)
        .collect();
    assert_eq!(utils.len(), 3);
    assert_eq!(values.len(), 3);

    let util_of = |s: usize| utils.iter().find(|e| e.sender == s).unwrap();
    assert_eq!(dim_sets(util_of(2)), BTreeSet::from([set(&[1, 2])]));
    assert_eq!(dim_sets(util_of(3)), BTreeSet::from([set(&[0, 1, 3])]));
    assert_eq!(dim_sets(util_of(1)), BTreeSet::from([set(&[0, 1, 3])]));

    assert_eq!(
        r.elimination_sets,
        BTreeMap::from([
            ((1, 2), set(&[2])),
            ((1, 3), set(&[])),
            ((0, 1), set(&[1, 3]))
        ])
    );

    let value_to = |c: usize| set(&values.iter().find(|e| e.receiver == c).unwrap().dims[0]);
    assert_eq!(value_to(1), set(&[0, 1, 3]));
    assert_eq!(value_to(2), set(&[1, 2]));
    assert_eq!(value_to(3), set(&[0, 1, 3]));

    let (_, best) = brute_force(&p).unwrap();
    assert_eq!(r.cost, best);
    assert_eq!(r.optimum, best);
    golden("four_agent.trace", &r);
}

#[test]
fn five_agent_chain_messages() {
    let p = fixture("five_agent_chain.adcop");
    let cfg = SolverConfig::new(TableLimit::Dims(3), BatchSize::Vars(1)).unwrap();
    let r = traced(&p, cfg);
    assert_eq!(r.config.induced_width, 5);
    assert!(r.config.table_sets);
    let trace = r.trace.as_ref().unwrap();
    let util_of = |s: usize| {
        trace
            .iter()
            .find(|e| e.kind == MessageKind::Util && e.sender == s)
            .unwrap()
    };
    assert_eq!(dim_sets(util_of(4)), BTreeSet::from([set(&[1, 3, 4])]));
    assert_eq!(
        dim_sets(util_of(3)),
        BTreeSet::from([set(&[1, 3, 4]), set(&[2, 3])])
    );
    assert_eq!(
        dim_sets(util_of(2)),
        BTreeSet::from([set(&[0, 1, 2]), set(&[1, 3, 4]), set(&[2, 3])])
    );
    assert_eq!(dim_sets(util_of(1)), BTreeSet::from([set(&[0, 1, 2])]));

    assert_eq!(r.elimination_sets[&(1, 2)], set(&[3, 4]));
    assert_eq!(r.elimination_sets[&(0, 1)], set(&[1, 2]));
    for ((i, c), ev) in &r.elimination_sets {
        if (*i, *c) != (1, 2) && (*i, *c) != (0, 1) {
            assert!(ev.is_empty(), "unexpected eliminations at {i} for {c}");
        }
    }
    let order: Vec<(usize, Vec<usize>)> = r
        .eliminations
        .iter()
        .map(|b| (b.agent, b.vars.clone()))
        .collect();
    assert_eq!(
        order,
        vec![(1, vec![4]), (1, vec![3]), (0, vec![1]), (0, vec![2])]
    );
    assert_eq!(r.metrics.max_dims, 3);

    let value_to = |c: usize| {
        let e = trace
            .iter()
            .find(|e| e.kind == MessageKind::Value && e.receiver == c)
            .unwrap();
        set(&e.dims[0])
    };
    assert_eq!(value_to(1), set(&[0, 1, 2]));
    assert_eq!(value_to(2), set(&[0, 1, 2, 3, 4]));
    assert_eq!(value_to(3), set(&[1, 2, 3, 4]));
    assert_eq!(value_to(4), set(&[1, 3, 4]));

    let (_, best) = brute_force(&p).unwrap();
    assert_eq!(r.cost, best);
    golden("five_agent_chain.trace", &r);
}

/// Drives the agents of the four-agent fixture by hand, optionally adding a
/// bogus value for agent 2 to the root's VALUE message to agent 1.
fn drive_four_agent(spurious: Option<usize>) -> Assignment {
    let p = fixture("four_agent.adcop");
    let t = PseudoTree::build_rooted(&p, 0).unwrap();
    let cfg = SolverConfig::joint().resolve(&t);
    let mut agents: Vec<AgentState<u64>> = (0..4)
        .map(|i| AgentState::new(i, &p, &t, cfg).unwrap())
        .collect();
    let mut c = AccessCounter::new();
    let m2: UtilMessage<u64> = agents[2].finalize_util(&mut c).unwrap();
    let m3 = agents[3].finalize_util(&mut c).unwrap();
    agents[1].absorb_child_message(m2, &mut c).unwrap();
    agents[1].absorb_child_message(m3, &mut c).unwrap();
    let m1 = agents[1].finalize_util(&mut c).unwrap();
    agents[0].absorb_child_message(m1, &mut c).unwrap();
    let mut down = agents[0].root_decide(&mut c).unwrap();
    assert_eq!(down.len(), 1);
    if let Some(v) = spurious {
        down[0].assignment.insert(2, v);
    }
    let msg = down.pop().unwrap();
    for m in agents[1].on_value_message(msg, &mut c).unwrap() {
        let r = m.receiver;
        assert!(agents[r].on_value_message(m, &mut c).unwrap().is_empty());
    }
    (0..4).map(|i| (i, agents[i].value().unwrap())).collect()
}

#[test]
fn extra_values_in_value_message_are_overridden() {
    let p = fixture("four_agent.adcop");
    let clean = drive_four_agent(None);
    let (_, best) = brute_force(&p).unwrap();
    assert_eq!(p.total_cost(&clean).unwrap(), best);
    for v in 0..2 {
        let noisy = drive_four_agent(Some(v));
        assert_eq!(noisy, clean);
    }
}
