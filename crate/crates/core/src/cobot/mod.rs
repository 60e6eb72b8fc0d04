//! Human/cobot task allocation.
//!
//! Every action can be executed either by the human worker or by a
//! velocity-limited cobot. Four appenders attach the measured metrics, a
//! binary manipulator decides who executes each action, and one complex
//! calculator returns the serial makespan together with the summed ergonomic
//! penalty the human has to bear.

mod plugins;
mod table;

pub use plugins::{
    cobot_flag_manipulator, makespan_ergonomics_calculator, metric_appenders, ActionMetrics, CobotFlagManipulator,
    MakespanErgonomicsCalculator, Metric, MetricAppender, COBOT_ENCODING, COBOT_EXECUTION_TIME,
    ERGONOMIC_PENALTY_HUMAN, EXECUTION_TIME_HUMAN, IS_COBOT_UTILIZED, MAKESPAN_OBJECTIVE, PENALTY_OBJECTIVE,
};
pub use table::{InstanceRow, InstanceTable, TableError, CSV_HEADER};

use rand::Rng;

use crate::problem::{assemble, AssembledProblem, AssemblyError, PluginRegistry};
use crate::workflow::{ActionNode, Relationship, Workflow};

/// Four appenders, the flag manipulator and the makespan/ergonomics calculator.
pub fn cobot_registry(table: &InstanceTable) -> PluginRegistry {
    let mut registry = PluginRegistry::new();
    for appender in metric_appenders(table) {
        registry = registry.with_appender(appender);
    }
    registry
        .with_manipulator(cobot_flag_manipulator())
        .with_complex(makespan_ergonomics_calculator())
}

pub fn build_cobot_problem(workflow: Workflow, table: &InstanceTable) -> Result<AssembledProblem, AssemblyError> {
    assemble(workflow, cobot_registry(table))
}

/// Serial line `a1 -> a2 -> ... -> an` with one action per table row.
pub fn line_workflow(name: &str, table: &InstanceTable) -> Workflow {
    let mut w = Workflow::new(name);
    w.actions = table
        .rows
        .iter()
        .map(|r| ActionNode::new(r.action_id.clone(), format!("task {}", r.action_id)))
        .collect();
    w.relationships = table
        .rows
        .windows(2)
        .map(|pair| Relationship::successor(pair[0].action_id.clone(), pair[1].action_id.clone()))
        .collect();
    w
}

/// The three-action reference desk instance.
pub mod reference {
    use super::*;

    pub fn w3_table() -> InstanceTable {
        InstanceTable::new(vec![
            InstanceRow::new("a1", 10.0, 25.0, 3),
            InstanceRow::new("a2", 20.0, 40.0, 1),
            InstanceRow::new("a3", 15.0, 30.0, 2),
        ])
        .expect("reference table is valid")
    }

    pub fn w3_workflow() -> Workflow {
        let mut w = Workflow::new("W3");
        w.actions = vec![
            ActionNode::new("a1", "grab housing"),
            ActionNode::new("a2", "insert shaft"),
            ActionNode::new("a3", "screw cover"),
        ];
        w.relationships = vec![Relationship::successor("a1", "a2"), Relationship::successor("a2", "a3")];
        w
    }

    pub fn w3_problem() -> AssembledProblem {
        build_cobot_problem(w3_workflow(), &w3_table()).expect("reference problem assembles")
    }
}

/// Random instance generators for benchmarks and tests.
pub mod synthetic {
    use super::*;

    /// `n` actions with human time U[5,30] s, cobot time = human x U[1.5,3]
    /// and penalty uniform in {1,2,3}. Ids are `{prefix}1..{prefix}n`.
    pub fn random_table(n: usize, prefix: &str, rng: &mut impl Rng) -> InstanceTable {
        let rows = (1..=n)
            .map(|i| {
                let human = rng.random_range(5.0..=30.0);
                let factor = rng.random_range(1.5..=3.0);
                let penalty = rng.random_range(1..=3);
                InstanceRow::new(format!("{prefix}{i}"), human, human * factor, penalty)
            })
            .collect();
        InstanceTable::new(rows).expect("generated rows are in range")
    }

    pub fn random_line_problem(n: usize, rng: &mut impl Rng) -> (Workflow, InstanceTable, AssembledProblem) {
        let table = random_table(n, "a", rng);
        let workflow = line_workflow(&format!("random-{n}"), &table);
        let problem = build_cobot_problem(workflow.clone(), &table).expect("generated instance assembles");
        (workflow, table, problem)
    }

    /// Independent stations on one workflow, each contributing its own
    /// (makespan, penalty) pair. Station `k` is labelled `station{k+1}`.
    pub fn multi_station_problem(stations: &[InstanceTable]) -> Result<AssembledProblem, AssemblyError> {
        let mut all = InstanceTable::default();
        for t in stations {
            all.rows.extend(t.rows.iter().cloned());
        }
        let workflow = line_workflow("stations", &all);
        let mut registry = PluginRegistry::new();
        for appender in metric_appenders(&all) {
            registry = registry.with_appender(appender);
        }
        registry = registry.with_manipulator(cobot_flag_manipulator());
        for (k, t) in stations.iter().enumerate() {
            let ids = t.rows.iter().map(|r| r.action_id.clone()).collect();
            registry = registry.with_complex(MakespanErgonomicsCalculator::scoped(format!("station{}", k + 1), ids));
        }
        assemble(workflow, registry)
    }
}
