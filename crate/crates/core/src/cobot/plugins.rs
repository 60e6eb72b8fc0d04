use std::sync::Arc;

use super::table::InstanceTable;
use crate::problem::{
    ComplexFitnessCalculator, MetaInformationAppender, ObjectiveSpec, PluginError, SubEncodingSpec, SubValue,
    WorkflowManipulator,
};
use crate::workflow::{ActionIndexMap, ActionNode, Property, PropertyValue, ValueType, Workflow};

pub const EXECUTION_TIME_HUMAN: &str = "ExecutionTimeHuman";
pub const COBOT_EXECUTION_TIME: &str = "CobotExecutionTime";
pub const ERGONOMIC_PENALTY_HUMAN: &str = "ErgonomicPenaltyHuman";
pub const IS_COBOT_UTILIZED: &str = "IsCobotUtilized";

pub const MAKESPAN_OBJECTIVE: &str = "makespan_seconds";
pub const PENALTY_OBJECTIVE: &str = "ergonomic_penalty";

/// The four per-action properties, read back from a workflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionMetrics {
    pub execution_time_human: f64,
    pub execution_time_cobot: f64,
    pub ergonomic_penalty_human: i64,
    pub is_cobot_utilized: bool,
}

impl ActionMetrics {
    pub fn from_action(action: &ActionNode) -> Result<Self, PluginError> {
        let get = |key: &str, ty: ValueType| -> Result<&PropertyValue, PluginError> {
            let p = action.properties.get(key).ok_or_else(|| PluginError::MissingProperty {
                element_id: action.id.clone(),
                key: key.to_owned(),
            })?;
            if p.value_type() != ty {
                return Err(PluginError::PropertyType {
                    element_id: action.id.clone(),
                    key: key.to_owned(),
                    expected: ty,
                });
            }
            Ok(&p.value)
        };
        Ok(ActionMetrics {
            execution_time_human: get(EXECUTION_TIME_HUMAN, ValueType::Real)?.as_real().unwrap_or_default(),
            execution_time_cobot: get(COBOT_EXECUTION_TIME, ValueType::Real)?.as_real().unwrap_or_default(),
            ergonomic_penalty_human: get(ERGONOMIC_PENALTY_HUMAN, ValueType::Int)?.as_int().unwrap_or_default(),
            is_cobot_utilized: get(IS_COBOT_UTILIZED, ValueType::Bool)?.as_bool().unwrap_or_default(),
        })
    }

    /// Duration of the action under the current assignment.
    pub fn duration(&self) -> f64 {
        if self.is_cobot_utilized {
            self.execution_time_cobot
        } else {
            self.execution_time_human
        }
    }

    /// Ergonomic penalty borne by the human; zero when the cobot executes the action.
    pub fn penalty(&self) -> i64 {
        if self.is_cobot_utilized {
            0
        } else {
            self.ergonomic_penalty_human
        }
    }
}

/// Which property a [`MetricAppender`] writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    ExecutionTimeHuman,
    ErgonomicPenaltyHuman,
    CobotExecutionTime,
    IsCobotUtilized,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::ExecutionTimeHuman,
        Metric::ErgonomicPenaltyHuman,
        Metric::CobotExecutionTime,
        Metric::IsCobotUtilized,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::ExecutionTimeHuman => EXECUTION_TIME_HUMAN,
            Metric::ErgonomicPenaltyHuman => ERGONOMIC_PENALTY_HUMAN,
            Metric::CobotExecutionTime => COBOT_EXECUTION_TIME,
            Metric::IsCobotUtilized => IS_COBOT_UTILIZED,
        }
    }

    fn description(self) -> &'static str {
        match self {
            Metric::ExecutionTimeHuman => "MTM duration in seconds when the human worker executes the action",
            Metric::ErgonomicPenaltyHuman => "MURI ergonomic penalty (1-3) borne by the human worker",
            Metric::CobotExecutionTime => "duration in seconds when the cobot executes the action",
            Metric::IsCobotUtilized => "whether the cobot executes the action (initially false)",
        }
    }
}

/// Writes one metric property onto the actions covered by an instance table.
#[derive(Debug, Clone)]
pub struct MetricAppender {
    metric: Metric,
    table: Arc<InstanceTable>,
}

impl MetricAppender {
    pub fn new(metric: Metric, table: Arc<InstanceTable>) -> Self {
        MetricAppender { metric, table }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }
}

/// The four appenders, one per property.
pub fn metric_appenders(table: &InstanceTable) -> Vec<MetricAppender> {
    let table = Arc::new(table.clone());
    Metric::ALL
        .into_iter()
        .map(|m| MetricAppender::new(m, Arc::clone(&table)))
        .collect()
}

/// Checks that the table has exactly one row per leaf action of `workflow`.
fn check_coverage(table: &InstanceTable, workflow: &Workflow) -> Result<(), PluginError> {
    if let Some(dup) = table.duplicate_ids().first() {
        return Err(PluginError::InvalidInput(format!(
            "instance table lists action '{dup}' more than once"
        )));
    }
    for row in &table.rows {
        match workflow.action(&row.action_id) {
            None => {
                return Err(PluginError::InvalidInput(format!(
                    "instance table row for unknown action '{}'",
                    row.action_id
                )))
            }
            Some(a) if a.is_composite() => {
                return Err(PluginError::InvalidInput(format!(
                    "instance table row for composite action '{}'; only leaf actions carry metrics",
                    row.action_id
                )))
            }
            Some(_) => {}
        }
    }
    let missing: Vec<&str> = workflow
        .leaf_actions()
        .filter(|a| table.row(&a.id).is_none())
        .map(|a| a.id.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(PluginError::InvalidInput(format!(
            "instance table has no row for action(s) {}",
            missing.join(", ")
        )));
    }
    Ok(())
}

impl MetaInformationAppender for MetricAppender {
    fn name(&self) -> &str {
        self.metric.key()
    }

    fn description(&self) -> &str {
        self.metric.description()
    }

    fn property_keys(&self) -> Vec<String> {
        vec![self.metric.key().to_owned()]
    }

    fn append(&self, workflow: &Workflow) -> Result<Workflow, PluginError> {
        check_coverage(&self.table, workflow)?;
        let mut out = workflow.clone();
        let key = self.metric.key();
        if self.metric == Metric::IsCobotUtilized {
            for action in &mut out.actions {
                action.properties.upsert(Property::new(key, false)?);
            }
            return Ok(out);
        }
        for row in &self.table.rows {
            let value: PropertyValue = match self.metric {
                Metric::ExecutionTimeHuman => row.human_time_s.into(),
                Metric::CobotExecutionTime => row.cobot_time_s.into(),
                Metric::ErgonomicPenaltyHuman => row.ergonomic_penalty.into(),
                Metric::IsCobotUtilized => unreachable!(),
            };
            out.upsert_property(&row.action_id, Property::new(key, value)?)?;
        }
        Ok(out)
    }
}

/// Binary manipulator: bit `i` sets `IsCobotUtilized` on the action with index `i`.
#[derive(Debug, Clone, Default)]
pub struct CobotFlagManipulator;

pub const COBOT_ENCODING: &str = "cobot_utilization";

pub fn cobot_flag_manipulator() -> CobotFlagManipulator {
    CobotFlagManipulator
}

impl WorkflowManipulator for CobotFlagManipulator {
    fn name(&self) -> &str {
        COBOT_ENCODING
    }

    fn description(&self) -> &str {
        "assigns each action to the cobot (1) or the human worker (0)"
    }

    fn property_keys(&self) -> Vec<String> {
        vec![IS_COBOT_UTILIZED.to_owned()]
    }

    fn encoding_spec(&self, index_map: &ActionIndexMap) -> SubEncodingSpec {
        SubEncodingSpec::binary(COBOT_ENCODING, index_map.len())
    }

    fn manipulate(
        &self,
        workflow: &mut Workflow,
        index_map: &ActionIndexMap,
        value: &SubValue,
    ) -> Result<(), PluginError> {
        let bits = value
            .as_bits()
            .ok_or_else(|| PluginError::Encoding(format!("expected a bit vector, got {}", value.kind())))?;
        if bits.len() != index_map.len() {
            return Err(PluginError::Encoding(format!(
                "bit vector has length {}, workflow has {} actions",
                bits.len(),
                index_map.len()
            )));
        }
        for (i, id) in index_map.iter() {
            workflow.upsert_property(id, Property::new(IS_COBOT_UTILIZED, bits[i])?)?;
        }
        Ok(())
    }
}

/// Serial makespan and summed ergonomic penalty over leaf actions.
///
/// A scoped calculator restricts both sums to a subset of actions and
/// suffixes its objective names with `[label]`, which lets one workflow
/// model several independent stations.
#[derive(Debug, Clone, Default)]
pub struct MakespanErgonomicsCalculator {
    scope: Option<(String, Vec<String>)>,
}

pub fn makespan_ergonomics_calculator() -> MakespanErgonomicsCalculator {
    MakespanErgonomicsCalculator::default()
}

impl MakespanErgonomicsCalculator {
    pub fn scoped(label: impl Into<String>, action_ids: Vec<String>) -> Self {
        MakespanErgonomicsCalculator {
            scope: Some((label.into(), action_ids)),
        }
    }

    fn actions<'w>(&'w self, workflow: &'w Workflow) -> Box<dyn Iterator<Item = &'w ActionNode> + 'w> {
        match &self.scope {
            None => Box::new(workflow.leaf_actions()),
            Some((_, ids)) => Box::new(
                workflow
                    .leaf_actions()
                    .filter(move |a| ids.contains(&a.id)),
            ),
        }
    }

    /// Ids of actions whose metrics are missing or mistyped.
    pub fn offending_actions(&self, workflow: &Workflow) -> Vec<String> {
        self.actions(workflow)
            .filter(|a| ActionMetrics::from_action(a).is_err())
            .map(|a| a.id.clone())
            .collect()
    }
}

impl ComplexFitnessCalculator for MakespanErgonomicsCalculator {
    fn name(&self) -> &str {
        match &self.scope {
            None => "makespan_ergonomics",
            Some((label, _)) => label,
        }
    }

    fn objective_specs(&self) -> Vec<ObjectiveSpec> {
        match &self.scope {
            None => vec![
                ObjectiveSpec::minimize(MAKESPAN_OBJECTIVE),
                ObjectiveSpec::minimize(PENALTY_OBJECTIVE),
            ],
            Some((label, _)) => vec![
                ObjectiveSpec::minimize(format!("{MAKESPAN_OBJECTIVE}[{label}]")),
                ObjectiveSpec::minimize(format!("{PENALTY_OBJECTIVE}[{label}]")),
            ],
        }
    }

    fn check_precondition(&self, workflow: &Workflow) -> bool {
        let offending = self.offending_actions(workflow);
        if !offending.is_empty() {
            log::debug!(
                "{}: actions without complete metrics: {}",
                self.name(),
                offending.join(", ")
            );
        }
        offending.is_empty()
    }

    fn calculate(&self, workflow: &Workflow, _index_map: &ActionIndexMap) -> Result<Vec<f64>, PluginError> {
        let mut makespan = 0.0;
        let mut penalty = 0i64;
        for action in self.actions(workflow) {
            let m = ActionMetrics::from_action(action)?;
            makespan += m.duration();
            penalty += m.penalty();
        }
        Ok(vec![makespan, penalty as f64])
    }
}
