use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::encoding::{SubEncodingSpec, SubValue};
use crate::workflow::{ActionIndexMap, ValueType, Workflow, WorkflowError};

/// Name and optimization direction of one objective.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct ObjectiveSpec {
    pub name: String,
    pub is_maximization: bool,
}

impl ObjectiveSpec {
    pub fn minimize(name: impl Into<String>) -> Self {
        ObjectiveSpec {
            name: name.into(),
            is_maximization: false,
        }
    }

    pub fn maximize(name: impl Into<String>) -> Self {
        ObjectiveSpec {
            name: name.into(),
            is_maximization: true,
        }
    }

    pub fn direction(&self) -> &'static str {
        if self.is_maximization {
            "max"
        } else {
            "min"
        }
    }
}

/// Error raised by a plugin implementation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PluginError {
    #[error("missing property '{key}' on element '{element_id}'")]
    MissingProperty { element_id: String, key: String },
    #[error("property '{key}' on element '{element_id}' is not of type {expected}")]
    PropertyType {
        element_id: String,
        key: String,
        expected: ValueType,
    },
    #[error("encoding mismatch: {0}")]
    Encoding(String),
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Workflow(#[from] WorkflowError),
}

/// Embeds additional information, usually one property, into a workflow.
pub trait MetaInformationAppender: Send + Sync {
    fn name(&self) -> &str;
    fn description(&self) -> &str;

    /// Property keys this appender writes. Used only to lint overlapping plugins.
    fn property_keys(&self) -> Vec<String> {
        Vec::new()
    }

    fn append(&self, workflow: &Workflow) -> Result<Workflow, PluginError>;
}

/// Alters a workflow according to one sub-encoding value.
///
/// `encoding_spec` receives the action index map because the encoding length
/// usually depends on the number of enumerated actions. `manipulate` always
/// runs on a private copy of the base workflow.
pub trait WorkflowManipulator: Send + Sync {
    fn name(&self) -> &str;
    fn description(&self) -> &str;

    fn property_keys(&self) -> Vec<String> {
        Vec::new()
    }

    fn encoding_spec(&self, index_map: &ActionIndexMap) -> SubEncodingSpec;

    fn manipulate(&self, workflow: &mut Workflow, index_map: &ActionIndexMap, value: &SubValue)
        -> Result<(), PluginError>;
}

/// One objective computed from a manipulated workflow.
pub trait PrimitiveFitnessCalculator: Send + Sync {
    fn objective_spec(&self) -> ObjectiveSpec;
    fn check_precondition(&self, workflow: &Workflow) -> bool;
    fn calculate(&self, workflow: &Workflow, index_map: &ActionIndexMap) -> Result<f64, PluginError>;
}

/// Several objectives computed in a single traversal.
pub trait ComplexFitnessCalculator: Send + Sync {
    fn name(&self) -> &str;
    fn objective_specs(&self) -> Vec<ObjectiveSpec>;
    fn check_precondition(&self, workflow: &Workflow) -> bool;
    fn calculate(&self, workflow: &Workflow, index_map: &ActionIndexMap) -> Result<Vec<f64>, PluginError>;
}

/// The four plugin lists, each applied in registration order.
#[derive(Clone, Default)]
pub struct PluginRegistry {
    pub appenders: Vec<Arc<dyn MetaInformationAppender>>,
    pub manipulators: Vec<Arc<dyn WorkflowManipulator>>,
    pub primitive_calculators: Vec<Arc<dyn PrimitiveFitnessCalculator>>,
    pub complex_calculators: Vec<Arc<dyn ComplexFitnessCalculator>>,
}

impl PluginRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_appender(mut self, appender: impl MetaInformationAppender + 'static) -> Self {
        self.appenders.push(Arc::new(appender));
        self
    }

    pub fn with_manipulator(mut self, manipulator: impl WorkflowManipulator + 'static) -> Self {
        self.manipulators.push(Arc::new(manipulator));
        self
    }

    pub fn with_primitive(mut self, calculator: impl PrimitiveFitnessCalculator + 'static) -> Self {
        self.primitive_calculators.push(Arc::new(calculator));
        self
    }

    pub fn with_complex(mut self, calculator: impl ComplexFitnessCalculator + 'static) -> Self {
        self.complex_calculators.push(Arc::new(calculator));
        self
    }

    pub fn objective_count(&self) -> usize {
        self.complex_calculators
            .iter()
            .map(|c| c.objective_specs().len())
            .sum::<usize>()
            + self.primitive_calculators.len()
    }
}

impl fmt::Debug for PluginRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PluginRegistry")
            .field("appenders", &self.appenders.iter().map(|a| a.name()).collect::<Vec<_>>())
            .field("manipulators", &self.manipulators.iter().map(|m| m.name()).collect::<Vec<_>>())
            .field(
                "primitive_calculators",
                &self
                    .primitive_calculators
                    .iter()
                    .map(|c| c.objective_spec().name)
                    .collect::<Vec<_>>(),
            )
            .field(
                "complex_calculators",
                &self.complex_calculators.iter().map(|c| c.name()).collect::<Vec<_>>(),
            )
            .finish()
    }
}
