//! Workflow meta-model: actions, assets, decisions, typed relationships and
//! generic properties, plus the XML persistence format.

mod model;
mod random;
mod xml;

pub use model::{
    enumerate_actions, ActionIndexMap, ActionNode, AssetNode, Branch, DecisionNode, ElementKind, Property,
    PropertySet, PropertyValue, RelationKind, Relationship, ValueType, Violation, Workflow,
};
pub use random::random_workflow;
pub use xml::{parse_workflow, serialize_workflow};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WorkflowError {
    #[error("malformed XML at {line}:{column}: {message}")]
    Xml { line: u32, column: u32, message: String },
    #[error("schema error at {line}:{column}: {message}")]
    Schema { line: u32, column: u32, message: String },
    #[error("invalid workflow: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("unknown element id '{0}'")]
    UnknownElement(String),
    #[error("property '{key}': {message}")]
    PropertyType { key: String, message: String },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
