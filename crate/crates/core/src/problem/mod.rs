//! Plugin contracts and the problem bundle built from a base workflow.
//!
//! Assembly enumerates the base workflow's actions, collects one sub-encoding
//! per manipulator, then runs the meta-information appenders in registration
//! order. Evaluation decodes a genotype by running the manipulators on a
//! private copy and hands the result to the fitness calculators. Plugins that
//! touch the same property are applied strictly in registration order, so the
//! last writer wins.

mod assembled;
mod encoding;
mod plugin;

pub use assembled::{assemble, AssembledProblem, AssemblyError, EvaluationError, ObjectiveVector};
pub use encoding::{
    validate_genotype, EncodingKind, Genotype, GenotypeKey, GenotypeViolation, MultiEncodingSpec, SubEncodingSpec,
    SubValue,
};
pub use plugin::{
    ComplexFitnessCalculator, MetaInformationAppender, ObjectiveSpec, PluginError, PluginRegistry,
    PrimitiveFitnessCalculator, WorkflowManipulator,
};

#[cfg(test)]
mod tests;
