use std::collections::HashMap;

use thiserror::Error;

use super::encoding::{validate_genotype, Genotype, GenotypeViolation, MultiEncodingSpec};
use super::plugin::{ObjectiveSpec, PluginError, PluginRegistry};
use crate::workflow::{enumerate_actions, ActionIndexMap, Workflow, WorkflowError};

/// Objective values in minimization form plus feasibility.
///
/// Maximized objectives are stored negated; use
/// [`AssembledProblem::report`] to recover their natural sign. Infeasible
/// vectors carry `+inf` in every slot (reported as `+inf` for minimized and
/// `-inf` for maximized objectives).
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector {
    pub values: Vec<f64>,
    pub feasible: bool,
    /// Number of calculators whose precondition failed; 0 when feasible.
    pub failed_preconditions: usize,
}

impl ObjectiveVector {
    pub fn feasible(values: Vec<f64>) -> Self {
        ObjectiveVector {
            values,
            feasible: true,
            failed_preconditions: 0,
        }
    }

    pub fn infeasible(objectives: usize, failed_preconditions: usize) -> Self {
        ObjectiveVector {
            values: vec![f64::INFINITY; objectives],
            feasible: false,
            failed_preconditions,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("base workflow is invalid: {0}")]
    InvalidBase(WorkflowError),
    #[error("invalid plugin registry: {0}")]
    Registry(String),
    #[error("appender '{name}' failed: {source}")]
    Appender { name: String, source: PluginError },
    #[error("invalid multi-encoding: {0}")]
    Encoding(String),
    #[error("duplicate objective name '{0}'")]
    DuplicateObjective(String),
}

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("genotype does not match the encoding: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Encoding(Vec<GenotypeViolation>),
    #[error("manipulator '{name}' failed: {source}")]
    Manipulator { name: String, source: PluginError },
    #[error("calculator '{calculator}' failed: {source}")]
    Calculator { calculator: String, source: PluginError },
    #[error("calculator '{calculator}' returned {found} values, expected {expected}")]
    Arity {
        calculator: String,
        expected: usize,
        found: usize,
    },
}

/// A base workflow plus registered plugins, ready for evaluation.
#[derive(Debug, Clone)]
pub struct AssembledProblem {
    pub base_workflow: Workflow,
    pub index_map: ActionIndexMap,
    pub encoding: MultiEncodingSpec,
    pub objectives: Vec<ObjectiveSpec>,
    pub registry: PluginRegistry,
    /// Warnings about plugins that declare the same property key.
    pub lints: Vec<String>,
}

/// Builds the problem: enumerate actions, collect encodings, run appenders, fix objective order.
pub fn assemble(base: Workflow, registry: PluginRegistry) -> Result<AssembledProblem, AssemblyError> {
    base.validate().map_err(AssemblyError::InvalidBase)?;
    if registry.manipulators.is_empty() {
        return Err(AssemblyError::Registry("at least one manipulator is required".into()));
    }
    if registry.objective_count() < 2 {
        return Err(AssemblyError::Registry(format!(
            "at least two objectives are required, registry provides {}",
            registry.objective_count()
        )));
    }

    let index_map = enumerate_actions(&base);
    let encoding = MultiEncodingSpec::new(
        registry
            .manipulators
            .iter()
            .map(|m| m.encoding_spec(&index_map))
            .collect(),
    )
    .map_err(AssemblyError::Encoding)?;

    let mut workflow = base;
    for appender in &registry.appenders {
        let appended = appender.append(&workflow).map_err(|source| AssemblyError::Appender {
            name: appender.name().to_owned(),
            source,
        })?;
        appended.validate().map_err(|e| AssemblyError::Appender {
            name: appender.name().to_owned(),
            source: PluginError::Workflow(e),
        })?;
        workflow = appended;
    }

    let objectives: Vec<ObjectiveSpec> = registry
        .complex_calculators
        .iter()
        .flat_map(|c| c.objective_specs())
        .chain(registry.primitive_calculators.iter().map(|c| c.objective_spec()))
        .collect();
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = objectives.iter().find(|o| !seen.insert(o.name.as_str())) {
        return Err(AssemblyError::DuplicateObjective(dup.name.clone()));
    }

    let mut lints = overlap_lints(
        "appenders",
        registry.appenders.iter().map(|a| (a.name().to_owned(), a.property_keys())),
    );
    lints.extend(overlap_lints(
        "manipulators",
        registry.manipulators.iter().map(|m| (m.name().to_owned(), m.property_keys())),
    ));
    for lint in &lints {
        log::warn!("{lint}");
    }

    Ok(AssembledProblem {
        base_workflow: workflow,
        index_map,
        encoding,
        objectives,
        registry,
        lints,
    })
}

fn overlap_lints(kind: &str, plugins: impl Iterator<Item = (String, Vec<String>)>) -> Vec<String> {
    let mut writers: Vec<(String, Vec<String>)> = Vec::new();
    for (name, keys) in plugins {
        for key in keys {
            match writers.iter_mut().find(|(k, _)| *k == key) {
                Some((_, names)) => names.push(name.clone()),
                None => writers.push((key, vec![name.clone()])),
            }
        }
    }
    writers
        .into_iter()
        .filter(|(_, names)| names.len() > 1)
        .map(|(key, names)| {
            format!(
                "{kind} {} all write property '{key}'; the last registered wins",
                names.join(", ")
            )
        })
        .collect()
}

impl AssembledProblem {
    pub fn objective_count(&self) -> usize {
        self.objectives.len()
    }

    /// Applies every manipulator, in registration order, to a private copy of the base workflow.
    pub fn decode(&self, genotype: &Genotype) -> Result<Workflow, EvaluationError> {
        validate_genotype(&self.encoding, genotype).map_err(EvaluationError::Encoding)?;
        let mut workflow = self.base_workflow.clone();
        for (manipulator, value) in self.registry.manipulators.iter().zip(genotype.parts()) {
            manipulator
                .manipulate(&mut workflow, &self.index_map, value)
                .map_err(|source| EvaluationError::Manipulator {
                    name: manipulator.name().to_owned(),
                    source,
                })?;
        }
        Ok(workflow)
    }

    pub fn evaluate(&self, genotype: &Genotype) -> Result<ObjectiveVector, EvaluationError> {
        let workflow = self.decode(genotype)?;
        self.evaluate_workflow(&workflow)
    }

    /// Runs the calculators on an already manipulated workflow.
    pub fn evaluate_workflow(&self, workflow: &Workflow) -> Result<ObjectiveVector, EvaluationError> {
        let registry = &self.registry;
        let failed = registry
            .complex_calculators
            .iter()
            .filter(|c| !c.check_precondition(workflow))
            .count()
            + registry
                .primitive_calculators
                .iter()
                .filter(|c| !c.check_precondition(workflow))
                .count();
        if failed > 0 {
            return Ok(ObjectiveVector::infeasible(self.objectives.len(), failed));
        }

        let mut values = Vec::with_capacity(self.objectives.len());
        for calculator in &registry.complex_calculators {
            let out = calculator
                .calculate(workflow, &self.index_map)
                .map_err(|source| EvaluationError::Calculator {
                    calculator: calculator.name().to_owned(),
                    source,
                })?;
            let expected = calculator.objective_specs().len();
            if out.len() != expected {
                return Err(EvaluationError::Arity {
                    calculator: calculator.name().to_owned(),
                    expected,
                    found: out.len(),
                });
            }
            values.extend(out);
        }
        for calculator in &registry.primitive_calculators {
            let value = calculator
                .calculate(workflow, &self.index_map)
                .map_err(|source| EvaluationError::Calculator {
                    calculator: calculator.objective_spec().name,
                    source,
                })?;
            values.push(value);
        }
        for (v, spec) in values.iter_mut().zip(&self.objectives) {
            if spec.is_maximization {
                *v = -*v;
            }
        }
        Ok(ObjectiveVector::feasible(values))
    }

    /// Objective values in their natural direction.
    pub fn report(&self, objectives: &ObjectiveVector) -> Vec<f64> {
        objectives
            .values
            .iter()
            .zip(&self.objectives)
            .map(|(&v, spec)| if spec.is_maximization { -v } else { v })
            .collect()
    }

    /// Index of each objective by name.
    pub fn objective_index(&self) -> HashMap<&str, usize> {
        self.objectives
            .iter()
            .enumerate()
            .map(|(i, o)| (o.name.as_str(), i))
            .collect()
    }
}
