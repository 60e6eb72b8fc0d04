//! Python bindings: workflows, the task-allocation problem, the optimizers
//! and the Pareto utilities.

use adaptopt_core::cobot::reference::{w3_table, w3_workflow};
use adaptopt_core::cobot::{build_cobot_problem, line_workflow, InstanceTable};
use adaptopt_core::moea::{self, AlgorithmConfig, ParetoArchive};
use adaptopt_core::problem::{AssembledProblem, Genotype, ObjectiveVector, SubValue};
use adaptopt_core::workflow::{self, parse_workflow, serialize_workflow, Property, PropertyValue};
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBool;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[derive(IntoPyObject)]
enum Scalar {
    Str(String),
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl From<&PropertyValue> for Scalar {
    fn from(v: &PropertyValue) -> Self {
        match v {
            PropertyValue::String(s) => Scalar::Str(s.clone()),
            PropertyValue::Int(i) => Scalar::Int(*i),
            PropertyValue::Real(r) => Scalar::Real(*r),
            PropertyValue::Bool(b) => Scalar::Bool(*b),
        }
    }
}

fn to_property_value(value: &Bound<'_, PyAny>) -> PyResult<PropertyValue> {
    if value.is_instance_of::<PyBool>() {
        return Ok(PropertyValue::Bool(value.extract()?));
    }
    if let Ok(i) = value.extract::<i64>() {
        return Ok(PropertyValue::Int(i));
    }
    if let Ok(r) = value.extract::<f64>() {
        return Ok(PropertyValue::Real(r));
    }
    if let Ok(s) = value.extract::<String>() {
        return Ok(PropertyValue::String(s));
    }
    Err(PyTypeError::new_err("property values must be str, int, float or bool"))
}

/// An immutable workflow. Mutating operations return a new object.
#[pyclass(frozen, skip_from_py_object, name = "Workflow", module = "adaptopt")]
#[derive(Clone)]
struct PyWorkflow {
    inner: workflow::Workflow,
}

#[pymethods]
impl PyWorkflow {
    /// Parses and validates XML text.
    #[staticmethod]
    fn from_xml(text: &str) -> PyResult<Self> {
        parse_workflow(text).map(|inner| PyWorkflow { inner }).map_err(value_error)
    }

    /// A serial line of actions `a1..an` covering the rows of a CSV instance table.
    #[staticmethod]
    fn line(name: &str, table_csv: &str) -> PyResult<Self> {
        let table = InstanceTable::from_csv_str(table_csv).map_err(value_error)?;
        Ok(PyWorkflow {
            inner: line_workflow(name, &table),
        })
    }

    /// Canonical XML.
    fn to_xml(&self) -> String {
        serialize_workflow(&self.inner)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    /// Every action id in enumeration (pre-)order.
    fn action_ids(&self) -> Vec<String> {
        self.inner.actions.iter().map(|a| a.id.clone()).collect()
    }

    fn leaf_action_ids(&self) -> Vec<String> {
        self.inner.leaf_actions().map(|a| a.id.clone()).collect()
    }

    /// Actions and decisions in a successor-respecting order.
    fn execution_order(&self) -> PyResult<Vec<String>> {
        self.inner.execution_order().map_err(value_error)
    }

    /// Invariant violations as messages; empty when valid.
    fn violations(&self) -> Vec<String> {
        self.inner.violations().iter().map(ToString::to_string).collect()
    }

    fn get_property(&self, element_id: &str, key: &str) -> PyResult<Option<Scalar>> {
        let p = self.inner.get_property(element_id, key).map_err(value_error)?;
        Ok(p.map(|p| Scalar::from(&p.value)))
    }

    /// Returns a copy with the property inserted or replaced.
    fn set_property(&self, element_id: &str, key: &str, value: &Bound<'_, PyAny>) -> PyResult<Self> {
        let property = Property::new(key, to_property_value(value)?).map_err(value_error)?;
        let inner = self.inner.set_property(element_id, property).map_err(value_error)?;
        Ok(PyWorkflow { inner })
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Workflow(name={:?}, actions={}, assets={}, decisions={}, relationships={})",
            self.inner.name,
            self.inner.actions.len(),
            self.inner.assets.len(),
            self.inner.decisions.len(),
            self.inner.relationships.len()
        )
    }
}

/// Human/cobot allocation problem over a workflow and an instance table.
#[pyclass(frozen, name = "CobotProblem", module = "adaptopt")]
struct PyCobotProblem {
    inner: AssembledProblem,
}

fn parse_bits(problem: &AssembledProblem, bits: &str) -> PyResult<Genotype> {
    let genotype = Genotype::from_bit_str(bits).ok_or_else(|| PyValueError::new_err("genotype must consist of '0' and '1'"))?;
    adaptopt_core::problem::validate_genotype(&problem.encoding, &genotype).map_err(|v| {
        PyValueError::new_err(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
    })?;
    Ok(genotype)
}

fn bits_of(genotype: &Genotype) -> String {
    genotype
        .parts()
        .iter()
        .map(|p| match p {
            SubValue::Binary(bits) => bits.iter().map(|&b| if b { '1' } else { '0' }).collect(),
            other => format!("{other:?}"),
        })
        .collect()
}

type FrontRows = Vec<(String, Vec<f64>)>;

fn front_rows(problem: &AssembledProblem, archive: &ParetoArchive) -> FrontRows {
    archive
        .sorted_entries()
        .into_iter()
        .map(|e| (bits_of(&e.genotype), problem.report(&e.objectives)))
        .collect()
}

#[pymethods]
impl PyCobotProblem {
    #[new]
    fn new(workflow: &PyWorkflow, table_csv: &str) -> PyResult<Self> {
        let table = InstanceTable::from_csv_str(table_csv).map_err(value_error)?;
        let inner = build_cobot_problem(workflow.inner.clone(), &table).map_err(value_error)?;
        Ok(PyCobotProblem { inner })
    }

    /// The three-action reference instance.
    #[staticmethod]
    fn w3() -> PyResult<Self> {
        let inner = build_cobot_problem(w3_workflow(), &w3_table()).map_err(value_error)?;
        Ok(PyCobotProblem { inner })
    }

    /// `(name, "min" | "max")` per objective.
    #[getter]
    fn objectives(&self) -> Vec<(String, String)> {
        self.inner
            .objectives
            .iter()
            .map(|o| (o.name.clone(), o.direction().to_owned()))
            .collect()
    }

    #[getter]
    fn genotype_length(&self) -> usize {
        self.inner.encoding.total_length()
    }

    #[getter]
    fn base_workflow(&self) -> PyWorkflow {
        PyWorkflow {
            inner: self.inner.base_workflow.clone(),
        }
    }

    /// Workflow after applying the bit string (bit i = i-th enumerated action on the cobot).
    fn decode(&self, bits: &str) -> PyResult<PyWorkflow> {
        let genotype = parse_bits(&self.inner, bits)?;
        let inner = self.inner.decode(&genotype).map_err(value_error)?;
        Ok(PyWorkflow { inner })
    }

    /// Objective values in their natural direction, or None when a precondition fails.
    fn evaluate(&self, bits: &str) -> PyResult<Option<Vec<f64>>> {
        let genotype = parse_bits(&self.inner, bits)?;
        let v: ObjectiveVector = self.inner.evaluate(&genotype).map_err(value_error)?;
        Ok(v.feasible.then(|| self.inner.report(&v)))
    }

    /// Objectives of an already manipulated workflow.
    fn evaluate_workflow(&self, workflow: &PyWorkflow) -> PyResult<Option<Vec<f64>>> {
        let v = self.inner.evaluate_workflow(&workflow.inner).map_err(value_error)?;
        Ok(v.feasible.then(|| self.inner.report(&v)))
    }
}

/// Runs NSGA-II or NSGA-III and returns `(front, stats)`.
///
/// `front` is a list of `(bits, objectives)`; `stats` a list of
/// `(generation, evaluations, archive_size, hypervolume | None)`.
#[pyfunction]
#[pyo3(signature = (problem, algorithm = "nsga2", population_size = 20, generations = 30, seed = 0, reference_divisions = 4))]
#[allow(clippy::type_complexity)]
fn optimize(
    py: Python<'_>,
    problem: &PyCobotProblem,
    algorithm: &str,
    population_size: usize,
    generations: usize,
    seed: u64,
    reference_divisions: usize,
) -> PyResult<(FrontRows, Vec<(usize, usize, usize, Option<f64>)>)> {
    let mut cfg = match algorithm {
        "nsga2" => AlgorithmConfig::nsga2(population_size, generations, seed),
        "nsga3" => AlgorithmConfig::nsga3(population_size, generations, seed, reference_divisions),
        other => return Err(PyValueError::new_err(format!("unknown algorithm '{other}'"))),
    };
    cfg.reference_divisions = reference_divisions;
    let result = py
        .detach(|| moea::run(&problem.inner, &cfg, &mut |_| {}))
        .map_err(value_error)?;
    let stats = result
        .stats
        .iter()
        .map(|s| (s.generation, s.evaluations, s.archive_size, s.hypervolume))
        .collect();
    Ok((front_rows(&problem.inner, &result.archive), stats))
}

/// Exact front by enumerating every genotype (at most 24 bits).
#[pyfunction]
fn brute_force(py: Python<'_>, problem: &PyCobotProblem) -> PyResult<FrontRows> {
    let archive = py.detach(|| moea::brute_force_front(&problem.inner)).map_err(value_error)?;
    Ok(front_rows(&problem.inner, &archive))
}

/// Pareto dominance for minimization.
#[pyfunction]
fn dominates(a: Vec<f64>, b: Vec<f64>) -> PyResult<bool> {
    if a.len() != b.len() {
        return Err(PyValueError::new_err("vectors differ in length"));
    }
    Ok(moea::dominates(&a, &b))
}

/// Fronts of indices, best first (all points feasible, minimization).
#[pyfunction]
fn non_dominated_sort(points: Vec<Vec<f64>>) -> PyResult<Vec<Vec<usize>>> {
    if points.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(PyValueError::new_err("points differ in length"));
    }
    let pop: Vec<ObjectiveVector> = points.into_iter().map(ObjectiveVector::feasible).collect();
    Ok(moea::fast_non_dominated_sort(&pop))
}

#[pyfunction]
fn crowding_distance(front: Vec<Vec<f64>>) -> Vec<f64> {
    moea::crowding_distance(&front)
}

#[pyfunction]
fn das_dennis(num_objectives: usize, divisions: usize) -> Vec<Vec<f64>> {
    moea::das_dennis_points(num_objectives, divisions)
}

/// Area dominated by a 2-objective front up to `reference` (minimization).
#[pyfunction]
fn hypervolume_2d(front: Vec<Vec<f64>>, reference: Vec<f64>) -> PyResult<f64> {
    moea::hypervolume_2d(&front, &reference).map_err(value_error)
}

#[pymodule]
fn adaptopt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWorkflow>()?;
    m.add_class::<PyCobotProblem>()?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(non_dominated_sort, m)?)?;
    m.add_function(wrap_pyfunction!(crowding_distance, m)?)?;
    m.add_function(wrap_pyfunction!(das_dennis, m)?)?;
    m.add_function(wrap_pyfunction!(hypervolume_2d, m)?)?;
    Ok(())
}
