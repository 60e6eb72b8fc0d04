//! Multi-objective optimization of workflow-based assembly tasks.
//!
//! The crate is organised in four layers:
//!
//! * [`workflow`]: the workflow meta-model (actions, assets, decisions,
//!   relationships, properties) and its XML format.
//! * [`problem`]: plugin contracts and the problem bundle that turns a base
//!   workflow into an evaluable multi-objective problem over a multi-encoding.
//! * [`moea`]: NSGA-II / NSGA-III, Pareto utilities, hypervolume and an
//!   exhaustive oracle for small binary problems.
//! * [`cobot`]: the human/cobot task-allocation use case.

pub mod workflow;
pub mod problem;
pub mod cobot;
pub mod moea;
