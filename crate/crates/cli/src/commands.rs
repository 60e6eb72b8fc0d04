use std::path::{Path, PathBuf};

use adaptopt_core::cobot::{build_cobot_problem, InstanceTable};
use adaptopt_core::moea::{brute_force_front, run, GenerationStats};
use adaptopt_core::problem::AssembledProblem;
use adaptopt_core::workflow::{parse_workflow, Workflow, WorkflowError};

use crate::artifact::{self, pretty_json, render_front, stats_jsonl, CONFIG_FILE, FRONT_FILE, ORACLE_FRONT_FILE, STATS_FILE};
use crate::config::RunConfig;
use crate::CliError;

/// Outcome of `validate`: the workflow is valid iff `problems` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub path: PathBuf,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }

    pub fn render(&self) -> String {
        if self.is_valid() {
            return format!("{}: valid\n", self.path.display());
        }
        let mut out = format!("{}: {} problem(s)\n", self.path.display(), self.problems.len());
        for p in &self.problems {
            out.push_str(&format!("  - {p}\n"));
        }
        out
    }
}

/// Parses and checks a workflow file. Only I/O failures are errors; parse
/// and invariant failures are reported.
pub fn validate(path: &Path) -> Result<ValidationReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let problems = match parse_workflow(&text) {
        Ok(w) => w.violations().iter().map(ToString::to_string).collect(),
        Err(WorkflowError::Validation(v)) => v.iter().map(ToString::to_string).collect(),
        Err(e) => vec![e.to_string()],
    };
    Ok(ValidationReport {
        path: path.to_owned(),
        problems,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub run_id: String,
    pub directory: PathBuf,
    pub solutions: usize,
}

fn load_workflow(path: &Path) -> Result<Workflow, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let workflow = parse_workflow(&text).map_err(|source| CliError::InvalidWorkflow {
        path: path.to_owned(),
        source,
    })?;
    workflow.validate().map_err(|source| CliError::InvalidWorkflow {
        path: path.to_owned(),
        source,
    })?;
    Ok(workflow)
}

/// Loads the inputs named by `cfg` and assembles the task-allocation problem.
pub fn load_problem(cfg: &RunConfig) -> Result<AssembledProblem, CliError> {
    let workflow = load_workflow(&cfg.workflow_path)?;
    let table = InstanceTable::from_path(&cfg.instance_table_path)?;
    Ok(build_cobot_problem(workflow, &table)?)
}

/// Runs the configured algorithm and publishes the run directory.
pub fn optimize(config_path: &Path) -> Result<RunSummary, CliError> {
    let mut cfg = RunConfig::load(config_path)?;
    let problem = load_problem(&cfg)?;
    let run_id = cfg.resolve_run_id();
    cfg.run_id = Some(run_id.clone());

    let mut observer = |s: &GenerationStats| {
        log::debug!(
            "generation {} evaluations {} archive {} hv {:?}",
            s.generation,
            s.evaluations,
            s.archive_size,
            s.hypervolume
        )
    };
    let result = run(&problem, &cfg.algorithm, &mut observer)?;
    let rendered = render_front(&problem, &result.archive, &run_id, "");
    let solutions = rendered.document.solutions.len();

    let mut files = vec![
        (FRONT_FILE.to_owned(), pretty_json(&rendered.document)),
        (STATS_FILE.to_owned(), stats_jsonl(&result.stats)),
        (CONFIG_FILE.to_owned(), pretty_json(&cfg)),
    ];
    files.extend(rendered.workflows);
    let directory = artifact::publish(&cfg.output_dir, &run_id, &files)?;
    Ok(RunSummary {
        run_id,
        directory,
        solutions,
    })
}

/// Enumerates the exact front and publishes it as `<run_id>-oracle`.
pub fn oracle(config_path: &Path) -> Result<RunSummary, CliError> {
    let mut cfg = RunConfig::load(config_path)?;
    let problem = load_problem(&cfg)?;
    let run_id = format!("{}-oracle", cfg.resolve_run_id());
    cfg.run_id = Some(run_id.clone());

    let archive = brute_force_front(&problem)?;
    let rendered = render_front(&problem, &archive, &run_id, "oracle_");
    let solutions = rendered.document.solutions.len();
    let mut files = vec![
        (ORACLE_FRONT_FILE.to_owned(), pretty_json(&rendered.document)),
        (CONFIG_FILE.to_owned(), pretty_json(&cfg)),
    ];
    files.extend(rendered.workflows);
    let directory = artifact::publish(&cfg.output_dir, &run_id, &files)?;
    Ok(RunSummary {
        run_id,
        directory,
        solutions,
    })
}
