//! On-disk run artifacts.
//!
//! A run directory holds `front.json`, `stats.jsonl`, one `solution_<k>.xml`
//! per archived solution and a `config.json` snapshot. Directories are
//! assembled under a hidden temporary name and renamed into place once
//! complete, so readers never observe a partial run.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use adaptopt_core::moea::{GenerationStats, ParetoArchive};
use adaptopt_core::problem::{AssembledProblem, Genotype, SubValue};
use adaptopt_core::workflow::serialize_workflow;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const FRONT_FILE: &str = "front.json";
pub const ORACLE_FRONT_FILE: &str = "oracle_front.json";
pub const STATS_FILE: &str = "stats.jsonl";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveInfo {
    pub name: String,
    /// `"min"` or `"max"`.
    pub direction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub index: usize,
    /// One value per sub-encoding, keyed by its name. Binary vectors are bit
    /// strings (`"101"`), real vectors and permutations are arrays.
    pub genotype: BTreeMap<String, Value>,
    /// Natural direction (maximized objectives are not negated).
    pub objectives: Vec<f64>,
    pub workflow_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontDocument {
    pub run_id: String,
    pub objectives: Vec<ObjectiveInfo>,
    pub solutions: Vec<SolutionRecord>,
}

impl FrontDocument {
    pub fn read(path: &Path) -> Result<FrontDocument, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Artifact(format!("{}: {e}", path.display())))
    }

    pub fn solution(&self, index: usize) -> Option<&SolutionRecord> {
        self.solutions.iter().find(|s| s.index == index)
    }
}

pub fn genotype_json(problem: &AssembledProblem, genotype: &Genotype) -> BTreeMap<String, Value> {
    problem
        .encoding
        .parts()
        .iter()
        .zip(genotype.parts())
        .map(|(spec, value)| {
            let v = match value {
                SubValue::Binary(bits) => Value::String(bits.iter().map(|&b| if b { '1' } else { '0' }).collect()),
                SubValue::Real(xs) => Value::from(xs.clone()),
                SubValue::Permutation(p) => Value::from(p.clone()),
            };
            (spec.name.clone(), v)
        })
        .collect()
}

/// Files making up one front: the document plus the workflow XML of every solution.
pub struct RenderedFront {
    pub document: FrontDocument,
    pub workflows: Vec<(String, String)>,
}

/// Orders the archive deterministically and renders every entry.
pub fn render_front(problem: &AssembledProblem, archive: &ParetoArchive, run_id: &str, file_prefix: &str) -> RenderedFront {
    let mut solutions = Vec::with_capacity(archive.len());
    let mut workflows = Vec::with_capacity(archive.len());
    for (index, entry) in archive.sorted_entries().into_iter().enumerate() {
        let workflow_file = format!("{file_prefix}solution_{index}.xml");
        workflows.push((workflow_file.clone(), serialize_workflow(&entry.workflow)));
        solutions.push(SolutionRecord {
            index,
            genotype: genotype_json(problem, &entry.genotype),
            objectives: problem.report(&entry.objectives),
            workflow_file,
        });
    }
    RenderedFront {
        document: FrontDocument {
            run_id: run_id.to_owned(),
            objectives: problem
                .objectives
                .iter()
                .map(|o| ObjectiveInfo {
                    name: o.name.clone(),
                    direction: o.direction().to_owned(),
                })
                .collect(),
            solutions,
        },
        workflows,
    }
}

pub fn stats_jsonl(stats: &[GenerationStats]) -> String {
    let mut out = String::new();
    for s in stats {
        out.push_str(&serde_json::to_string(s).expect("stats serialize"));
        out.push('\n');
    }
    out
}

pub fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
    text.push('\n');
    text
}

/// Writes `files` into `<output_dir>/<run_id>` atomically. Fails if the run directory already exists.
pub fn publish(output_dir: &Path, run_id: &str, files: &[(String, String)]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(output_dir).map_err(|e| CliError::io(output_dir, e))?;
    let target = output_dir.join(run_id);
    if target.exists() {
        return Err(CliError::Artifact(format!("run directory '{}' already exists", target.display())));
    }
    let staging = output_dir.join(format!(".tmp-{run_id}-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging).map_err(|e| CliError::io(&staging, e))?;
    }
    fs::create_dir(&staging).map_err(|e| CliError::io(&staging, e))?;
    let written = files.iter().try_for_each(|(name, body)| {
        let p = staging.join(name);
        fs::write(&p, body).map_err(|e| CliError::io(&p, e))
    });
    if let Err(e) = written {
        let _ = fs::remove_dir_all(&staging);
        return Err(e);
    }
    fs::rename(&staging, &target).map_err(|e| {
        let _ = fs::remove_dir_all(&staging);
        CliError::io(&target, e)
    })?;
    Ok(target)
}
