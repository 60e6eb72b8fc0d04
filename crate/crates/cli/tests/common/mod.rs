#![allow(dead_code)]

use std::path::{Path, PathBuf};

use adaptopt_core::cobot::reference::{w3_table, w3_workflow};
use adaptopt_core::cobot::{line_workflow, InstanceTable};
use adaptopt_core::workflow::serialize_workflow;

pub const W3_FRONT: [[f64; 2]; 4] = [[45.0, 6.0], [60.0, 3.0], [75.0, 1.0], [95.0, 0.0]];

/// Writes workflow, table and a config into `dir` and returns the config path.
pub fn write_instance(dir: &Path, workflow_xml: &str, table: &InstanceTable, algorithm_section: &str) -> PathBuf {
    std::fs::write(dir.join("wf.xml"), workflow_xml).unwrap();
    std::fs::write(dir.join("table.csv"), table.to_csv()).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "workflow_path = \"wf.xml\"\ninstance_table_path = \"table.csv\"\noutput_dir = \"runs\"\n\n[algorithm]\n{algorithm_section}\n"
        ),
    )
    .unwrap();
    cfg
}

pub fn write_w3(dir: &Path, algorithm_section: &str) -> PathBuf {
    write_instance(dir, &serialize_workflow(&w3_workflow()), &w3_table(), algorithm_section)
}

pub fn write_table_instance(dir: &Path, table: &InstanceTable, algorithm_section: &str) -> PathBuf {
    write_instance(dir, &serialize_workflow(&line_workflow("line", table)), table, algorithm_section)
}

/// Adds `run_id = ...` to an existing config.
pub fn pin_run_id(cfg: &Path, run_id: &str) {
    let text = std::fs::read_to_string(cfg).unwrap();
    std::fs::write(cfg, format!("run_id = \"{run_id}\"\n{text}")).unwrap();
}

pub const NSGA2_W3: &str = "algorithm = \"nsga2\"\npopulation_size = 20\ngenerations = 30\nseed = 7";
pub const NSGA3_W3: &str =
    "algorithm = \"nsga3\"\npopulation_size = 20\ngenerations = 30\nseed = 7\nreference_divisions = 6";
