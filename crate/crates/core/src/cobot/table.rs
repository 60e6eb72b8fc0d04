use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read instance table: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed instance table: {0}")]
    Csv(#[from] csv::Error),
    #[error("instance table row {row} ('{action_id}'): {message}")]
    Row {
        row: usize,
        action_id: String,
        message: String,
    },
}

/// Measured metrics of one action: MTM durations and the MURI ordinal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRow {
    pub action_id: String,
    pub human_time_s: f64,
    pub cobot_time_s: f64,
    pub ergonomic_penalty: i64,
}

impl InstanceRow {
    pub fn new(action_id: impl Into<String>, human_time_s: f64, cobot_time_s: f64, ergonomic_penalty: i64) -> Self {
        InstanceRow {
            action_id: action_id.into(),
            human_time_s,
            cobot_time_s,
            ergonomic_penalty,
        }
    }

    fn check(&self) -> Result<(), String> {
        for (what, t) in [("human_time_s", self.human_time_s), ("cobot_time_s", self.cobot_time_s)] {
            if !t.is_finite() || t < 0.0 {
                return Err(format!("{what} must be a finite non-negative number, got {t}"));
            }
        }
        if !(1..=3).contains(&self.ergonomic_penalty) {
            return Err(format!(
                "ergonomic_penalty must be 1, 2 or 3, got {}",
                self.ergonomic_penalty
            ));
        }
        Ok(())
    }
}

/// Per-action metrics for a workflow, one row per leaf action.
///
/// Row values are checked on load; coverage of the target workflow and id
/// uniqueness are checked when the appenders run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InstanceTable {
    pub rows: Vec<InstanceRow>,
}

pub const CSV_HEADER: &str = "action_id,human_time_s,cobot_time_s,ergonomic_penalty";

impl InstanceTable {
    pub fn new(rows: Vec<InstanceRow>) -> Result<Self, TableError> {
        for (i, row) in rows.iter().enumerate() {
            row.check().map_err(|message| TableError::Row {
                row: i + 1,
                action_id: row.action_id.clone(),
                message,
            })?;
        }
        Ok(InstanceTable { rows })
    }

    pub fn from_csv_reader(reader: impl Read) -> Result<Self, TableError> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = csv.headers()?.iter().map(str::to_owned).collect();
        if header.join(",") != CSV_HEADER {
            return Err(TableError::Row {
                row: 0,
                action_id: String::new(),
                message: format!("expected header '{CSV_HEADER}', found '{}'", header.join(",")),
            });
        }
        let rows = csv.deserialize().collect::<Result<Vec<InstanceRow>, _>>()?;
        Self::new(rows)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, TableError> {
        Self::from_csv_reader(text.as_bytes())
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, TableError> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.action_id, r.human_time_s, r.cobot_time_s, r.ergonomic_penalty
            ));
        }
        out
    }

    pub fn row(&self, action_id: &str) -> Option<&InstanceRow> {
        self.rows.iter().find(|r| r.action_id == action_id)
    }

    /// Ids that occur more than once, in first-occurrence order.
    pub fn duplicate_ids(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut dups = Vec::new();
        for r in &self.rows {
            if !seen.insert(r.action_id.as_str()) && !dups.contains(&r.action_id.as_str()) {
                dups.push(r.action_id.as_str());
            }
        }
        dups
    }
}
