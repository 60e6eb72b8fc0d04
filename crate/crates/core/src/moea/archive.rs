use std::collections::HashSet;
use std::sync::Arc;

use super::dominance::dominates;
use crate::problem::{Genotype, GenotypeKey, ObjectiveVector};
use crate::workflow::Workflow;

#[derive(Debug, Clone)]
pub struct ArchiveEntry {
    pub genotype: Genotype,
    /// Minimization form, as produced by [`crate::problem::AssembledProblem::evaluate`].
    pub objectives: ObjectiveVector,
    pub workflow: Arc<Workflow>,
}

/// Unbounded external archive of feasible non-dominated solutions.
///
/// Entries are unique by genotype. Distinct genotypes with equal objective
/// vectors are all kept.
#[derive(Debug, Clone, Default)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
    keys: HashSet<GenotypeKey>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the entry unless it is infeasible, already present or dominated.
    /// Entries it dominates are evicted. Returns whether it was added.
    pub fn insert(&mut self, entry: ArchiveEntry) -> bool {
        if !entry.objectives.feasible {
            return false;
        }
        let key = entry.genotype.key();
        if self.keys.contains(&key) {
            return false;
        }
        let values = &entry.objectives.values;
        if self.entries.iter().any(|e| dominates(&e.objectives.values, values)) {
            return false;
        }
        let keys = &mut self.keys;
        self.entries.retain(|e| {
            let keep = !dominates(values, &e.objectives.values);
            if !keep {
                keys.remove(&e.genotype.key());
            }
            keep
        });
        self.keys.insert(key);
        self.entries.push(entry);
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in insertion order.
    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    /// Entries ordered by objective vector, then genotype. Stable across runs.
    pub fn sorted_entries(&self) -> Vec<&ArchiveEntry> {
        let mut out: Vec<&ArchiveEntry> = self.entries.iter().collect();
        out.sort_by(|a, b| {
            lexicographic(&a.objectives.values, &b.objectives.values).then_with(|| a.genotype.key().cmp(&b.genotype.key()))
        });
        out
    }

    /// Distinct objective vectors, sorted.
    pub fn objective_set(&self) -> Vec<Vec<f64>> {
        let mut set: Vec<Vec<f64>> = self.entries.iter().map(|e| e.objectives.values.clone()).collect();
        set.sort_by(|a, b| lexicographic(a, b));
        set.dedup();
        set
    }

    /// True iff no entry dominates another.
    pub fn is_mutually_nondominated(&self) -> bool {
        self.entries.iter().all(|a| {
            self.entries
                .iter()
                .all(|b| !dominates(&a.objectives.values, &b.objectives.values))
        })
    }
}

pub(crate) fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}
