use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::archive::{ArchiveEntry, ParetoArchive};
use super::dominance::{crowded_cmp, crowding_distance, fast_non_dominated_sort, ranks};
use super::hypervolume::hypervolume_2d_clipped;
use super::nsga3;
use super::operators::{random_genotype, vary, VariationParams};
use super::reference_points::das_dennis_points;
use crate::problem::{AssembledProblem, EncodingKind, EvaluationError, Genotype, ObjectiveVector, SubValue};
use crate::workflow::Workflow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nsga2,
    Nsga3,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algorithm::Nsga2 => "nsga2",
            Algorithm::Nsga3 => "nsga3",
        })
    }
}

/// Per-gene mutation probability: a fixed value or `1/n` for each sub-encoding of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum MutationRate {
    #[default]
    InverseLength,
    Fixed(f64),
}

impl Serialize for MutationRate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MutationRate::InverseLength => s.serialize_str("1/n"),
            MutationRate::Fixed(r) => s.serialize_f64(*r),
        }
    }
}

impl<'de> Deserialize<'de> for MutationRate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Marker(String),
            Rate(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Rate(r) => Ok(MutationRate::Fixed(r)),
            Raw::Marker(s) if s == "1/n" => Ok(MutationRate::InverseLength),
            Raw::Marker(s) => Err(serde::de::Error::custom(format!(
                "mutation rate must be a number or \"1/n\", got \"{s}\""
            ))),
        }
    }
}

fn default_crossover_rate() -> f64 {
    0.9
}

fn default_divisions() -> usize {
    4
}

fn default_sbx_eta() -> f64 {
    15.0
}

fn default_pm_eta() -> f64 {
    20.0
}

fn default_parallel() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    pub generations: usize,
    pub seed: u64,
    #[serde(default = "default_crossover_rate")]
    pub crossover_rate: f64,
    #[serde(default)]
    pub mutation_rate: MutationRate,
    /// Das-Dennis divisions; NSGA-III only.
    #[serde(default = "default_divisions")]
    pub reference_divisions: usize,
    #[serde(default = "default_sbx_eta")]
    pub sbx_eta: f64,
    #[serde(default = "default_pm_eta")]
    pub pm_eta: f64,
    /// Reference point for the per-generation hypervolume of 2-objective runs,
    /// in natural objective directions. Derived from the initial population when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hv_reference: Option<Vec<f64>>,
    /// Evaluate offspring on the rayon pool. Results do not depend on it.
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

impl AlgorithmConfig {
    pub fn new(algorithm: Algorithm, population_size: usize, generations: usize, seed: u64) -> Self {
        AlgorithmConfig {
            algorithm,
            population_size,
            generations,
            seed,
            crossover_rate: default_crossover_rate(),
            mutation_rate: MutationRate::InverseLength,
            reference_divisions: default_divisions(),
            sbx_eta: default_sbx_eta(),
            pm_eta: default_pm_eta(),
            hv_reference: None,
            parallel: true,
        }
    }

    pub fn nsga2(population_size: usize, generations: usize, seed: u64) -> Self {
        Self::new(Algorithm::Nsga2, population_size, generations, seed)
    }

    pub fn nsga3(population_size: usize, generations: usize, seed: u64, divisions: usize) -> Self {
        AlgorithmConfig {
            reference_divisions: divisions,
            ..Self::new(Algorithm::Nsga3, population_size, generations, seed)
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::Config(m));
        if self.population_size < 2 || !self.population_size.is_multiple_of(2) {
            return bad(format!(
                "population_size must be an even number >= 2, got {}",
                self.population_size
            ));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover_rate must lie in [0, 1], got {}", self.crossover_rate));
        }
        if let MutationRate::Fixed(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("mutation_rate must lie in [0, 1], got {r}"));
            }
        }
        if self.reference_divisions == 0 {
            return bad("reference_divisions must be positive".into());
        }
        if !(self.sbx_eta >= 0.0 && self.pm_eta >= 0.0) {
            return bad("distribution indices must be non-negative".into());
        }
        Ok(())
    }

    fn variation(&self) -> VariationParams {
        VariationParams {
            crossover_rate: self.crossover_rate,
            mutation_rate: match self.mutation_rate {
                MutationRate::InverseLength => None,
                MutationRate::Fixed(r) => Some(r),
            },
            sbx_eta: self.sbx_eta,
            pm_eta: self.pm_eta,
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid algorithm configuration: {0}")]
    Config(String),
    #[error("generation {generation}, individual {individual}: {source}")]
    Evaluation {
        generation: usize,
        individual: usize,
        source: EvaluationError,
    },
    #[error("{0}")]
    Unsupported(String),
    #[error("generation {0}: normalization produced non-finite values")]
    Degenerate(usize),
}

#[derive(Debug, Clone)]
pub struct Individual {
    pub genotype: Genotype,
    pub objectives: ObjectiveVector,
    pub rank: usize,
    pub crowding: f64,
}

/// One line of the stats stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub evaluations: usize,
    pub archive_size: usize,
    /// Archive hypervolume; `None` unless the problem has exactly two objectives.
    pub hypervolume: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub archive: ParetoArchive,
    pub stats: Vec<GenerationStats>,
    pub population: Vec<Individual>,
    /// NSGA-III reference points; empty for NSGA-II.
    pub reference_points: Vec<Vec<f64>>,
    /// Hypervolume reference in minimization form, if one was in use.
    pub hv_reference: Option<Vec<f64>>,
    /// NSGA-III survival steps that used the max-per-objective intercept fallback.
    pub normalization_fallbacks: usize,
}

pub fn nsga2_run(problem: &AssembledProblem, cfg: &AlgorithmConfig) -> Result<RunResult, EngineError> {
    if cfg.algorithm != Algorithm::Nsga2 {
        return Err(EngineError::Config("nsga2_run needs algorithm = nsga2".into()));
    }
    run(problem, cfg, &mut |_| {})
}

pub fn nsga3_run(problem: &AssembledProblem, cfg: &AlgorithmConfig) -> Result<RunResult, EngineError> {
    if cfg.algorithm != Algorithm::Nsga3 {
        return Err(EngineError::Config("nsga3_run needs algorithm = nsga3".into()));
    }
    run(problem, cfg, &mut |_| {})
}

/// Runs the configured algorithm, calling `observer` after every generation
/// (generation 0 is the initial population).
///
/// All randomness comes from one ChaCha8 stream seeded with `cfg.seed`,
/// consumed in this order: initial genotypes (individual by individual,
/// sub-encoding by sub-encoding); then per generation, for each offspring
/// pair, two tournaments, the crossover decision, the crossover and the
/// mutation of both children; finally NSGA-III niching ties.
pub fn run(
    problem: &AssembledProblem,
    cfg: &AlgorithmConfig,
    observer: &mut dyn FnMut(&GenerationStats),
) -> Result<RunResult, EngineError> {
    cfg.validate()?;
    let m = problem.objective_count();
    let n = cfg.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let references = match cfg.algorithm {
        Algorithm::Nsga2 => Vec::new(),
        Algorithm::Nsga3 => {
            let refs = das_dennis_points(m, cfg.reference_divisions);
            if refs.len() > n {
                log::warn!(
                    "population size {n} is smaller than the {} reference points ({m} objectives, {} divisions)",
                    refs.len(),
                    cfg.reference_divisions
                );
            }
            refs
        }
    };
    let params = cfg.variation();

    let genotypes: Vec<Genotype> = (0..n).map(|_| random_genotype(&problem.encoding, &mut rng)).collect();
    let evaluated = evaluate_all(problem, genotypes, 0, cfg.parallel)?;
    let mut evaluations = evaluated.len();
    let mut archive = ParetoArchive::new();
    let mut population = admit(&mut archive, evaluated);

    let hv_reference = if m == 2 {
        match &cfg.hv_reference {
            Some(r) => Some(to_minimization(problem, r)?),
            None => derive_reference(&population),
        }
    } else {
        None
    };
    let mut stats = Vec::with_capacity(cfg.generations + 1);
    let mut record = |generation: usize, evaluations: usize, archive: &ParetoArchive| {
        let s = GenerationStats {
            generation,
            evaluations,
            archive_size: archive.len(),
            hypervolume: hv_reference.as_ref().map(|r| {
                let pts: Vec<&[f64]> = archive.entries().iter().map(|e| e.objectives.values.as_slice()).collect();
                hypervolume_2d_clipped(&pts, r)
            }),
        };
        observer(&s);
        stats.push(s);
    };
    record(0, evaluations, &archive);
    assign_rank_and_crowding(&mut population, cfg.algorithm);

    let mut fallbacks = 0;
    for generation in 1..=cfg.generations {
        let mut offspring = Vec::with_capacity(n);
        while offspring.len() < n {
            let a = tournament(&population, cfg.algorithm, &mut rng);
            let b = tournament(&population, cfg.algorithm, &mut rng);
            let (c, d) = vary(
                &problem.encoding,
                &population[a].genotype,
                &population[b].genotype,
                &params,
                &mut rng,
            );
            offspring.push(c);
            offspring.push(d);
        }
        let evaluated = evaluate_all(problem, offspring, generation, cfg.parallel)?;
        evaluations += evaluated.len();
        let children = admit(&mut archive, evaluated);

        let mut merged = population;
        merged.extend(children);
        population = match cfg.algorithm {
            Algorithm::Nsga2 => survive_nsga2(merged, n),
            Algorithm::Nsga3 => {
                let (next, fallback, finite) = survive_nsga3(merged, n, &references, &mut rng);
                if !finite {
                    return Err(EngineError::Degenerate(generation));
                }
                fallbacks += fallback as usize;
                next
            }
        };
        record(generation, evaluations, &archive);
    }

    Ok(RunResult {
        archive,
        stats,
        population,
        reference_points: references,
        hv_reference,
        normalization_fallbacks: fallbacks,
    })
}

struct Evaluated {
    genotype: Genotype,
    objectives: ObjectiveVector,
    workflow: Workflow,
}

/// Evaluates in parallel when requested; results keep the input order and the
/// first failing index (in that order) is reported.
fn evaluate_all(
    problem: &AssembledProblem,
    genotypes: Vec<Genotype>,
    generation: usize,
    parallel: bool,
) -> Result<Vec<Evaluated>, EngineError> {
    let eval = |g: Genotype| -> Result<Evaluated, EvaluationError> {
        let workflow = problem.decode(&g)?;
        let objectives = problem.evaluate_workflow(&workflow)?;
        Ok(Evaluated {
            genotype: g,
            objectives,
            workflow,
        })
    };
    let results: Vec<Result<Evaluated, EvaluationError>> = if parallel {
        genotypes.into_par_iter().map(eval).collect()
    } else {
        genotypes.into_iter().map(eval).collect()
    };
    results
        .into_iter()
        .enumerate()
        .map(|(individual, r)| {
            r.map_err(|source| EngineError::Evaluation {
                generation,
                individual,
                source,
            })
        })
        .collect()
}

/// Offers each evaluated solution to the archive and turns it into an individual.
fn admit(archive: &mut ParetoArchive, evaluated: Vec<Evaluated>) -> Vec<Individual> {
    evaluated
        .into_iter()
        .map(|e| {
            if e.objectives.feasible {
                archive.insert(ArchiveEntry {
                    genotype: e.genotype.clone(),
                    objectives: e.objectives.clone(),
                    workflow: Arc::new(e.workflow),
                });
            }
            Individual {
                genotype: e.genotype,
                objectives: e.objectives,
                rank: 0,
                crowding: 0.0,
            }
        })
        .collect()
}

fn to_minimization(problem: &AssembledProblem, natural: &[f64]) -> Result<Vec<f64>, EngineError> {
    if natural.len() != problem.objective_count() {
        return Err(EngineError::Config(format!(
            "hv_reference has {} values, the problem has {} objectives",
            natural.len(),
            problem.objective_count()
        )));
    }
    Ok(natural
        .iter()
        .zip(&problem.objectives)
        .map(|(&v, o)| if o.is_maximization { -v } else { v })
        .collect())
}

/// Worst feasible initial value plus 10% of the observed range (or plus 1 for a zero range).
fn derive_reference(population: &[Individual]) -> Option<Vec<f64>> {
    let feasible: Vec<&[f64]> = population
        .iter()
        .filter(|i| i.objectives.feasible)
        .map(|i| i.objectives.values.as_slice())
        .collect();
    let m = feasible.first()?.len();
    Some(
        (0..m)
            .map(|k| {
                let lo = feasible.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
                let hi = feasible.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
                let range = hi - lo;
                hi + if range > 0.0 { 0.1 * range } else { 1.0 }
            })
            .collect(),
    )
}

fn assign_rank_and_crowding(population: &mut [Individual], algorithm: Algorithm) {
    let objectives: Vec<ObjectiveVector> = population.iter().map(|i| i.objectives.clone()).collect();
    let fronts = fast_non_dominated_sort(&objectives);
    for (rank, front) in fronts.iter().enumerate() {
        let crowd = match algorithm {
            Algorithm::Nsga2 => crowding_distance(&front.iter().map(|&i| &objectives[i].values).collect::<Vec<_>>()),
            Algorithm::Nsga3 => vec![0.0; front.len()],
        };
        for (&i, c) in front.iter().zip(crowd) {
            population[i].rank = rank;
            population[i].crowding = c;
        }
    }
}

/// Binary tournament. NSGA-II uses the crowded comparison (ties keep the first
/// candidate); NSGA-III compares rank only and breaks ties at random.
fn tournament(population: &[Individual], algorithm: Algorithm, rng: &mut impl Rng) -> usize {
    let a = rng.random_range(0..population.len());
    let b = rng.random_range(0..population.len());
    let (x, y) = (&population[a], &population[b]);
    match algorithm {
        Algorithm::Nsga2 => {
            if crowded_cmp(y.rank, y.crowding, x.rank, x.crowding).is_lt() {
                b
            } else {
                a
            }
        }
        Algorithm::Nsga3 => match x.rank.cmp(&y.rank) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                if rng.random_bool(0.5) {
                    a
                } else {
                    b
                }
            }
        },
    }
}

fn survive_nsga2(merged: Vec<Individual>, target: usize) -> Vec<Individual> {
    let objectives: Vec<ObjectiveVector> = merged.iter().map(|i| i.objectives.clone()).collect();
    let fronts = fast_non_dominated_sort(&objectives);
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    let mut next = Vec::with_capacity(target);
    for (rank, front) in fronts.iter().enumerate() {
        if next.len() == target {
            break;
        }
        let crowd = crowding_distance(&front.iter().map(|&i| &objectives[i].values).collect::<Vec<_>>());
        let mut order: Vec<usize> = (0..front.len()).collect();
        if next.len() + front.len() > target {
            order.sort_by(|&a, &b| crowd[b].total_cmp(&crowd[a]).then(a.cmp(&b)));
            order.truncate(target - next.len());
        }
        for k in order {
            let mut ind = slots[front[k]].take().expect("each individual is selected once");
            ind.rank = rank;
            ind.crowding = crowd[k];
            next.push(ind);
        }
    }
    next
}

fn survive_nsga3(
    merged: Vec<Individual>,
    target: usize,
    references: &[Vec<f64>],
    rng: &mut impl Rng,
) -> (Vec<Individual>, bool, bool) {
    let objectives: Vec<ObjectiveVector> = merged.iter().map(|i| i.objectives.clone()).collect();
    let fronts = fast_non_dominated_sort(&objectives);
    let rank = ranks(&fronts, merged.len());
    let values: Vec<&[f64]> = objectives.iter().map(|o| o.values.as_slice()).collect();
    let feasible: Vec<bool> = objectives.iter().map(|o| o.feasible).collect();
    let survival = nsga3::select(&values, &feasible, &fronts, target, references, rng);
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    let mut next: Vec<Individual> = survival
        .selected
        .iter()
        .map(|&i| {
            let mut ind = slots[i].take().expect("each individual is selected once");
            ind.rank = rank[i];
            ind.crowding = 0.0;
            ind
        })
        .collect();
    // survivors' ranks relative to each other
    let survivor_objectives: Vec<ObjectiveVector> = next.iter().map(|i| i.objectives.clone()).collect();
    let survivor_ranks = ranks(&fast_non_dominated_sort(&survivor_objectives), next.len());
    for (ind, r) in next.iter_mut().zip(survivor_ranks) {
        ind.rank = r;
    }
    (next, survival.fallback, survival.finite)
}

/// Largest binary encoding the exhaustive oracle accepts.
pub const BRUTE_FORCE_MAX_BITS: usize = 24;

/// Exact Pareto set of a problem with a single binary sub-encoding, by enumerating all `2^n` genotypes.
///
/// Gene `i` of genotype number `c` is bit `i` of `c`. Every genotype that
/// attains a non-dominated objective vector is kept.
pub fn brute_force_front(problem: &AssembledProblem) -> Result<ParetoArchive, EngineError> {
    let parts = problem.encoding.parts();
    let n = match parts {
        [only] if only.kind == EncodingKind::BinaryVector => only.length,
        _ => {
            return Err(EngineError::Unsupported(
                "the exhaustive oracle needs exactly one binary sub-encoding".into(),
            ))
        }
    };
    if n > BRUTE_FORCE_MAX_BITS {
        return Err(EngineError::Unsupported(format!(
            "the exhaustive oracle handles at most {BRUTE_FORCE_MAX_BITS} bits, encoding has {n}"
        )));
    }
    let mut archive = ParetoArchive::new();
    const CHUNK: u64 = 1 << 12;
    let total = 1u64 << n;
    let mut start = 0u64;
    while start < total {
        let end = (start + CHUNK).min(total);
        let genotypes: Vec<Genotype> = (start..end)
            .map(|code| Genotype::single(SubValue::Binary((0..n).map(|i| code >> i & 1 == 1).collect())))
            .collect();
        let evaluated = evaluate_all(problem, genotypes, 0, true).map_err(|e| match e {
            EngineError::Evaluation { individual, source, .. } => EngineError::Evaluation {
                generation: 0,
                individual: start as usize + individual,
                source,
            },
            other => other,
        })?;
        admit(&mut archive, evaluated);
        start = end;
    }
    Ok(archive)
}
