//! Evolutionary search over assembled problems.
//!
//! All objective vectors handled here are in minimization form.

mod archive;
mod dominance;
mod engine;
mod hypervolume;
mod nsga3;
mod operators;
mod reference_points;

#[cfg(test)]
mod tests;

pub use archive::{ArchiveEntry, ParetoArchive};
pub use dominance::{constrained_dominates, crowded_cmp, crowding_distance, dominates, fast_non_dominated_sort, ranks};
pub use engine::{
    brute_force_front, nsga2_run, nsga3_run, run, Algorithm, AlgorithmConfig, EngineError, GenerationStats, Individual,
    MutationRate, RunResult, BRUTE_FORCE_MAX_BITS,
};
pub use hypervolume::{hypervolume_2d, hypervolume_2d_clipped, HypervolumeError};
pub use nsga3::{associate, niche_occupancy, normalize, perpendicular_distance, Normalization};
pub use operators::{
    bit_flip, order_crossover, polynomial_mutation, random_genotype, sbx, swap_mutation, uniform_crossover, vary,
    VariationParams,
};
pub use reference_points::{binomial, das_dennis_points};
