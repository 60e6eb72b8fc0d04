use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::cobot::reference::w3_problem;
use crate::cobot::synthetic::{multi_station_problem, random_line_problem, random_table};
use crate::problem::{Genotype, ObjectiveVector};

const W3_FRONT: [[f64; 2]; 4] = [[45.0, 6.0], [60.0, 3.0], [75.0, 1.0], [95.0, 0.0]];

/// Quadratic reference ranking: peel off the non-dominated set repeatedly.
fn naive_fronts(pop: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..pop.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> = left
            .iter()
            .copied()
            .filter(|&i| !left.iter().any(|&j| constrained_dominates(&pop[j], &pop[i])))
            .collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn random_population(rng: &mut ChaCha8Rng) -> Vec<ObjectiveVector> {
    let n = rng.random_range(1..40);
    let m = rng.random_range(2..5);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                ObjectiveVector::infeasible(m, rng.random_range(1..4))
            } else {
                // small integer grid so ties and duplicates are frequent
                ObjectiveVector::feasible((0..m).map(|_| rng.random_range(0..6) as f64).collect())
            }
        })
        .collect()
}

proptest! {
    #[test]
    fn sort_matches_naive_peeling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pop = random_population(&mut rng);
        prop_assert_eq!(fast_non_dominated_sort(&pop), naive_fronts(&pop));
    }

    #[test]
    fn dominance_is_irreflexive_and_asymmetric(a in prop::collection::vec(0u8..4, 3), b in prop::collection::vec(0u8..4, 3)) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        prop_assert!(!dominates(&a, &a));
        prop_assert!(!(dominates(&a, &b) && dominates(&b, &a)));
    }
}

#[test]
#[should_panic(expected = "different arity")]
fn dominance_rejects_arity_mismatch() {
    dominates(&[1.0, 2.0], &[1.0]);
}

#[test]
fn crowding_on_the_reference_front() {
    let d = crowding_distance(&W3_FRONT);
    assert!(d[0].is_infinite() && d[3].is_infinite());
    assert!((d[1] - (30.0 / 50.0 + 5.0 / 6.0)).abs() < 1e-9);
    assert!((d[2] - (35.0 / 50.0 + 3.0 / 6.0)).abs() < 1e-9);
}

#[test]
fn crowding_small_and_flat_fronts() {
    assert_eq!(crowding_distance(&[[1.0, 2.0], [2.0, 1.0]]), [f64::INFINITY; 2]);
    let flat = crowding_distance(&[[1.0, 1.0]; 4]);
    assert_eq!(flat.iter().filter(|d| d.is_infinite()).count(), 2);
    assert!(flat.iter().all(|d| !d.is_nan()));
}

#[test]
fn infeasible_ranks_behind_feasible() {
    let pop = vec![
        ObjectiveVector::infeasible(2, 1),
        ObjectiveVector::feasible(vec![100.0, 100.0]),
        ObjectiveVector::infeasible(2, 2),
    ];
    assert_eq!(fast_non_dominated_sort(&pop), vec![vec![1], vec![0], vec![2]]);
}

#[test]
fn das_dennis_counts_and_simplex_membership() {
    for m in 2..=6 {
        for h in 1..=8 {
            let pts = das_dennis_points(m, h);
            assert_eq!(pts.len(), binomial(h + m - 1, m - 1), "M={m} H={h}");
            for p in &pts {
                assert_eq!(p.len(), m);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(p.iter().all(|&v| v >= 0.0));
            }
        }
    }
}

#[test]
fn hypervolume_of_the_reference_front() {
    assert_eq!(hypervolume_2d(&W3_FRONT, &[100.0, 7.0]).unwrap(), 230.0);
}

#[test]
fn exhaustive_oracle_on_the_reference_problem() {
    let archive = brute_force_front(&w3_problem()).unwrap();
    assert_eq!(archive.objective_set(), W3_FRONT.map(|p| p.to_vec()).to_vec());
    let bits: Vec<String> = archive.sorted_entries().iter().map(|e| e.genotype.to_string()).collect();
    assert_eq!(bits, ["000", "100", "101", "111"]);
}

#[test]
fn both_algorithms_recover_the_reference_front() {
    let problem = w3_problem();
    for cfg in [AlgorithmConfig::nsga2(20, 30, 1), AlgorithmConfig::nsga3(20, 30, 1, 6)] {
        let result = run(&problem, &cfg, &mut |_| {}).unwrap();
        assert_eq!(result.archive.objective_set(), W3_FRONT.map(|p| p.to_vec()).to_vec(), "{}", cfg.algorithm);
        assert_eq!(result.population.len(), 20);
        assert_eq!(result.stats.len(), 31);
        assert!(result.archive.is_mutually_nondominated());
    }
}

#[test]
fn zero_generations_archives_the_initial_population() {
    let problem = w3_problem();
    let result = nsga2_run(&problem, &AlgorithmConfig::nsga2(4, 0, 9)).unwrap();
    assert_eq!(result.stats.len(), 1);
    assert_eq!(result.stats[0].evaluations, 4);
    assert!(!result.archive.is_empty());
}

#[test]
fn runs_are_deterministic_and_thread_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (_, _, problem) = random_line_problem(10, &mut rng);
    let mut serial = AlgorithmConfig::nsga3(24, 15, 77, 5);
    serial.parallel = false;
    let a = run(&problem, &serial, &mut |_| {}).unwrap();
    let b = nsga3_run(&problem, &AlgorithmConfig::nsga3(24, 15, 77, 5)).unwrap();
    let keys = |r: &RunResult| -> Vec<String> { r.archive.sorted_entries().iter().map(|e| e.genotype.to_string()).collect() };
    assert_eq!(keys(&a), keys(&b));
    assert_eq!(a.stats, b.stats);
}

#[test]
fn hypervolume_never_decreases() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (_, _, problem) = random_line_problem(12, &mut rng);
    let mut seen = Vec::new();
    let result = run(&problem, &AlgorithmConfig::nsga2(30, 40, 3), &mut |s| seen.push(s.clone())).unwrap();
    assert_eq!(seen, result.stats);
    let hv: Vec<f64> = seen.iter().map(|s| s.hypervolume.unwrap()).collect();
    assert!(hv.windows(2).all(|w| w[1] >= w[0]), "{hv:?}");
}

#[test]
fn explicit_hv_reference_is_validated() {
    let mut cfg = AlgorithmConfig::nsga2(4, 1, 0);
    cfg.hv_reference = Some(vec![1.0]);
    assert!(matches!(run(&w3_problem(), &cfg, &mut |_| {}), Err(EngineError::Config(_))));
}

#[test]
fn configuration_errors() {
    assert!(AlgorithmConfig::nsga2(7, 1, 0).validate().is_err());
    assert!(AlgorithmConfig::nsga2(0, 1, 0).validate().is_err());
    assert!(AlgorithmConfig::nsga3(8, 1, 0, 0).validate().is_err());
    let mut cfg = AlgorithmConfig::nsga2(8, 1, 0);
    cfg.mutation_rate = MutationRate::Fixed(1.5);
    assert!(cfg.validate().is_err());
    assert!(nsga3_run(&w3_problem(), &AlgorithmConfig::nsga2(8, 1, 0)).is_err());
}

#[test]
fn degenerate_population_survives_selection() {
    // every action costs the same either way: all genotypes map to one point
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut table = random_table(5, "d", &mut rng);
    for row in &mut table.rows {
        row.human_time_s = 1.0;
        row.cobot_time_s = 1.0;
        row.ergonomic_penalty = 0;
    }
    let problem = crate::cobot::build_cobot_problem(crate::cobot::line_workflow("flat", &table), &table).unwrap();
    for cfg in [AlgorithmConfig::nsga2(10, 5, 1), AlgorithmConfig::nsga3(10, 5, 1, 4)] {
        let r = run(&problem, &cfg, &mut |_| {}).unwrap();
        assert_eq!(r.archive.objective_set(), vec![vec![5.0, 0.0]]);
    }
}

#[test]
fn four_objective_run_spreads_over_reference_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let stations: Vec<_> = (1..=2).map(|s| random_table(6, &format!("s{s}_"), &mut rng)).collect();
    let problem = multi_station_problem(&stations).unwrap();
    assert_eq!(problem.objective_count(), 4);
    let result = nsga3_run(&problem, &AlgorithmConfig::nsga3(40, 20, 4, 3)).unwrap();
    assert_eq!(result.reference_points.len(), 20);
    let points: Vec<&[f64]> = result.population.iter().map(|i| i.objectives.values.as_slice()).collect();
    assert!(niche_occupancy(&points, &result.reference_points) >= 1);
}

#[test]
fn oracle_rejects_large_encodings() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (_, _, problem) = random_line_problem(BRUTE_FORCE_MAX_BITS + 1, &mut rng);
    assert!(matches!(brute_force_front(&problem), Err(EngineError::Unsupported(_))));
}

#[test]
fn archive_keeps_equal_vectors_with_distinct_genotypes() {
    let problem = w3_problem();
    let mut archive = ParetoArchive::new();
    let mk = |bits: &str, v: Vec<f64>| ArchiveEntry {
        genotype: Genotype::from_bit_str(bits).unwrap(),
        objectives: ObjectiveVector::feasible(v),
        workflow: std::sync::Arc::new(problem.base_workflow.clone()),
    };
    assert!(archive.insert(mk("000", vec![1.0, 1.0])));
    assert!(archive.insert(mk("001", vec![1.0, 1.0])));
    assert!(!archive.insert(mk("001", vec![1.0, 1.0])));
    assert!(!archive.insert(mk("010", vec![2.0, 2.0])));
    assert!(archive.insert(mk("011", vec![0.0, 0.0])));
    assert_eq!(archive.len(), 1);
}

/// Reorders nothing; only contributes a permutation sub-encoding.
struct SequenceHint;

impl crate::problem::WorkflowManipulator for SequenceHint {
    fn name(&self) -> &str {
        "sequence_hint"
    }

    fn description(&self) -> &str {
        "unused ordering genes"
    }

    fn encoding_spec(&self, index_map: &crate::workflow::ActionIndexMap) -> crate::problem::SubEncodingSpec {
        crate::problem::SubEncodingSpec::permutation("sequence", index_map.len())
    }

    fn manipulate(
        &self,
        _: &mut crate::workflow::Workflow,
        _: &crate::workflow::ActionIndexMap,
        _: &crate::problem::SubValue,
    ) -> Result<(), crate::problem::PluginError> {
        Ok(())
    }
}

fn w3_with_permutation() -> crate::problem::AssembledProblem {
    use crate::cobot::reference::{w3_table, w3_workflow};
    let registry = crate::cobot::cobot_registry(&w3_table()).with_manipulator(SequenceHint);
    crate::problem::assemble(w3_workflow(), registry).unwrap()
}

#[test]
fn oracle_refuses_non_binary_encodings() {
    let err = brute_force_front(&w3_with_permutation()).unwrap_err();
    assert!(matches!(err, EngineError::Unsupported(_)));
    assert!(err.to_string().contains("binary"), "{err}");
}

#[test]
fn mixed_encodings_evolve_valid_genotypes() {
    let problem = w3_with_permutation();
    let result = run(&problem, &AlgorithmConfig::nsga2(20, 30, 4), &mut |_| {}).unwrap();
    assert_eq!(result.archive.objective_set(), W3_FRONT.map(|p| p.to_vec()).to_vec());
    for ind in &result.population {
        crate::problem::validate_genotype(&problem.encoding, &ind.genotype).unwrap();
    }
}
