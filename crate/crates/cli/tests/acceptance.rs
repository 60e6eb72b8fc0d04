//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use adaptopt_cli::artifact::FrontDocument;
use adaptopt_cli::commands::{load_problem, optimize};
use adaptopt_cli::config::RunConfig;
use adaptopt_core::cobot::reference::w3_problem;
use adaptopt_core::cobot::synthetic::{multi_station_problem, random_line_problem, random_table};
use adaptopt_core::moea::{
    binomial, brute_force_front, constrained_dominates, crowding_distance, das_dennis_points, dominates,
    fast_non_dominated_sort, hypervolume_2d, niche_occupancy, run, AlgorithmConfig, GenerationStats,
};
use adaptopt_core::problem::ObjectiveVector;
use adaptopt_core::workflow::{parse_workflow, random_workflow, serialize_workflow};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Stats of every seeded 2-objective run in this suite, for the monotonicity check.
#[derive(Default)]
struct Collected {
    runs: Vec<(String, Vec<GenerationStats>)>,
}

fn w3_front() -> Vec<Vec<f64>> {
    W3_FRONT.map(|p| p.to_vec()).to_vec()
}

fn oracle_equivalence(collected: &mut Collected) -> Outcome {
    let started = Instant::now();
    let instances: Vec<_> = (0..10)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(1_000 + i as u64);
            let (_, _, problem) = random_line_problem(3 + i, &mut rng);
            let exact = brute_force_front(&problem).expect("binary instance").objective_set();
            (problem, exact)
        })
        .collect();
    let mut per_seed = Vec::new();
    for seed in 0..5u64 {
        let mut hits = 0;
        for (i, (problem, exact)) in instances.iter().enumerate() {
            let result = run(problem, &AlgorithmConfig::nsga2(100, 100, seed), &mut |_| {}).expect("run succeeds");
            if &result.archive.objective_set() == exact {
                hits += 1;
            }
            collected.runs.push((format!("oracle n={} seed={seed}", 3 + i), result.stats));
        }
        per_seed.push(hits);
    }
    let elapsed = started.elapsed();
    let pass = per_seed.iter().all(|&h| h >= 9) && per_seed.contains(&10);
    outcome(
        pass,
        format!("exact front recovered per seed: {per_seed:?} of 10 (n = 3..12), {:.1} s", elapsed.as_secs_f64()),
    )
}

fn w3_reference(collected: &mut Collected) -> Outcome {
    let problem = w3_problem();
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut runs = 0;
    for seed in 0..10u64 {
        for cfg in [AlgorithmConfig::nsga2(20, 30, seed), AlgorithmConfig::nsga3(20, 30, seed, 6)] {
            let started = Instant::now();
            let result = run(&problem, &cfg, &mut |_| {}).expect("run succeeds");
            slowest = slowest.max(started.elapsed());
            runs += 1;
            if result.archive.objective_set() != w3_front() {
                failures.push(format!("{} seed {seed}: {:?}", cfg.algorithm, result.archive.objective_set()));
            }
            collected.runs.push((format!("w3 {} seed={seed}", cfg.algorithm), result.stats));
        }
    }
    let pass = failures.is_empty() && slowest < Duration::from_secs(1);
    outcome(
        pass,
        if failures.is_empty() {
            format!("{runs} runs (NSGA-II and NSGA-III, seeds 0-9) all return the 4-point front; slowest {:.0} ms", slowest.as_secs_f64() * 1e3)
        } else {
            format!("mismatches: {failures:?}")
        },
    )
}

/// Repeatedly removes the members no remaining member constraint-dominates.
fn peel_fronts(pop: &[ObjectiveVector]) -> Vec<Vec<usize>> {
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

fn sorting_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2_024);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=64);
        let m = rng.random_range(1..=5);
        let grid = rng.random_range(2..8);
        let pop: Vec<ObjectiveVector> = (0..n)
            .map(|_| {
                if rng.random_bool(0.05) {
                    ObjectiveVector::infeasible(m, rng.random_range(1..3))
                } else {
                    ObjectiveVector::feasible((0..m).map(|_| rng.random_range(0..grid) as f64).collect())
                }
            })
            .collect();
        if fast_non_dominated_sort(&pop) != peel_fronts(&pop) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatching partitions over 200 populations (N <= 64, M <= 5)"))
}

fn crowding() -> Outcome {
    let d = crowding_distance(&W3_FRONT);
    let expected = [f64::INFINITY, 30.0 / 50.0 + 5.0 / 6.0, 35.0 / 50.0 + 3.0 / 6.0, f64::INFINITY];
    let pass = d
        .iter()
        .zip(expected)
        .all(|(&got, want)| if want.is_infinite() { got == want } else { (got - want).abs() <= 1e-9 });
    outcome(pass, format!("distances {d:?}"))
}

fn das_dennis() -> Outcome {
    let mut bad = Vec::new();
    let mut worst_sum_error = 0.0f64;
    for m in 1..=6 {
        for h in 1..=8 {
            let pts = das_dennis_points(m, h);
            if pts.len() != binomial(h + m - 1, m - 1) {
                bad.push(format!("M={m} H={h}: {} points", pts.len()));
            }
            for p in &pts {
                worst_sum_error = worst_sum_error.max((p.iter().sum::<f64>() - 1.0).abs());
            }
        }
    }
    let pass = bad.is_empty() && worst_sum_error <= 1e-12;
    outcome(pass, format!("count mismatches {bad:?}, worst |sum - 1| = {worst_sum_error:e}"))
}

fn hypervolume(collected: &Collected) -> Outcome {
    let hv = hypervolume_2d(&W3_FRONT, &[100.0, 7.0]);
    let mut decreasing = Vec::new();
    let mut generations = 0;
    for (label, stats) in &collected.runs {
        let values: Vec<f64> = stats.iter().filter_map(|s| s.hypervolume).collect();
        if values.len() != stats.len() {
            decreasing.push(format!("{label}: missing values"));
        }
        generations += values.len();
        if let Some(w) = values.windows(2).position(|w| w[1] < w[0]) {
            decreasing.push(format!("{label}: generation {}", w + 1));
        }
    }
    let pass = hv == Ok(230.0) && decreasing.is_empty();
    outcome(
        pass,
        format!(
            "W3 vs (100, 7) = {hv:?}; non-decreasing over {} runs / {generations} generations; violations {decreasing:?}",
            collected.runs.len()
        ),
    )
}

/// Runs one config twice into separate output directories and compares the artifacts.
fn twin_runs(label: &str, write: impl Fn(&std::path::Path) -> std::path::PathBuf) -> Result<(Vec<std::path::PathBuf>, bool), String> {
    let mut dirs = Vec::new();
    let mut bytes = Vec::new();
    for _ in 0..2 {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?.keep();
        let cfg = write(&tmp);
        pin_run_id(&cfg, label);
        let summary = optimize(&cfg).map_err(|e| e.to_string())?;
        let read = |f: &str| std::fs::read(summary.directory.join(f)).map_err(|e| e.to_string());
        bytes.push((read("front.json")?, read("stats.jsonl")?));
        dirs.push(summary.directory);
    }
    Ok((dirs, bytes[0] == bytes[1]))
}

type WriteInstance = Box<dyn Fn(&std::path::Path) -> std::path::PathBuf>;

fn determinism(persisted: &mut Vec<std::path::PathBuf>, collected: &mut Collected) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let table = random_table(12, "t", &mut rng);
    let cases: Vec<(&str, WriteInstance)> = vec![
        ("w3-nsga2", Box::new(|d| write_w3(d, NSGA2_W3))),
        ("w3-nsga3", Box::new(|d| write_w3(d, NSGA3_W3))),
        (
            "line12-nsga2",
            Box::new(move |d| write_table_instance(d, &table, "algorithm = \"nsga2\"\npopulation_size = 40\ngenerations = 40\nseed = 3")),
        ),
    ];
    let mut details = Vec::new();
    let mut pass = true;
    for (label, write) in &cases {
        match twin_runs(label, write) {
            Ok((dirs, same)) => {
                pass &= same;
                details.push(format!("{label}: {}", if same { "identical" } else { "DIFFERENT" }));
                let stats = std::fs::read_to_string(dirs[0].join("stats.jsonl")).unwrap_or_default();
                let parsed: Vec<GenerationStats> = stats.lines().filter_map(|l| serde_json::from_str(l).ok()).collect();
                collected.runs.push((format!("cli {label}"), parsed));
                persisted.extend(dirs);
            }
            Err(e) => {
                pass = false;
                details.push(format!("{label}: error {e}"));
            }
        }
    }
    outcome(pass, format!("front.json + stats.jsonl byte comparison: {}", details.join(", ")))
}

fn round_trips(persisted: &[std::path::PathBuf]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4_242);
    let mut xml_failures = 0;
    for _ in 0..100 {
        let wf = random_workflow(&mut rng, 16);
        let text = serialize_workflow(&wf);
        match parse_workflow(&text) {
            Ok(back) if back == wf && serialize_workflow(&back) == text => {}
            _ => xml_failures += 1,
        }
    }

    let mut checked = 0;
    let mut eval_failures = Vec::new();
    for dir in persisted {
        let cfg: RunConfig = match std::fs::read_to_string(dir.join("config.json"))
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str(&t).map_err(|e| e.to_string()))
        {
            Ok(c) => c,
            Err(e) => {
                eval_failures.push(format!("{}: {e}", dir.display()));
                continue;
            }
        };
        let problem = load_problem(&cfg).expect("inputs still present");
        let doc = FrontDocument::read(&dir.join("front.json")).expect("front.json readable");
        for s in &doc.solutions {
            checked += 1;
            let text = std::fs::read_to_string(dir.join(&s.workflow_file)).expect("solution file");
            let got = parse_workflow(&text)
                .map_err(|e| e.to_string())
                .and_then(|w| problem.evaluate_workflow(&w).map_err(|e| e.to_string()))
                .map(|o| problem.report(&o));
            if got.as_ref() != Ok(&s.objectives) {
                eval_failures.push(format!("{} #{}: {got:?} vs {:?}", dir.display(), s.index, s.objectives));
            }
        }
        let nondominated = doc.solutions.iter().all(|a| {
            doc.solutions
                .iter()
                .all(|b| !dominates(&a.objectives, &b.objectives))
        });
        if !nondominated {
            eval_failures.push(format!("{}: front.json not mutually nondominated", dir.display()));
        }
    }
    let pass = xml_failures == 0 && eval_failures.is_empty() && checked > 0;
    outcome(
        pass,
        format!(
            "XML: {} of 100 random workflows round-trip; persisted solutions: {} of {checked} re-evaluate exactly {eval_failures:?}",
            100 - xml_failures,
            checked - eval_failures.len().min(checked)
        ),
    )
}

fn many_objective() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let stations = [random_table(8, "s1_", &mut rng), random_table(8, "s2_", &mut rng)];
    let problem = multi_station_problem(&stations).expect("stations assemble");
    let (population, divisions, generations) = (60, 3, 50);
    let mut details = Vec::new();
    let mut pass = problem.objective_count() == 4;
    for seed in 0..3u64 {
        match run(&problem, &AlgorithmConfig::nsga3(population, generations, seed, divisions), &mut |_| {}) {
            Ok(result) => {
                let refs = result.reference_points.len();
                let points: Vec<&[f64]> = result.population.iter().map(|i| i.objectives.values.as_slice()).collect();
                let occupied = niche_occupancy(&points, &result.reference_points);
                let ok = refs <= population && result.stats.len() == generations + 1 && occupied * 10 >= refs * 6;
                pass &= ok;
                details.push(format!(
                    "seed {seed}: {occupied}/{refs} occupied, {} intercept fallbacks",
                    result.normalization_fallbacks
                ));
            }
            Err(e) => {
                pass = false;
                details.push(format!("seed {seed}: {e}"));
            }
        }
    }
    outcome(
        pass,
        format!("M=4, pop {population}, H={divisions}, {generations} generations; {}", details.join("; ")),
    )
}

fn main() {
    let mut collected = Collected::default();
    let mut persisted = Vec::new();
    let started = Instant::now();
    let results: Vec<(&str, Outcome)> = vec![
        ("oracle equivalence on small instances", oracle_equivalence(&mut collected)),
        ("reference instance W3", w3_reference(&mut collected)),
        ("sorting oracle", sorting_oracle()),
        ("crowding distance", crowding()),
        ("Das-Dennis reference points", das_dennis()),
        ("determinism", determinism(&mut persisted, &mut collected)),
        // after every seeded 2-objective run has been collected
        ("hypervolume", hypervolume(&collected)),
        ("round-trips", round_trips(&persisted)),
        ("many-objective smoke test", many_objective()),
    ];
    for dir in &persisted {
        if let Some(root) = dir.parent().and_then(|runs| runs.parent()) {
            let _ = std::fs::remove_dir_all(root);
        }
    }

    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    for (name, o) in &results {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
