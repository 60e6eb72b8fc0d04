use std::cmp::Ordering;

use crate::problem::ObjectiveVector;

/// Pareto dominance under minimization: `a <= b` everywhere and `a < b` somewhere.
///
/// Panics when the vectors differ in length.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(
        a.len(),
        b.len(),
        "dominance check between vectors of different arity ({} vs {})",
        a.len(),
        b.len()
    );
    let mut strictly_better = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Constraint-domination: a feasible vector beats an infeasible one, two
/// infeasible vectors compare by number of failed preconditions, two feasible
/// ones by Pareto dominance.
pub fn constrained_dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> bool {
    match (a.feasible, b.feasible) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.failed_preconditions < b.failed_preconditions,
        (true, true) => dominates(&a.values, &b.values),
    }
}

/// Partitions `population` into fronts of indices; front 0 is the non-dominated set.
///
/// Uses constraint-domination. Indices within a front are ascending.
pub fn fast_non_dominated_sort(population: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = population.len();
    let mut dominated_by_me: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if constrained_dominates(&population[i], &population[j]) {
                dominated_by_me[i].push(j);
                domination_count[j] += 1;
            } else if constrained_dominates(&population[j], &population[i]) {
                dominated_by_me[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by_me[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Rank of every member, derived from [`fast_non_dominated_sort`].
pub fn ranks(fronts: &[Vec<usize>], len: usize) -> Vec<usize> {
    let mut rank = vec![0; len];
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    rank
}

/// NSGA-II crowding distance of each member of one front.
///
/// Boundary members of every objective get `+inf`; interior members sum the
/// normalized gap between their neighbours. An objective whose range is zero
/// (or not finite) adds nothing. Fronts of at most two members are all `+inf`.
/// Duplicates are kept as they are, so coincident points may get 0.
pub fn crowding_distance<V: AsRef<[f64]>>(front: &[V]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].as_ref().len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        let value = |i: usize| front[i].as_ref()[k];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        let (first, last) = (order[0], order[n - 1]);
        distance[first] = f64::INFINITY;
        distance[last] = f64::INFINITY;
        let range = value(last) - value(first);
        if !range.is_finite() || range <= 0.0 {
            continue;
        }
        for w in order.windows(3) {
            let mid = w[1];
            if distance[mid].is_finite() {
                distance[mid] += (value(w[2]) - value(w[0])) / range;
            }
        }
    }
    distance
}

/// Crowded comparison: lower rank first, then larger crowding distance.
pub fn crowded_cmp(rank_a: usize, crowd_a: f64, rank_b: usize, crowd_b: f64) -> Ordering {
    rank_a.cmp(&rank_b).then(crowd_b.total_cmp(&crowd_a))
}
