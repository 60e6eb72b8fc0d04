/// Structured reference points on the unit simplex (Das and Dennis).
///
/// Returns every vector of `num_objectives` non-negative multiples of
/// `1/divisions` that sum to one, in lexicographically ascending order. The
/// count is `C(divisions + num_objectives - 1, num_objectives - 1)`.
pub fn das_dennis_points(num_objectives: usize, divisions: usize) -> Vec<Vec<f64>> {
    assert!(num_objectives >= 1, "at least one objective is required");
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(num_objectives);
    compositions(num_objectives, divisions, &mut prefix, &mut |parts| {
        out.push(parts.iter().map(|&p| p as f64 / divisions.max(1) as f64).collect());
    });
    out
}

/// Enumerates all `parts`-tuples of non-negative integers summing to `total`.
fn compositions(parts: usize, total: usize, prefix: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if parts == 1 {
        prefix.push(total);
        emit(prefix);
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(parts - 1, total - first, prefix, emit);
        prefix.pop();
    }
}

/// `C(n, k)` without overflow for the small values used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
