//! Reference-point based survival for NSGA-III.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Result of normalizing a set of objective vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub ideal: Vec<f64>,
    pub intercepts: Vec<f64>,
    /// True when the hyperplane through the extreme points was unusable and
    /// the per-objective maxima were used instead.
    pub fallback: bool,
}

impl Normalization {
    pub fn apply(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .zip(&self.ideal)
            .zip(&self.intercepts)
            .map(|((f, z), a)| (f - z) / a)
            .collect()
    }
}

const EPS: f64 = 1e-10;

/// Ideal point, extreme points via the achievement scalarizing function, and
/// hyperplane intercepts capped at the worst observed value. Degenerate
/// intercepts fall back to the per-objective maximum of the translated
/// points, and a zero range falls back to 1.
pub fn normalize<V: AsRef<[f64]>>(points: &[V]) -> Normalization {
    assert!(!points.is_empty(), "cannot normalize an empty set");
    let m = points[0].as_ref().len();
    let ideal: Vec<f64> = (0..m)
        .map(|k| points.iter().map(|p| p.as_ref()[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let translated: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.as_ref().iter().zip(&ideal).map(|(f, z)| f - z).collect())
        .collect();

    let extremes: Vec<&Vec<f64>> = (0..m)
        .map(|axis| {
            let asf = |p: &Vec<f64>| {
                p.iter()
                    .enumerate()
                    .map(|(k, &v)| v / if k == axis { 1.0 } else { 1e-6 })
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            translated
                .iter()
                .min_by(|a, b| asf(a).total_cmp(&asf(b)))
                .expect("non-empty")
        })
        .collect();

    let maxima: Vec<f64> = (0..m)
        .map(|k| translated.iter().map(|p| p[k]).fold(0.0, f64::max))
        .collect();

    let hyperplane = || -> Option<Vec<f64>> {
        let e = DMatrix::from_fn(m, m, |r, c| extremes[r][c]);
        let ones = DVector::from_element(m, 1.0);
        let b = e.clone().lu().solve(&ones)?;
        if ((&e * &b) - &ones).amax() > 1e-8 {
            return None;
        }
        let intercepts: Vec<f64> = b.iter().map(|&x| 1.0 / x).collect();
        let usable = intercepts
            .iter()
            .zip(&maxima)
            .all(|(&a, &mx)| a.is_finite() && a > EPS && mx > EPS);
        // an intercept beyond the worst observed value is capped there
        usable.then(|| intercepts.iter().zip(&maxima).map(|(&a, &mx)| a.min(mx)).collect())
    };

    match hyperplane() {
        Some(intercepts) => Normalization {
            ideal,
            intercepts,
            fallback: false,
        },
        None => Normalization {
            ideal,
            intercepts: maxima.iter().map(|&mx| if mx > EPS { mx } else { 1.0 }).collect(),
            fallback: true,
        },
    }
}

/// Perpendicular distance from `point` to the line through the origin along `direction`.
pub fn perpendicular_distance(point: &[f64], direction: &[f64]) -> f64 {
    let norm2: f64 = direction.iter().map(|w| w * w).sum();
    let t = point.iter().zip(direction).map(|(p, w)| p * w).sum::<f64>() / norm2;
    point
        .iter()
        .zip(direction)
        .map(|(p, w)| (p - t * w).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Nearest reference line for each normalized point; ties go to the lower index.
pub fn associate(normalized: &[Vec<f64>], references: &[Vec<f64>]) -> Vec<(usize, f64)> {
    normalized
        .iter()
        .map(|p| {
            references
                .iter()
                .enumerate()
                .map(|(j, w)| (j, perpendicular_distance(p, w)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("at least one reference point")
        })
        .collect()
}

/// Number of distinct reference points that some member of `points` associates with,
/// after normalizing `points` on themselves.
pub fn niche_occupancy<V: AsRef<[f64]>>(points: &[V], references: &[Vec<f64>]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let norm = normalize(points);
    let normalized: Vec<Vec<f64>> = points.iter().map(|p| norm.apply(p.as_ref())).collect();
    let mut used = vec![false; references.len()];
    for (j, _) in associate(&normalized, references) {
        used[j] = true;
    }
    used.into_iter().filter(|&u| u).count()
}

/// Outcome of one survival step.
pub(crate) struct Survival {
    pub selected: Vec<usize>,
    pub fallback: bool,
    pub finite: bool,
}

/// Picks `target` survivors from `fronts` over `objectives` (minimization form).
///
/// Whole fronts are accepted while they fit; the front that overflows is
/// thinned by niche preservation. Infeasible overflow fronts are cut in index order.
pub(crate) fn select(
    objectives: &[&[f64]],
    feasible: &[bool],
    fronts: &[Vec<usize>],
    target: usize,
    references: &[Vec<f64>],
    rng: &mut impl Rng,
) -> Survival {
    let mut selected: Vec<usize> = Vec::with_capacity(target);
    let mut last: &[usize] = &[];
    for front in fronts {
        if selected.len() + front.len() <= target {
            selected.extend(front);
            if selected.len() == target {
                break;
            }
        } else {
            last = front;
            break;
        }
    }
    let remaining = target - selected.len();
    if remaining == 0 || last.is_empty() {
        return Survival {
            selected,
            fallback: false,
            finite: true,
        };
    }
    if !feasible[last[0]] {
        selected.extend(&last[..remaining]);
        return Survival {
            selected,
            fallback: false,
            finite: true,
        };
    }

    // S_t = accepted fronts + the overflowing one; normalize over its feasible members
    let candidates: Vec<usize> = selected
        .iter()
        .chain(last.iter())
        .copied()
        .filter(|&i| feasible[i])
        .collect();
    let points: Vec<&[f64]> = candidates.iter().map(|&i| objectives[i]).collect();
    let norm = normalize(&points);
    let normalized: Vec<Vec<f64>> = points.iter().map(|p| norm.apply(p)).collect();
    let finite = normalized.iter().flatten().all(|v| v.is_finite());
    let links = associate(&normalized, references);

    let mut niche_count = vec![0usize; references.len()];
    let mut pool: Vec<(usize, usize, f64)> = Vec::new(); // (individual, reference, distance)
    for (k, &i) in candidates.iter().enumerate() {
        let (j, d) = links[k];
        if last.contains(&i) {
            pool.push((i, j, d));
        } else {
            niche_count[j] += 1;
        }
    }

    let mut active: Vec<bool> = vec![true; references.len()];
    let mut chosen = 0;
    while chosen < remaining {
        let min_count = (0..references.len())
            .filter(|&j| active[j])
            .map(|j| niche_count[j])
            .min()
            .expect("some reference point stays active while candidates remain");
        let tied: Vec<usize> = (0..references.len())
            .filter(|&j| active[j] && niche_count[j] == min_count)
            .collect();
        let j = tied[rng.random_range(0..tied.len())];
        let members: Vec<usize> = (0..pool.len()).filter(|&p| pool[p].1 == j).collect();
        if members.is_empty() {
            active[j] = false;
            continue;
        }
        let pick = if niche_count[j] == 0 {
            *members
                .iter()
                .min_by(|&&a, &&b| pool[a].2.total_cmp(&pool[b].2))
                .expect("non-empty")
        } else {
            members[rng.random_range(0..members.len())]
        };
        selected.push(pool[pick].0);
        pool.remove(pick);
        niche_count[j] += 1;
        chosen += 1;
    }
    Survival {
        selected,
        fallback: norm.fallback,
        finite,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moea::das_dennis_points;

    #[test]
    fn normalization_maps_simplex_front_onto_unit_intercepts() {
        let pts = [[1.0, 5.0], [3.0, 3.0], [5.0, 1.0]];
        let n = normalize(&pts);
        assert!(!n.fallback);
        assert_eq!(n.ideal, [1.0, 1.0]);
        assert!((n.intercepts[0] - 4.0).abs() < 1e-9 && (n.intercepts[1] - 4.0).abs() < 1e-9);
        assert_eq!(n.apply(&[3.0, 3.0]), [0.5, 0.5]);
    }

    #[test]
    fn all_equal_points_use_the_fallback() {
        let pts = [[2.0, 2.0, 2.0]; 4];
        let n = normalize(&pts);
        assert!(n.fallback);
        assert_eq!(n.intercepts, [1.0, 1.0, 1.0]);
        assert!(n.apply(&pts[0]).iter().all(|v| v.is_finite()));
    }

    #[test]
    fn perpendicular_distance_values() {
        assert!((perpendicular_distance(&[1.0, 0.0], &[1.0, 1.0]) - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(perpendicular_distance(&[2.0, 2.0], &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn occupancy_counts_distinct_niches() {
        let refs = das_dennis_points(2, 4);
        let pts = [[0.0, 4.0], [1.0, 3.0], [2.0, 2.0], [3.0, 1.0], [4.0, 0.0]];
        assert_eq!(niche_occupancy(&pts, &refs), 5);
        assert_eq!(niche_occupancy(&[[1.0, 1.0], [1.0, 1.0]], &refs), 1);
    }
}
