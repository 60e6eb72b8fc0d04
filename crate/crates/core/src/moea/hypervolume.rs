use thiserror::Error;

use super::dominance::dominates;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypervolumeError {
    #[error("hypervolume needs 2 objectives, got {0}")]
    Dimension(usize),
    #[error("point {point:?} does not dominate the reference point {reference:?}")]
    NotDominatingReference { point: Vec<f64>, reference: Vec<f64> },
}

/// Area dominated by `front` and bounded by `reference` (both objectives minimized).
///
/// Dominated input points contribute nothing. Every point must dominate the
/// reference point.
pub fn hypervolume_2d<V: AsRef<[f64]>>(front: &[V], reference: &[f64]) -> Result<f64, HypervolumeError> {
    if reference.len() != 2 {
        return Err(HypervolumeError::Dimension(reference.len()));
    }
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(front.len());
    for p in front {
        let p = p.as_ref();
        if p.len() != 2 {
            return Err(HypervolumeError::Dimension(p.len()));
        }
        if !dominates(p, reference) {
            return Err(HypervolumeError::NotDominatingReference {
                point: p.to_vec(),
                reference: reference.to_vec(),
            });
        }
        points.push([p[0], p[1]]);
    }
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for [x, y] in points {
        if y < ceiling {
            area += (reference[0] - x) * (ceiling - y);
            ceiling = y;
        }
    }
    Ok(area)
}

/// Like [`hypervolume_2d`] but silently skips points that do not dominate the reference.
pub fn hypervolume_2d_clipped<V: AsRef<[f64]>>(front: &[V], reference: &[f64]) -> f64 {
    let inside: Vec<&[f64]> = front
        .iter()
        .map(AsRef::as_ref)
        .filter(|p| p.len() == 2 && dominates(p, reference))
        .collect();
    hypervolume_2d(&inside, reference).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w3_front() {
        let front = [[45.0, 6.0], [60.0, 3.0], [75.0, 1.0], [95.0, 0.0]];
        assert_eq!(hypervolume_2d(&front, &[100.0, 7.0]).unwrap(), 230.0);
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(hypervolume_2d(&[[0.0, 0.0]], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(hypervolume_2d::<[f64; 2]>(&[], &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn dominated_points_are_ignored() {
        let front = [[45.0, 6.0], [60.0, 3.0], [65.0, 5.0], [75.0, 1.0], [95.0, 0.0], [60.0, 3.0]];
        assert_eq!(hypervolume_2d(&front, &[100.0, 7.0]).unwrap(), 230.0);
    }

    #[test]
    fn point_outside_reference_is_rejected() {
        let err = hypervolume_2d(&[[0.5, 0.5], [2.0, 0.0]], &[1.0, 1.0]).unwrap_err();
        assert_eq!(
            err,
            HypervolumeError::NotDominatingReference {
                point: vec![2.0, 0.0],
                reference: vec![1.0, 1.0]
            }
        );
        assert_eq!(hypervolume_2d_clipped(&[[0.5, 0.5], [2.0, 0.0]], &[1.0, 1.0]), 0.25);
    }
}
