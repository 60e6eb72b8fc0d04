//! Initialization and variation per sub-encoding.
//!
//! * binary: uniform crossover, per-gene bit flip
//! * real: simulated binary crossover, polynomial mutation, clamped to bounds
//! * permutation: order crossover (OX), swap mutation

use rand::seq::SliceRandom;
use rand::Rng;

use crate::problem::{EncodingKind, Genotype, MultiEncodingSpec, SubEncodingSpec, SubValue};

/// Distribution indices and rates used by the variation operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationParams {
    pub crossover_rate: f64,
    /// Per-gene mutation probability; `None` means `1 / length` of each sub-encoding.
    pub mutation_rate: Option<f64>,
    pub sbx_eta: f64,
    pub pm_eta: f64,
}

impl Default for VariationParams {
    fn default() -> Self {
        VariationParams {
            crossover_rate: 0.9,
            mutation_rate: None,
            sbx_eta: 15.0,
            pm_eta: 20.0,
        }
    }
}

pub fn random_genotype(spec: &MultiEncodingSpec, rng: &mut impl Rng) -> Genotype {
    Genotype(spec.parts().iter().map(|part| random_value(part, rng)).collect())
}

fn random_value(part: &SubEncodingSpec, rng: &mut impl Rng) -> SubValue {
    match part.kind {
        EncodingKind::BinaryVector => SubValue::Binary((0..part.length).map(|_| rng.random_bool(0.5)).collect()),
        EncodingKind::RealVector => SubValue::Real(
            part.bounds
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..=hi))
                .collect(),
        ),
        EncodingKind::Permutation => {
            let mut p: Vec<usize> = (0..part.length).collect();
            p.shuffle(rng);
            SubValue::Permutation(p)
        }
    }
}

/// Produces two children from two parents. One crossover decision is drawn
/// per pair and applies to every sub-encoding; mutation follows per child.
pub fn vary(
    spec: &MultiEncodingSpec,
    a: &Genotype,
    b: &Genotype,
    params: &VariationParams,
    rng: &mut impl Rng,
) -> (Genotype, Genotype) {
    let cross = rng.random_bool(params.crossover_rate);
    let mut c1 = Vec::with_capacity(spec.len());
    let mut c2 = Vec::with_capacity(spec.len());
    for (part, (x, y)) in spec.parts().iter().zip(a.parts().iter().zip(b.parts())) {
        let (mut u, mut v) = if cross {
            crossover(part, x, y, params, rng)
        } else {
            (x.clone(), y.clone())
        };
        let rate = params.mutation_rate.unwrap_or(1.0 / part.length as f64);
        mutate(part, &mut u, rate, params, rng);
        mutate(part, &mut v, rate, params, rng);
        c1.push(u);
        c2.push(v);
    }
    (Genotype(c1), Genotype(c2))
}

fn crossover(
    part: &SubEncodingSpec,
    x: &SubValue,
    y: &SubValue,
    params: &VariationParams,
    rng: &mut impl Rng,
) -> (SubValue, SubValue) {
    match (x, y) {
        (SubValue::Binary(x), SubValue::Binary(y)) => {
            let (u, v) = uniform_crossover(x, y, rng);
            (SubValue::Binary(u), SubValue::Binary(v))
        }
        (SubValue::Real(x), SubValue::Real(y)) => {
            let (u, v) = sbx(x, y, &part.bounds, params.sbx_eta, rng);
            (SubValue::Real(u), SubValue::Real(v))
        }
        (SubValue::Permutation(x), SubValue::Permutation(y)) => {
            let (u, v) = order_crossover(x, y, rng);
            (SubValue::Permutation(u), SubValue::Permutation(v))
        }
        _ => (x.clone(), y.clone()),
    }
}

fn mutate(part: &SubEncodingSpec, value: &mut SubValue, rate: f64, params: &VariationParams, rng: &mut impl Rng) {
    match value {
        SubValue::Binary(bits) => bit_flip(bits, rate, rng),
        SubValue::Real(x) => polynomial_mutation(x, &part.bounds, rate, params.pm_eta, rng),
        SubValue::Permutation(p) => swap_mutation(p, rate, rng),
    }
}

pub fn uniform_crossover<T: Clone>(x: &[T], y: &[T], rng: &mut impl Rng) -> (Vec<T>, Vec<T>) {
    let mut u = x.to_vec();
    let mut v = y.to_vec();
    for i in 0..u.len().min(v.len()) {
        if rng.random_bool(0.5) {
            std::mem::swap(&mut u[i], &mut v[i]);
        }
    }
    (u, v)
}

pub fn bit_flip(bits: &mut [bool], rate: f64, rng: &mut impl Rng) {
    for b in bits {
        if rng.random_bool(rate) {
            *b = !*b;
        }
    }
}

/// Bounded simulated binary crossover. Each variable is recombined with
/// probability 0.5; children are clamped to bounds and swapped with probability 0.5.
pub fn sbx(x: &[f64], y: &[f64], bounds: &[(f64, f64)], eta: f64, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let mut u = x.to_vec();
    let mut v = y.to_vec();
    for (i, &(lo, hi)) in bounds.iter().enumerate().take(u.len().min(v.len())) {
        if !rng.random_bool(0.5) {
            continue;
        }
        let (p1, p2) = (x[i], y[i]);
        if (p1 - p2).abs() <= 1e-14 {
            continue;
        }
        let (y1, y2) = if p1 < p2 { (p1, p2) } else { (p2, p1) };
        let r: f64 = rng.random();
        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if r <= 1.0 / alpha {
                (r * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - r * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let betaq = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
        let c1 = 0.5 * ((y1 + y2) - betaq * (y2 - y1));
        let betaq = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
        let c2 = 0.5 * ((y1 + y2) + betaq * (y2 - y1));
        let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
        if rng.random_bool(0.5) {
            u[i] = c2;
            v[i] = c1;
        } else {
            u[i] = c1;
            v[i] = c2;
        }
    }
    (u, v)
}

pub fn polynomial_mutation(x: &mut [f64], bounds: &[(f64, f64)], rate: f64, eta: f64, rng: &mut impl Rng) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        if !rng.random_bool(rate) {
            continue;
        }
        let span = hi - lo;
        let delta1 = (*xi - lo) / span;
        let delta2 = (hi - *xi) / span;
        let r: f64 = rng.random();
        let power = 1.0 / (eta + 1.0);
        let deltaq = if r < 0.5 {
            let val = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - delta1).powf(eta + 1.0);
            val.powf(power) - 1.0
        } else {
            let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - delta2).powf(eta + 1.0);
            1.0 - val.powf(power)
        };
        *xi = (*xi + deltaq * span).clamp(lo, hi);
    }
}

/// Classic OX: each child keeps a slice of one parent and fills the rest in
/// the other parent's order, starting after the slice and wrapping around.
pub fn order_crossover(x: &[usize], y: &[usize], rng: &mut impl Rng) -> (Vec<usize>, Vec<usize>) {
    let n = x.len();
    if n < 2 {
        return (x.to_vec(), y.to_vec());
    }
    let mut a = rng.random_range(0..n);
    let mut b = rng.random_range(0..n);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let child = |keep: &[usize], fill: &[usize]| {
        let mut out = vec![usize::MAX; n];
        let mut used = vec![false; n];
        for i in a..=b {
            out[i] = keep[i];
            used[keep[i]] = true;
        }
        let mut pos = (b + 1) % n;
        for k in 0..n {
            let gene = fill[(b + 1 + k) % n];
            if !used[gene] {
                out[pos] = gene;
                used[gene] = true;
                pos = (pos + 1) % n;
            }
        }
        out
    };
    (child(x, y), child(y, x))
}

pub fn swap_mutation(p: &mut [usize], rate: f64, rng: &mut impl Rng) {
    let n = p.len();
    if n < 2 {
        return;
    }
    for i in 0..n {
        if rng.random_bool(rate) {
            let j = rng.random_range(0..n);
            p.swap(i, j);
        }
    }
}
