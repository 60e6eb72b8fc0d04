use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingKind {
    BinaryVector,
    RealVector,
    Permutation,
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EncodingKind::BinaryVector => "binary",
            EncodingKind::RealVector => "real",
            EncodingKind::Permutation => "permutation",
        })
    }
}

/// One named, fixed-length component of a multi-encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubEncodingSpec {
    pub name: String,
    pub kind: EncodingKind,
    pub length: usize,
    /// Per-dimension `(low, high)`; only populated for real vectors.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<(f64, f64)>,
}

impl SubEncodingSpec {
    pub fn binary(name: impl Into<String>, length: usize) -> Self {
        SubEncodingSpec {
            name: name.into(),
            kind: EncodingKind::BinaryVector,
            length,
            bounds: Vec::new(),
        }
    }

    pub fn real(name: impl Into<String>, bounds: Vec<(f64, f64)>) -> Self {
        SubEncodingSpec {
            name: name.into(),
            kind: EncodingKind::RealVector,
            length: bounds.len(),
            bounds,
        }
    }

    pub fn permutation(name: impl Into<String>, length: usize) -> Self {
        SubEncodingSpec {
            name: name.into(),
            kind: EncodingKind::Permutation,
            length,
            bounds: Vec::new(),
        }
    }

    fn check(&self) -> Result<(), String> {
        if self.length == 0 {
            return Err(format!("sub-encoding '{}' has length 0", self.name));
        }
        match self.kind {
            EncodingKind::RealVector => {
                if self.bounds.len() != self.length {
                    return Err(format!(
                        "sub-encoding '{}' declares length {} but {} bounds",
                        self.name,
                        self.length,
                        self.bounds.len()
                    ));
                }
                if let Some((i, (lo, hi))) = self
                    .bounds
                    .iter()
                    .enumerate()
                    .find(|(_, (lo, hi))| lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less) || !lo.is_finite() || !hi.is_finite())
                {
                    return Err(format!(
                        "sub-encoding '{}' dimension {i}: bounds ({lo}, {hi}) need finite low < high",
                        self.name
                    ));
                }
            }
            _ if !self.bounds.is_empty() => {
                return Err(format!("sub-encoding '{}' is {} and takes no bounds", self.name, self.kind));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Ordered list of sub-encodings, one per registered manipulator.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiEncodingSpec(Vec<SubEncodingSpec>);

impl MultiEncodingSpec {
    pub fn new(parts: Vec<SubEncodingSpec>) -> Result<Self, String> {
        let mut names = HashSet::new();
        for part in &parts {
            part.check()?;
            if !names.insert(part.name.as_str()) {
                return Err(format!("duplicate sub-encoding name '{}'", part.name));
            }
        }
        Ok(MultiEncodingSpec(parts))
    }

    pub fn parts(&self) -> &[SubEncodingSpec] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total number of genes over all parts.
    pub fn total_length(&self) -> usize {
        self.0.iter().map(|p| p.length).sum()
    }
}

/// Value of one sub-encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum SubValue {
    Binary(Vec<bool>),
    Real(Vec<f64>),
    Permutation(Vec<usize>),
}

impl SubValue {
    pub fn kind(&self) -> EncodingKind {
        match self {
            SubValue::Binary(_) => EncodingKind::BinaryVector,
            SubValue::Real(_) => EncodingKind::RealVector,
            SubValue::Permutation(_) => EncodingKind::Permutation,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SubValue::Binary(v) => v.len(),
            SubValue::Real(v) => v.len(),
            SubValue::Permutation(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_bits(&self) -> Option<&[bool]> {
        match self {
            SubValue::Binary(v) => Some(v),
            _ => None,
        }
    }
}

/// A full solution value: one [`SubValue`] per sub-encoding, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genotype(pub Vec<SubValue>);

impl Genotype {
    pub fn single(value: SubValue) -> Self {
        Genotype(vec![value])
    }

    /// Binary genotype from a `'0'`/`'1'` string such as `"101"`.
    pub fn from_bit_str(bits: &str) -> Option<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(|v| Genotype::single(SubValue::Binary(v)))
    }

    pub fn parts(&self) -> &[SubValue] {
        &self.0
    }

    /// Hashable identity; reals compare by bit pattern.
    pub fn key(&self) -> GenotypeKey {
        let mut words = Vec::new();
        for part in &self.0 {
            match part {
                SubValue::Binary(v) => {
                    words.push(0);
                    words.extend(v.iter().map(|&b| b as u64));
                }
                SubValue::Real(v) => {
                    words.push(1);
                    words.extend(v.iter().map(|x| x.to_bits()));
                }
                SubValue::Permutation(v) => {
                    words.push(2);
                    words.extend(v.iter().map(|&x| x as u64));
                }
            }
            words.push(u64::MAX);
        }
        GenotypeKey(words)
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            match part {
                SubValue::Binary(v) => {
                    for &b in v {
                        f.write_str(if b { "1" } else { "0" })?;
                    }
                }
                SubValue::Real(v) => write!(f, "{v:?}")?,
                SubValue::Permutation(v) => write!(f, "{v:?}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenotypeKey(Vec<u64>);

#[derive(Debug, Clone, PartialEq)]
pub enum GenotypeViolation {
    Arity { expected: usize, found: usize },
    Kind { part: String, expected: EncodingKind, found: EncodingKind },
    Length { part: String, expected: usize, found: usize },
    OutOfBounds { part: String, dimension: usize, value: f64, low: f64, high: f64 },
    NotAPermutation { part: String },
}

impl fmt::Display for GenotypeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenotypeViolation::Arity { expected, found } => {
                write!(f, "expected {expected} sub-values, found {found}")
            }
            GenotypeViolation::Kind { part, expected, found } => {
                write!(f, "sub-encoding '{part}': expected {expected} value, found {found}")
            }
            GenotypeViolation::Length { part, expected, found } => {
                write!(f, "sub-encoding '{part}': expected length {expected}, found {found}")
            }
            GenotypeViolation::OutOfBounds {
                part,
                dimension,
                value,
                low,
                high,
            } => write!(
                f,
                "sub-encoding '{part}' dimension {dimension}: value {value} outside bounds [{low}, {high}]"
            ),
            GenotypeViolation::NotAPermutation { part } => write!(f, "sub-encoding '{part}': not a permutation"),
        }
    }
}

/// Lists every constraint `genotype` violates against `spec`; `Ok` iff there are none.
pub fn validate_genotype(spec: &MultiEncodingSpec, genotype: &Genotype) -> Result<(), Vec<GenotypeViolation>> {
    let mut out = Vec::new();
    if spec.len() != genotype.0.len() {
        out.push(GenotypeViolation::Arity {
            expected: spec.len(),
            found: genotype.0.len(),
        });
    }
    for (part, value) in spec.parts().iter().zip(&genotype.0) {
        if part.kind != value.kind() {
            out.push(GenotypeViolation::Kind {
                part: part.name.clone(),
                expected: part.kind,
                found: value.kind(),
            });
            continue;
        }
        if value.len() != part.length {
            out.push(GenotypeViolation::Length {
                part: part.name.clone(),
                expected: part.length,
                found: value.len(),
            });
        }
        match value {
            SubValue::Real(v) => {
                for (dimension, (&x, &(low, high))) in v.iter().zip(&part.bounds).enumerate() {
                    if !(low..=high).contains(&x) {
                        out.push(GenotypeViolation::OutOfBounds {
                            part: part.name.clone(),
                            dimension,
                            value: x,
                            low,
                            high,
                        });
                    }
                }
            }
            SubValue::Permutation(p) => {
                let mut seen = vec![false; p.len()];
                let valid = p
                    .iter()
                    .all(|&x| x < seen.len() && !std::mem::replace(&mut seen[x], true));
                if !valid {
                    out.push(GenotypeViolation::NotAPermutation {
                        part: part.name.clone(),
                    });
                }
            }
            SubValue::Binary(_) => {}
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
