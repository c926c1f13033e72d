use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest absolute input value accepted by the reductions.
pub const VALUE_BOUND: i64 = 100_000;

pub type Triple = (i64, i64, i64);

/// Three integer sets; one element is picked from each. Sorted, deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeSumInstance {
    a: Vec<i64>,
    b: Vec<i64>,
    c: Vec<i64>,
}

fn normalize(mut v: Vec<i64>) -> Result<Vec<i64>> {
    if let Some(&x) = v.iter().find(|x| x.abs() > VALUE_BOUND) {
        return Err(Error::ValueTooLarge(x, VALUE_BOUND));
    }
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

impl ThreeSumInstance {
    pub fn new(a: Vec<i64>, b: Vec<i64>, c: Vec<i64>) -> Result<Self> {
        Ok(ThreeSumInstance {
            a: normalize(a)?,
            b: normalize(b)?,
            c: normalize(c)?,
        })
    }

    /// Single-set form: `A = B = C = S`.
    pub fn from_single(s: Vec<i64>) -> Result<Self> {
        let s = normalize(s)?;
        Ok(ThreeSumInstance {
            a: s.clone(),
            b: s.clone(),
            c: s,
        })
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn c(&self) -> &[i64] {
        &self.c
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty() || self.b.is_empty() || self.c.is_empty()
    }

    pub fn largest_set(&self) -> usize {
        self.a.len().max(self.b.len()).max(self.c.len())
    }

    pub fn max_abs(&self) -> i64 {
        self.a
            .iter()
            .chain(&self.b)
            .chain(&self.c)
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    }
}

/// Sets document: either `{"A":[..],"B":[..],"C":[..]}` or `{"S":[..]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetsFile {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<i64>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<i64>>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<i64>>,
    #[serde(rename = "S", default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<i64>>,
}

impl SetsFile {
    pub fn into_instance(self) -> Result<ThreeSumInstance> {
        match self {
            SetsFile {
                s: Some(s),
                a: None,
                b: None,
                c: None,
            } => ThreeSumInstance::from_single(s),
            SetsFile {
                s: None,
                a: Some(a),
                b: Some(b),
                c: Some(c),
            } => ThreeSumInstance::new(a, b, c),
            _ => Err(Error::EmptySet),
        }
    }
}

impl From<&ThreeSumInstance> for SetsFile {
    fn from(i: &ThreeSumInstance) -> Self {
        SetsFile {
            a: Some(i.a.clone()),
            b: Some(i.b.clone()),
            c: Some(i.c.clone()),
            s: None,
        }
    }
}

/// Lexicographically smallest `(a, b, c)` with `a + b + c = 0`, by plain
/// enumeration of all triples.
pub fn solve_threesum_oracle(inst: &ThreeSumInstance) -> Option<Triple> {
    for &a in &inst.a {
        for &b in &inst.b {
            for &c in &inst.c {
                if a + b + c == 0 {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

/// Same answer as [`solve_threesum_oracle`] in quadratic time with a hash set.
pub fn solve_threesum_hashed(inst: &ThreeSumInstance) -> Option<Triple> {
    let cs: HashSet<i64> = inst.c.iter().copied().collect();
    for &a in &inst.a {
        for &b in &inst.b {
            if cs.contains(&(-a - b)) {
                return Some((a, b, -a - b));
            }
        }
    }
    None
}

/// Zero-sum triple in a single set, repeats allowed.
pub fn solve_single(s: &[i64]) -> Option<Triple> {
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    let set: HashSet<i64> = s.iter().copied().collect();
    for &a in &s {
        for &b in &s {
            if set.contains(&(-a - b)) {
                return Some((a, b, -a - b));
            }
        }
    }
    None
}

/// Single set whose zero-sum triples correspond to one-from-each triples of
/// `inst`: `A + X`, `B + 3X`, `C - 4X` with `X` above three times the
/// largest magnitude, so any other mix of sets misses zero by at least `X`.
pub fn triple_to_single(inst: &ThreeSumInstance) -> (Vec<i64>, i64) {
    let x = 3 * inst.max_abs() + 1;
    let mut s: Vec<i64> = inst
        .a
        .iter()
        .map(|v| v + x)
        .chain(inst.b.iter().map(|v| v + 3 * x))
        .chain(inst.c.iter().map(|v| v - 4 * x))
        .collect();
    s.sort_unstable();
    (s, x)
}

/// Maps a triple found by [`solve_single`] on [`triple_to_single`] output
/// back to `(a, b, c)`.
pub fn single_triple_back(t: Triple, x: i64) -> Triple {
    let mut parts = [t.0, t.1, t.2];
    parts.sort_unstable();
    // Sorted order is always C-part < A-part < B-part.
    (parts[1] - x, parts[2] - 3 * x, parts[0] + 4 * x)
}
