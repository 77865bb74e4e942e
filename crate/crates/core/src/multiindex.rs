//! Multi-indices and the small amount of combinatorics built on them.
//!
//! A [`MultiIndex`] is a strictly increasing tuple of 1-based indices, the
//! subscript of a Plücker coordinate. All set operations return sorted,
//! duplicate-free tuples, so they can be fed straight back into equation
//! generation.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex(Vec<u32>);

/// How a multi-index is written out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexStyle {
    /// Digits concatenated, `123`. Only unambiguous while every index is below 10.
    Compact,
    /// Dot separated, `1.2.10`.
    Dotted,
}

impl IndexStyle {
    pub fn for_n(n: u32) -> Self {
        if n <= 9 {
            IndexStyle::Compact
        } else {
            IndexStyle::Dotted
        }
    }
}

impl MultiIndex {
    pub fn new(indices: Vec<u32>) -> Result<Self> {
        if indices.contains(&0) {
            return Err(Error::invalid(format!(
                "indices are 1-based, got {indices:?}"
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "multi-index must be strictly increasing, got {indices:?}"
            )));
        }
        Ok(MultiIndex(indices))
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    /// `(1, 2, ..., n)`
    pub fn range(n: u32) -> Self {
        MultiIndex((1..=n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn last_index(&self) -> Option<u32> {
        self.0.last().copied()
    }

    /// Element at 1-based position `pos`.
    pub fn get(&self, pos: usize) -> Option<u32> {
        pos.checked_sub(1).and_then(|t| self.0.get(t)).copied()
    }

    pub fn is_subset(&self, other: &MultiIndex) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn union(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .merge(other.0.iter())
                .dedup()
                .copied()
                .collect(),
        )
    }

    pub fn intersection(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn difference(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.iter().filter(|&i| !other.contains(i)).collect())
    }

    pub fn symmetric_difference(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(
            self.0
                .iter()
                .merge_join_by(other.0.iter(), |a, b| a.cmp(b))
                .filter_map(|e| match e {
                    itertools::EitherOrBoth::Both(..) => None,
                    itertools::EitherOrBoth::Left(&x) | itertools::EitherOrBoth::Right(&x) => {
                        Some(x)
                    }
                })
                .collect(),
        )
    }

    /// All sub-tuples with `m` elements, in lexicographic order.
    pub fn subsets_of_size(&self, m: usize) -> impl Iterator<Item = MultiIndex> + '_ {
        self.0.iter().copied().combinations(m).map(MultiIndex)
    }

    /// All of `I^n_size`, in lexicographic order.
    pub fn all_of_size(n: u32, size: usize) -> Vec<MultiIndex> {
        (1..=n).combinations(size).map(MultiIndex).collect()
    }

    /// Position of this tuple in the colexicographic order of `I^n_len`.
    /// Independent of `n`, so it can be used as a dense array offset.
    pub fn colex_rank(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .map(|(t, &c)| num_integer::binomial((c - 1) as usize, t + 1))
            .sum()
    }

    pub fn render(&self, style: IndexStyle) -> String {
        match style {
            IndexStyle::Compact => self.0.iter().map(|i| i.to_string()).collect(),
            IndexStyle::Dotted => self.0.iter().join("."),
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let style = if self.0.iter().all(|&i| i <= 9) {
            IndexStyle::Compact
        } else {
            IndexStyle::Dotted
        };
        f.write_str(&self.render(style))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for MultiIndex {
    type Err = Error;

    /// Accepts both `123` and `1.2.10`. The empty string is the empty tuple.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed: Option<Vec<u32>> = if s.is_empty() {
            Some(Vec::new())
        } else if s.contains('.') {
            s.split('.').map(|t| t.parse().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10)).collect()
        };
        let indices = parsed.ok_or_else(|| Error::Parse(format!("bad multi-index `{s}`")))?;
        MultiIndex::new(indices)
    }
}

impl TryFrom<Vec<u32>> for MultiIndex {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(m: MultiIndex) -> Self {
        m.0
    }
}

/// Number of pairs `(x, y)` with `x` in `a`, `y` in `b` and `x > y`.
pub fn inversion_pairs(a: &MultiIndex, b: &MultiIndex) -> usize {
    let mut below = 0;
    let mut total = 0;
    for &y in &b.0 {
        while below < a.0.len() && a.0[below] <= y {
            below += 1;
        }
        total += a.0.len() - below;
    }
    total
}

/// `n! / (parts[0]! * parts[1]! * ...)`; the parts must sum to `n`.
pub fn multinomial(n: u64, parts: &[u64]) -> Result<BigUint> {
    let sum = parts
        .iter()
        .try_fold(0u64, |acc, &x| acc.checked_add(x))
        .ok_or_else(|| Error::invalid("multinomial parts overflow"))?;
    if sum != n {
        return Err(Error::invalid(format!(
            "multinomial parts {parts:?} sum to {sum}, expected {n}"
        )));
    }
    let mut result = BigUint::one();
    let mut remaining = n;
    for &part in parts {
        result *= binomial(remaining, part);
        remaining -= part;
    }
    Ok(result)
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::default();
    }
    let k = k.min(n - k);
    let mut r = BigUint::one();
    for i in 0..k {
        r *= n - i;
        r /= i + 1;
    }
    r
}

/// Ambient dimension `n` and subspace dimension `p` of `Gr(p, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrassmannParams {
    pub n: u32,
    pub p: u32,
}

impl GrassmannParams {
    pub fn new(n: u32, p: u32) -> Result<Self> {
        if p < 1 || p > n {
            return Err(Error::invalid(format!(
                "need 1 <= p <= n, got (n,p) = ({n},{p})"
            )));
        }
        Ok(GrassmannParams { n, p })
    }

    /// Codimension of the Plücker embedding: `C(n,p) - 1 - p(n-p)`.
    pub fn grassmann_codimension(&self) -> BigInt {
        let (n, p) = (self.n as u64, self.p as u64);
        BigInt::from(binomial(n, p)) - 1 - BigInt::from(p * (n - p))
    }
}

impl fmt::Display for GrassmannParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.p)
    }
}
