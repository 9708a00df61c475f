//! Multi-indices on `ℕ^d` and rectangular boxes of them.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// A point `n = (n_1, …, n_d)` of `ℕ^d`; components start at 1 for box
/// corners but zero components are allowed for powers `T^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(components: Vec<usize>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("multi-index needs d >= 1".into()));
        }
        Ok(MultiIndex(components))
    }

    /// Like [`MultiIndex::new`] but additionally requires every component ≥ 1.
    pub fn positive(components: Vec<usize>) -> Result<Self> {
        if components.contains(&0) {
            return Err(Error::Domain("multi-index components must be >= 1".into()));
        }
        Self::new(components)
    }

    /// `(n, n, …, n)` in dimension `d`.
    pub fn diagonal(n: usize, d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        MultiIndex(alloc::vec![n; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[usize] {
        &self.0
    }

    /// `m(n) = min{n_1, …, n_d}`.
    pub fn min_component(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }

    /// `M(n) = max{n_1, …, n_d}`.
    pub fn max_component(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `|n| = n_1 ⋯ n_d`, saturating on overflow.
    pub fn volume(&self) -> u128 {
        self.0
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 1)
    }

    pub fn checked_add(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if self.dim() != other.dim() {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(value: MultiIndex) -> Self {
        value.0
    }
}

/// The lattice points between two corners, inclusive.
///
/// Iteration is lexicographic with the last coordinate varying fastest; the
/// same order is used for flat storage everywhere in the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexBox {
    lower: MultiIndex,
    upper: MultiIndex,
}

impl IndexBox {
    pub fn new(lower: MultiIndex, upper: MultiIndex) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::Structural(alloc::format!(
                "box corners have dimensions {} and {}",
                lower.dim(),
                upper.dim()
            )));
        }
        if !lower.is_positive() {
            return Err(Error::Domain("box lower corner must be >= 1".into()));
        }
        if lower.0.iter().zip(&upper.0).any(|(l, u)| l > u) {
            return Err(Error::Domain(alloc::format!(
                "box lower corner {lower} exceeds upper corner {upper}"
            )));
        }
        Ok(IndexBox { lower, upper })
    }

    /// `[1, N]` in every coordinate.
    pub fn from_origin(upper: MultiIndex) -> Result<Self> {
        let lower = MultiIndex::diagonal(1, upper.dim());
        Self::new(lower, upper)
    }

    /// The cube `[m, n]^d`; its points are exactly `Λ_{[m,n]}`.
    pub fn cube(m: usize, n: usize, d: usize) -> Result<Self> {
        Self::new(MultiIndex::diagonal(m, d), MultiIndex::diagonal(n, d))
    }

    pub fn lower(&self) -> &MultiIndex {
        &self.lower
    }

    pub fn upper(&self) -> &MultiIndex {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    /// Side lengths.
    pub fn shape(&self) -> Vec<usize> {
        self.lower
            .0
            .iter()
            .zip(&self.upper.0)
            .map(|(l, u)| u - l + 1)
            .collect()
    }

    pub fn len(&self) -> u128 {
        self.shape()
            .iter()
            .fold(1u128, |acc, &s| acc.saturating_mul(s as u128))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k: &MultiIndex) -> bool {
        k.dim() == self.dim()
            && k.0
                .iter()
                .zip(self.lower.0.iter().zip(&self.upper.0))
                .all(|(c, (l, u))| l <= c && c <= u)
    }

    /// Position of `k` in lexicographic order, if inside.
    pub fn position(&self, k: &MultiIndex) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        let shape = self.shape();
        let mut pos = 0usize;
        for ((c, l), s) in k.0.iter().zip(&self.lower.0).zip(&shape) {
            pos = pos * s + (c - l);
        }
        Some(pos)
    }

    pub fn iter(&self) -> BoxIter<'_> {
        BoxIter {
            bx: self,
            next: Some(self.lower.0.clone()),
        }
    }
}

pub struct BoxIter<'a> {
    bx: &'a IndexBox,
    next: Option<Vec<usize>>,
}

impl Iterator for BoxIter<'_> {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut axis = succ.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            if succ[axis] < self.bx.upper.0[axis] {
                succ[axis] += 1;
                self.next = Some(succ);
                break;
            }
            succ[axis] = self.bx.lower.0[axis];
        }
        Some(MultiIndex(current))
    }
}

/// `Λ_{[m,n]} = {k ∈ ℕ^d : m ≤ m(k), M(k) ≤ n}` in lexicographic order.
///
/// Returns an empty list when `m > n`.
pub fn lambda_box(m: usize, n: usize, d: usize) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    if m == 0 {
        return Err(Error::Domain("Λ box needs m >= 1".into()));
    }
    if m > n {
        return Ok(Vec::new());
    }
    Ok(IndexBox::cube(m, n, d)?.iter().collect())
}
