//! Finite integer-indexed sequences `(Δ(i))` for `i ∈ [-N, N-1]`.

use std::fmt;
use std::ops::RangeInclusive;

use crate::linalg::SymMat;

/// The operations the sequence-structure code is allowed to use on entries:
/// addition, negation, a zero, and equality. Nothing else (in particular
/// no rank) is available through this trait.
pub trait GroupElement: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;

    fn is_zero_elem(&self) -> bool {
        *self == self.zero_like()
    }
}

impl GroupElement for SymMat {
    fn zero_like(&self) -> Self {
        SymMat::zero(self.dim())
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn negated(&self) -> Self {
        -self
    }

    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
}

impl GroupElement for i64 {
    fn zero_like(&self) -> Self {
        0
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn negated(&self) -> Self {
        -self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqError {
    #[error("sequence radius must be at least 1, got {0}")]
    RadiusTooSmall(i64),
    #[error("radius {radius} needs {expected} entries, got {got}")]
    WrongLength {
        radius: i64,
        expected: usize,
        got: usize,
    },
}

/// A total map `i ↦ Δ(i)` on `[-radius, radius - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seq<T> {
    radius: i64,
    entries: Vec<T>,
}

pub type DeltaSeq = Seq<SymMat>;

impl<T> Seq<T> {
    pub fn new(radius: i64, entries: Vec<T>) -> Result<Self, SeqError> {
        if radius < 1 {
            return Err(SeqError::RadiusTooSmall(radius));
        }
        let expected = 2 * radius as usize;
        if entries.len() != expected {
            return Err(SeqError::WrongLength {
                radius,
                expected,
                got: entries.len(),
            });
        }
        Ok(Self { radius, entries })
    }

    pub fn from_fn(radius: i64, f: impl FnMut(i64) -> T) -> Result<Self, SeqError> {
        if radius < 1 {
            return Err(SeqError::RadiusTooSmall(radius));
        }
        Self::new(radius, (-radius..radius).map(f).collect())
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn lo(&self) -> i64 {
        -self.radius
    }

    pub fn hi(&self) -> i64 {
        self.radius - 1
    }

    pub fn range(&self) -> RangeInclusive<i64> {
        self.lo()..=self.hi()
    }

    pub fn contains_index(&self, i: i64) -> bool {
        self.range().contains(&i)
    }

    pub fn try_get(&self, i: i64) -> Option<&T> {
        if self.contains_index(i) {
            Some(&self.entries[(i + self.radius) as usize])
        } else {
            None
        }
    }

    /// Panics when `i` is outside `[-radius, radius - 1]`.
    pub fn get(&self, i: i64) -> &T {
        self.try_get(i)
            .unwrap_or_else(|| panic!("index {i} outside [{}, {}]", self.lo(), self.hi()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.range().zip(self.entries.iter())
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Seq<U> {
        Seq {
            radius: self.radius,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Seq<T> {
    /// `i ↦ Δ(-1 - i)`, which maps the index range onto itself.
    pub fn mirrored(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.reverse();
        Self {
            radius: self.radius,
            entries,
        }
    }

    pub fn truncated(&self, radius: i64) -> Result<Self, SeqError> {
        if radius < 1 {
            return Err(SeqError::RadiusTooSmall(radius));
        }
        let radius = radius.min(self.radius);
        Seq::from_fn(radius, |i| self.get(i).clone())
    }
}

impl DeltaSeq {
    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_and_mirror() {
        let s = Seq::from_fn(3, |i| i).unwrap();
        assert_eq!(s.lo(), -3);
        assert_eq!(s.hi(), 2);
        assert_eq!(*s.get(-3), -3);
        assert_eq!(s.try_get(3), None);
        let m = s.mirrored();
        for i in s.range() {
            assert_eq!(*m.get(i), *s.get(-1 - i));
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(Seq::<i64>::new(0, vec![]), Err(SeqError::RadiusTooSmall(0)));
        assert!(matches!(
            Seq::new(2, vec![1, 2, 3]),
            Err(SeqError::WrongLength { .. })
        ));
    }
}
