use num_traits::Zero;

use super::elim;
use super::rational::Rational;
use super::LinalgError;

/// A linear subspace of `ℚⁿ`, stored as the reduced row echelon basis.
///
/// The representation is canonical: two subspaces are equal iff their
/// bases are identical, so `PartialEq` is subspace equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Rational::from_integer(1.into())
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            ambient_dim: n,
            basis,
        }
    }

    pub fn span(n: usize, vectors: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != n) {
            return Err(LinalgError::DimensionMismatch {
                left: n,
                right: v.len(),
            });
        }
        Ok(Self::from_rows_unchecked(n, vectors))
    }

    pub(crate) fn from_rows_unchecked(n: usize, rows: &[Vec<Rational>]) -> Self {
        let (basis, _) = elim::rref(rows, n);
        Self {
            ambient_dim: n,
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn check_ambient(&self, other: &Self) -> Result<(), LinalgError> {
        if self.ambient_dim == other.ambient_dim {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            })
        }
    }

    /// Orthogonal complement for `(x, y) = x₁y₁ + … + xₙyₙ`.
    pub fn perp(&self) -> Self {
        let basis = elim::null_space(&self.basis, self.ambient_dim);
        Self::from_rows_unchecked(self.ambient_dim, &basis)
    }

    pub fn sum(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_ambient(other)?;
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Ok(Self::from_rows_unchecked(self.ambient_dim, &rows))
    }

    pub fn intersection_dim(&self, other: &Self) -> Result<usize, LinalgError> {
        let sum = self.sum(other)?;
        Ok(self.dim() + other.dim() - sum.dim())
    }

    pub fn contains_vector(&self, v: &[Rational]) -> Result<bool, LinalgError> {
        if v.len() != self.ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.ambient_dim,
                right: v.len(),
            });
        }
        if elim::is_zero_vector(v) {
            return Ok(true);
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Ok(elim::rank_of_rows(&rows) == self.dim())
    }

    pub fn contains(&self, other: &Self) -> Result<bool, LinalgError> {
        Ok(self.sum(other)?.dim() == self.dim())
    }

    /// Every basis vector of `self` is orthogonal to every vector of `other`.
    pub fn is_orthogonal_to(&self, other: &Self) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        Ok(self
            .basis
            .iter()
            .all(|a| other.basis.iter().all(|b| elim::dot(a, b).is_zero())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn perp_examples() {
        let e1 = Subspace::span(3, &[v(&[1, 0, 0])]).unwrap();
        assert_eq!(
            e1.perp(),
            Subspace::span(3, &[v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap()
        );
        assert_eq!(Subspace::zero(4).perp(), Subspace::full(4));
        let diag = Subspace::span(2, &[v(&[1, 1])]).unwrap();
        assert_eq!(diag.perp(), Subspace::span(2, &[v(&[1, -1])]).unwrap());
    }

    #[test]
    fn sum_and_intersection() {
        let e1 = Subspace::span(3, &[v(&[1, 0, 0])]).unwrap();
        let e2 = Subspace::span(3, &[v(&[0, 1, 0])]).unwrap();
        let e12 = e1.sum(&e2).unwrap();
        assert_eq!(e12.dim(), 2);
        assert_eq!(e1.sum(&Subspace::zero(3)).unwrap(), e1);
        let l = Subspace::span(3, &[v(&[1, 1, 0])]).unwrap();
        assert_eq!(l.sum(&e1).unwrap(), e12);
        assert_eq!(e1.intersection_dim(&e2).unwrap(), 0);
        assert_eq!(e12.intersection_dim(&e12).unwrap(), 2);
        assert_eq!(l.intersection_dim(&e12).unwrap(), 1);
    }

    #[test]
    fn mismatched_ambient_dims_are_errors() {
        let a = Subspace::zero(2);
        let b = Subspace::zero(3);
        assert!(a.sum(&b).is_err());
        assert!(a.intersection_dim(&b).is_err());
        assert!(Subspace::span(2, &[v(&[1, 2, 3])]).is_err());
    }

    #[test]
    fn containment() {
        let l = Subspace::span(3, &[v(&[1, 2, 3])]).unwrap();
        assert!(l.contains_vector(&v(&[-2, -4, -6])).unwrap());
        assert!(!l.contains_vector(&v(&[1, 0, 0])).unwrap());
        assert!(Subspace::full(3).contains(&l).unwrap());
        assert!(!l.contains(&Subspace::full(3)).unwrap());
    }
}
