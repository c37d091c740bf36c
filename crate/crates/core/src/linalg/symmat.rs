use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_traits::Zero;

use super::elim;
use super::rational::{format_rational, int, Rational};
use super::subspace::Subspace;
use super::LinalgError;

/// Exact symmetric `n x n` matrix over the rationals.
///
/// Only the upper triangle is stored (row-major), so symmetry holds by
/// construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymMat {
    n: usize,
    upper: Vec<Rational>,
}

impl SymMat {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            upper: vec![Rational::zero(); n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![int(1); n])
    }

    pub fn diag(values: &[Rational]) -> Self {
        let mut m = Self::zero(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        Self { n, upper }
    }

    /// Builds from dense rows, rejecting ragged, empty or asymmetric input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(LinalgError::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate().skip(i + 1) {
                if *v != rows[j][i] {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j].clone()))
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    /// `v vᵀ`.
    pub fn outer(v: &[Rational]) -> Self {
        Self::from_fn(v.len(), |i, j| &v[i] * &v[j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(
            j < self.n,
            "index ({i}, {j}) out of bounds for n = {}",
            self.n
        );
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.upper[self.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        let k = self.index(i, j);
        self.upper[k] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            n: self.n,
            upper: self.upper.iter().map(|v| v * c).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&int(c))
    }

    pub fn rank(&self) -> usize {
        elim::rank_of_rows(&self.rows())
    }

    /// Column space; equal to the row space since the matrix is symmetric.
    pub fn image(&self) -> Subspace {
        Subspace::from_rows_unchecked(self.n, &self.rows())
    }

    pub fn kernel(&self) -> Subspace {
        let basis = elim::null_space(&self.rows(), self.n);
        Subspace::from_rows_unchecked(self.n, &basis)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_dim(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.same_dim(other)?;
        Ok(self - other)
    }

    pub fn same_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(LinalgError::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }
}

impl fmt::Debug for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", format_rational(self.get(i, j)))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<'a> Add<&'a SymMat> for &'a SymMat {
    type Output = SymMat;

    fn add(self, rhs: &'a SymMat) -> SymMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in SymMat addition");
        SymMat {
            n: self.n,
            upper: self
                .upper
                .iter()
                .zip(&rhs.upper)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a SymMat> for &'a SymMat {
    type Output = SymMat;

    fn sub(self, rhs: &'a SymMat) -> SymMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in SymMat subtraction");
        SymMat {
            n: self.n,
            upper: self
                .upper
                .iter()
                .zip(&rhs.upper)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Add for SymMat {
    type Output = SymMat;

    fn add(self, rhs: SymMat) -> SymMat {
        &self + &rhs
    }
}

impl Sub for SymMat {
    type Output = SymMat;

    fn sub(self, rhs: SymMat) -> SymMat {
        &self - &rhs
    }
}

impl AddAssign<&SymMat> for SymMat {
    fn add_assign(&mut self, rhs: &SymMat) {
        assert_eq!(self.n, rhs.n, "dimension mismatch in SymMat addition");
        for (a, b) in self.upper.iter_mut().zip(&rhs.upper) {
            *a += b;
        }
    }
}

impl SubAssign<&SymMat> for SymMat {
    fn sub_assign(&mut self, rhs: &SymMat) {
        assert_eq!(self.n, rhs.n, "dimension mismatch in SymMat subtraction");
        for (a, b) in self.upper.iter_mut().zip(&rhs.upper) {
            *a -= b;
        }
    }
}

impl Neg for &SymMat {
    type Output = SymMat;

    fn neg(self) -> SymMat {
        SymMat {
            n: self.n,
            upper: self.upper.iter().map(|v| -v).collect(),
        }
    }
}

impl Neg for SymMat {
    type Output = SymMat;

    fn neg(self) -> SymMat {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn storage_is_symmetric() {
        let m = SymMat::from_int_rows(&[&[1, 2, 3], &[2, 4, 5], &[3, 5, 6]]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        assert_eq!(*m.get(1, 2), int(5));
        assert_eq!(*m.get(2, 2), int(6));
        assert_eq!(m.rows()[2], vec![int(3), int(5), int(6)]);
    }

    #[test]
    fn rejects_asymmetric_and_ragged_rows() {
        assert_eq!(
            SymMat::from_int_rows(&[&[1, 2], &[3, 4]]),
            Err(LinalgError::NotSymmetric { row: 0, col: 1 })
        );
        assert!(matches!(
            SymMat::from_int_rows(&[&[1, 2], &[2]]),
            Err(LinalgError::NotSquare { row: 1, .. })
        ));
        assert_eq!(SymMat::from_rows(vec![]), Err(LinalgError::EmptyMatrix));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(SymMat::zero(3).rank(), 0);
        assert_eq!(SymMat::diag(&[int(1), int(2), int(0)]).rank(), 2);
        let m = SymMat::from_int_rows(&[&[2, 1, 0], &[1, 1, 0], &[0, 0, 0]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn arithmetic_is_exact() {
        let a = SymMat::from_int_rows(&[&[1, 2], &[2, 3]]).unwrap();
        let b = a.scale(&super::super::rational::ratio(1, 3));
        assert_eq!(&b.scale_int(3) - &a, SymMat::zero(2));
        assert_eq!(-(-a.clone()), a);
        assert!(a.checked_add(&SymMat::zero(3)).is_err());
    }
}
