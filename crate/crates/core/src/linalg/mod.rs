//! Exact linear algebra over ℚ: symmetric matrices, rank, and canonical
//! subspaces. No floating point is used anywhere in this module.

mod elim;
mod literal;
pub mod rational;
mod subspace;
mod symmat;

pub use rational::{format_rational, int, parse_rational, ratio, ParseRationalError, Rational};
pub use subspace::Subspace;
pub use symmat::SymMat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not symmetric: entry ({row}, {col}) differs from ({col}, {row})")]
    NotSymmetric { row: usize, col: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("expected a matrix of rank at most 1, found rank {rank}")]
    RankTooLarge { rank: usize },
}

pub fn rank(m: &SymMat) -> usize {
    m.rank()
}

pub fn image(m: &SymMat) -> Subspace {
    m.image()
}

pub fn kernel(m: &SymMat) -> Subspace {
    m.kernel()
}

pub fn perp(s: &Subspace) -> Subspace {
    s.perp()
}

pub fn subspace_sum(s: &Subspace, t: &Subspace) -> Result<Subspace, LinalgError> {
    s.sum(t)
}

pub fn subspace_intersection_dim(s: &Subspace, t: &Subspace) -> Result<usize, LinalgError> {
    s.intersection_dim(t)
}

/// Whether the image of a rank-≤1 matrix `b` lies in `s`.
pub fn line_contained(b: &SymMat, s: &Subspace) -> Result<bool, LinalgError> {
    if b.dim() != s.ambient_dim() {
        return Err(LinalgError::DimensionMismatch {
            left: b.dim(),
            right: s.ambient_dim(),
        });
    }
    let r = b.rank();
    if r >= 2 {
        return Err(LinalgError::RankTooLarge { rank: r });
    }
    s.contains(&b.image())
}
