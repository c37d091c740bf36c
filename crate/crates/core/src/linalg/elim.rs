//! Row reduction over the rationals.
//!
//! Rank uses fraction-free (Bareiss) elimination on an integer copy of the
//! rows; the canonical subspace form uses Gauss-Jordan over `Rational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::rational::Rational;

/// Scale every row by the lcm of its denominators. Row scaling by a nonzero
/// factor preserves the row space, so rank and span are unchanged.
fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
        })
        .collect()
}

pub fn rank_of_rows(rows: &[Vec<Rational>]) -> usize {
    let ints = integer_rows(rows);
    let small: Option<Vec<Vec<i128>>> = ints
        .iter()
        .map(|row| row.iter().map(|v| v.to_i64().map(i128::from)).collect())
        .collect();
    if let Some(mut small) = small {
        if let Some(r) = bareiss_rank_i128(&mut small) {
            return r;
        }
    }
    bareiss_rank_big(ints)
}

/// Returns `None` on overflow; the caller then falls back to `BigInt`.
fn bareiss_rank_i128(m: &mut [Vec<i128>]) -> Option<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev: i128 = 1;
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, below) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let p = pivot_row[col];
        for row in below {
            let f = row[col];
            for (x, &y) in row[col + 1..].iter_mut().zip(&pivot_row[col + 1..]) {
                *x = p.checked_mul(*x)?.checked_sub(f.checked_mul(y)?)? / prev;
            }
            row[col] = 0;
        }
        prev = p;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_rank_big(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, below) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let p = pivot_row[col].clone();
        for row in below {
            let f = row[col].clone();
            for (x, y) in row[col + 1..].iter_mut().zip(&pivot_row[col + 1..]) {
                *x = (&p * &*x - &f * y) / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = p;
        rank += 1;
    }
    rank
}

/// Reduced row echelon form with zero rows dropped. Pivots are 1 and every
/// pivot column is zero outside its pivot row, so the result is a canonical
/// basis of the row space.
pub fn rref(rows: &[Vec<Rational>], cols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == m.len() {
            break;
        }
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = m[rank][col].recip();
        for v in m[rank].iter_mut().skip(col) {
            *v = &*v * &inv;
        }
        let pivot_row = m[rank][col..cols].to_vec();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row[col..cols].iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    m.truncate(rank);
    debug_assert!(m.iter().all(|row| row.iter().any(|v| !v.is_zero())));
    (m, pivots)
}

/// Null space basis of the given rows (vectors `v` with `row · v = 0`).
pub fn null_space(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(rows, cols);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (row, &pc) in r.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
