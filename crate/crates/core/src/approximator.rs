//! Synthesis and certification of the approximating homomorphism
//! `x ↦ x·A` for a 1-quasihomomorphism window.
//!
//! Pipeline: normalize so `g(1) = 0`, take the delta sequence, find the
//! first `m` where the lines `L_{-m-1}, …, L_{-2}, L_1, …, L_m` span three
//! dimensions, detect the minimal APAP period `p | m + 1`, and set
//! `A_g = g(p-1)/p` (or `A_g = 0` when the lines never reach dimension 3).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apap::{is_apap, ApapError};
use crate::linalg::{ratio, LinalgError, Subspace, SymMat};
use crate::quasihom::{self, verify_delta_form, DefectReport, QuasiHomWindow};
use crate::seq::DeltaSeq;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApproxError {
    #[error("Δ({index}) has rank {rank}; every delta of a normalized 1-quasihomomorphism has rank at most 1")]
    DeltaRank { index: i64, rank: usize },
    #[error("m = {m} needs indices in [{}, {m}], outside the sequence range", -m - 1)]
    OutOfRange { m: i64 },
    #[error("window is not a 1-quasihomomorphism: defect rank {} at {}", .report.c_measured, pair_text(.report.witness))]
    NotQuasihom { report: DefectReport },
    #[error("no divisor of m + 1 = {} is an APAP period of the window", .m + 1)]
    NoApapPeriod { m: i64 },
    #[error(
        "window radius {radius} is too small: structure detection at m = {m} needs N >= {required}"
    )]
    Inconclusive { m: i64, radius: i64, required: i64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Apap(#[from] ApapError),
}

fn pair_text(w: Option<(i64, i64)>) -> String {
    w.map_or_else(|| "no pair".into(), |(x, y)| format!("({x}, {y})"))
}

/// Whether the caller asked for the 1-quasihomomorphism check to be
/// skipped (only meaningful for synthetic sequences).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Check,
    Bypass,
}

/// `L_i = im Δ(i)`.
pub fn line_of(d: &DeltaSeq, i: i64) -> Result<Subspace, ApproxError> {
    let m = d.try_get(i).ok_or(ApproxError::OutOfRange { m: i })?;
    let rank = m.rank();
    if rank >= 2 {
        return Err(ApproxError::DeltaRank { index: i, rank });
    }
    Ok(m.image())
}

fn vm_indices(m: i64) -> impl Iterator<Item = i64> {
    (-m - 1..=-2).chain(1..=m)
}

/// `dim V_m` with `V_m = L_{-m-1} + … + L_{-2} + L_1 + … + L_m`.
pub fn vm_dim(d: &DeltaSeq, m: i64) -> Result<usize, ApproxError> {
    if m < 0 || -m - 1 < d.lo() || m > d.hi() {
        return Err(ApproxError::OutOfRange { m });
    }
    let mut v = Subspace::zero(d.dim());
    for i in vm_indices(m) {
        v = v.sum(&line_of(d, i)?)?;
    }
    Ok(v.dim())
}

/// `dim V_m` for every `m` in `0..=N-1`, built incrementally.
pub fn line_dims(d: &DeltaSeq) -> Result<Vec<usize>, ApproxError> {
    let mut v = Subspace::zero(d.dim());
    let mut dims = vec![0];
    for m in 1..=d.hi() {
        let grown = if m == 1 {
            line_of(d, -2)?.sum(&line_of(d, 1)?)?
        } else {
            line_of(d, -m - 1)?.sum(&line_of(d, m)?)?
        };
        v = v.sum(&grown)?;
        dims.push(v.dim());
    }
    Ok(dims)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FindingKind {
    Degenerate,
    Structured,
    Inconclusive,
    NotQuasihom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFinding {
    pub kind: FindingKind,
    pub m: Option<i64>,
    pub p: Option<i64>,
    /// `dim V_m` for `m = 0, 1, …` while the lines stay rank ≤ 1.
    pub line_dims: Vec<usize>,
    pub unverified: bool,
    /// Smallest radius that would allow structure detection (Inconclusive).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub required_n: Option<i64>,
    #[serde(rename = "window_N")]
    pub window_n: i64,
}

/// Smallest `m ≥ 1` with `dim V_m ≥ 3`, or `None` when the window never
/// reaches three dimensions.
pub fn find_minimal_m(d: &DeltaSeq) -> Result<(Option<i64>, Vec<usize>), ApproxError> {
    let dims = line_dims(d)?;
    let m = dims.iter().position(|&k| k >= 3).map(|m| m as i64);
    Ok((m, dims))
}

fn divisors(n: i64) -> impl Iterator<Item = i64> {
    (2..=n).filter(move |p| n % p == 0)
}

pub fn detect_structure(
    d: &DeltaSeq,
    verification: Verification,
) -> Result<StructureFinding, ApproxError> {
    let unverified = verification == Verification::Bypass;
    if !unverified && !verify_delta_form(d, 1) {
        return Ok(StructureFinding {
            kind: FindingKind::NotQuasihom,
            m: None,
            p: None,
            line_dims: Vec::new(),
            unverified,
            required_n: None,
            window_n: d.radius(),
        });
    }
    detect_unchecked(d, unverified)
}

fn detect_unchecked(d: &DeltaSeq, unverified: bool) -> Result<StructureFinding, ApproxError> {
    let (m, line_dims) = find_minimal_m(d)?;
    let mut finding = StructureFinding {
        kind: FindingKind::Degenerate,
        m,
        p: None,
        line_dims,
        unverified,
        required_n: None,
        window_n: d.radius(),
    };
    let Some(m) = m else {
        return Ok(finding);
    };
    if d.radius() < m + 2 {
        finding.kind = FindingKind::Inconclusive;
        finding.required_n = Some(m + 2);
        return Ok(finding);
    }
    for p in divisors(m + 1) {
        if is_apap(d, p)? {
            finding.kind = FindingKind::Structured;
            finding.p = Some(p);
            return Ok(finding);
        }
    }
    finding.kind = FindingKind::NotQuasihom;
    Ok(finding)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertPeriod {
    Degenerate,
    Period(i64),
    /// Standalone certification of a caller-supplied `A`.
    Unspecified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxCertificate {
    pub a: SymMat,
    pub period: CertPeriod,
    pub per_x_rank: BTreeMap<i64, usize>,
    pub max_rank: usize,
    pub window_n: i64,
    pub bound_satisfied: bool,
}

/// `rank(f(x) - x·A)` for every window point, compared against `bound`.
pub fn certify(
    f: &QuasiHomWindow,
    a: &SymMat,
    bound: usize,
) -> Result<ApproxCertificate, ApproxError> {
    if f.dim() != a.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: f.dim(),
            right: a.dim(),
        }
        .into());
    }
    let r = f.radius();
    let per_x_rank: BTreeMap<i64, usize> = (-r..=r)
        .into_par_iter()
        .map(|x| (x, (f.get(x) - &a.scale_int(x)).rank()))
        .collect();
    let max_rank = per_x_rank.values().copied().max().unwrap_or(0);
    Ok(ApproxCertificate {
        a: a.clone(),
        period: CertPeriod::Unspecified,
        per_x_rank,
        max_rank,
        window_n: r,
        bound_satisfied: max_rank <= bound,
    })
}

pub const THEOREM_BOUND: usize = 2;

/// Full pipeline with the 1-quasihomomorphism check.
pub fn approximate(f: &QuasiHomWindow) -> Result<ApproxCertificate, ApproxError> {
    approximate_with(f, Verification::Check)
}

pub fn approximate_with(
    f: &QuasiHomWindow,
    verification: Verification,
) -> Result<ApproxCertificate, ApproxError> {
    if verification == Verification::Check {
        let report = quasihom::verify_direct(f, 1);
        if !report.satisfied {
            return Err(ApproxError::NotQuasihom { report });
        }
    }
    let (g, c) = quasihom::normalize(f);
    let d = quasihom::delta(&g);
    let finding = detect_unchecked(&d, verification == Verification::Bypass)?;
    let (a_g, period) = match finding.kind {
        FindingKind::Degenerate => (SymMat::zero(f.dim()), CertPeriod::Degenerate),
        FindingKind::Structured => {
            let p = finding.p.expect("structured finding carries p");
            (g.get(p - 1).scale(&ratio(1, p)), CertPeriod::Period(p))
        }
        FindingKind::Inconclusive => {
            let m = finding.m.expect("inconclusive finding carries m");
            return Err(ApproxError::Inconclusive {
                m,
                radius: f.radius(),
                required: m + 2,
            });
        }
        FindingKind::NotQuasihom => {
            return Err(ApproxError::NoApapPeriod {
                m: finding.m.expect("m is set once lines reach dimension 3"),
            })
        }
    };
    // f(x) - x·A = g(x) - x·A_g with A = A_g - C
    let a = &a_g - &c;
    let mut cert = certify(f, &a, THEOREM_BOUND)?;
    cert.period = period;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, Rational};
    use crate::seq::Seq;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn e(n: usize, k: usize) -> SymMat {
        let mut u = vec![0; n];
        u[k] = 1;
        SymMat::outer(&v(&u))
    }

    #[test]
    fn line_of_examples() {
        let u = v(&[1, 2, 0]);
        let d = Seq::from_fn(3, |i| match i {
            0 => SymMat::outer(&u),
            1 => SymMat::outer(&u).scale_int(3),
            2 => SymMat::identity(3),
            _ => SymMat::zero(3),
        })
        .unwrap();
        assert!(line_of(&d, -1).unwrap().is_zero());
        let l = Subspace::span(3, std::slice::from_ref(&u)).unwrap();
        assert_eq!(line_of(&d, 0).unwrap(), l);
        assert_eq!(line_of(&d, 1).unwrap(), l);
        assert_eq!(
            line_of(&d, 2),
            Err(ApproxError::DeltaRank { index: 2, rank: 3 })
        );
    }

    #[test]
    fn vm_dim_examples() {
        let zero = Seq::from_fn(4, |_| SymMat::zero(3)).unwrap();
        for m in 0..=3 {
            assert_eq!(vm_dim(&zero, m).unwrap(), 0);
        }
        let d = Seq::from_fn(4, |i| match i {
            1 => e(3, 0),
            -2 => e(3, 1),
            _ => SymMat::zero(3),
        })
        .unwrap();
        assert_eq!(vm_dim(&d, 1).unwrap(), 2);
        assert_eq!(vm_dim(&d, 4), Err(ApproxError::OutOfRange { m: 4 }));
    }

    #[test]
    fn minimal_m_of_three_coordinate_lines() {
        let d = Seq::from_fn(6, |i| match i {
            1 => e(3, 0),
            2 => e(3, 1),
            3 => e(3, 2),
            _ => SymMat::zero(3),
        })
        .unwrap();
        assert_eq!(find_minimal_m(&d).unwrap().0, Some(3));
        assert_eq!(line_dims(&d).unwrap()[..4], [0, 1, 2, 3]);
        for m in 0..=5 {
            assert_eq!(line_dims(&d).unwrap()[m as usize], vm_dim(&d, m).unwrap());
        }
    }

    #[test]
    fn zero_sequence_is_degenerate() {
        let zero = Seq::from_fn(5, |_| SymMat::zero(2)).unwrap();
        let f = detect_structure(&zero, Verification::Check).unwrap();
        assert_eq!(f.kind, FindingKind::Degenerate);
        assert!(!f.unverified);
    }

    #[test]
    fn homomorphism_is_recovered() {
        let a0 = SymMat::from_int_rows(&[&[1, -2, 0], &[-2, 3, 1], &[0, 1, 5]]).unwrap();
        let f = QuasiHomWindow::homomorphism(&a0, 5).unwrap();
        let cert = approximate(&f).unwrap();
        assert_eq!(cert.a, a0);
        assert_eq!(cert.max_rank, 0);
        assert_eq!(cert.period, CertPeriod::Degenerate);
    }

    #[test]
    fn certify_detects_wrong_a() {
        let a0 = SymMat::identity(3);
        let f = QuasiHomWindow::homomorphism(&a0, 4).unwrap();
        let ok = certify(&f, &a0, 0).unwrap();
        assert!(ok.bound_satisfied);
        let bad = certify(&f, &SymMat::zero(3), 2).unwrap();
        assert!(!bad.bound_satisfied);
        assert_eq!(bad.max_rank, 3);
        assert_eq!(bad.per_x_rank[&0], 0);
        assert!(certify(&f, &SymMat::zero(2), 2).is_err());
    }

    #[test]
    fn not_quasihom_is_rejected() {
        let f = QuasiHomWindow::from_fn(2, 3, |x| SymMat::identity(2).scale_int(x * x)).unwrap();
        assert!(matches!(
            approximate(&f),
            Err(ApproxError::NotQuasihom { .. })
        ));
    }
}
