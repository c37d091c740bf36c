//! Finite windows of maps `f: ℤ → Sym(n×n, ℚ)`, their delta sequences, and
//! the two equivalent forms of the c-quasihomomorphism check.
//!
//! Every verdict here is about the window `[-N, N]` only.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::SymMat;
use crate::seq::{DeltaSeq, Seq, SeqError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WindowError {
    #[error("window radius must be at least 1, got {0}")]
    RadiusTooSmall(i64),
    #[error("matrix dimension must be at least 1")]
    ZeroDimension,
    #[error("radius {radius} needs {expected} values, got {got}")]
    WrongLength {
        radius: i64,
        expected: usize,
        got: usize,
    },
    #[error("value at x = {x} has dimension {got}, expected {expected}")]
    DimensionMismatch { x: i64, expected: usize, got: usize },
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// The values `f(x)` for every `x ∈ [-N, N]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiHomWindow {
    n: usize,
    radius: i64,
    values: Vec<SymMat>,
}

impl QuasiHomWindow {
    pub fn new(n: usize, radius: i64, values: Vec<SymMat>) -> Result<Self, WindowError> {
        if n == 0 {
            return Err(WindowError::ZeroDimension);
        }
        if radius < 1 {
            return Err(WindowError::RadiusTooSmall(radius));
        }
        let expected = 2 * radius as usize + 1;
        if values.len() != expected {
            return Err(WindowError::WrongLength {
                radius,
                expected,
                got: values.len(),
            });
        }
        if let Some((k, m)) = values.iter().enumerate().find(|(_, m)| m.dim() != n) {
            return Err(WindowError::DimensionMismatch {
                x: k as i64 - radius,
                expected: n,
                got: m.dim(),
            });
        }
        Ok(Self { n, radius, values })
    }

    pub fn from_fn(
        n: usize,
        radius: i64,
        f: impl FnMut(i64) -> SymMat,
    ) -> Result<Self, WindowError> {
        if radius < 1 {
            return Err(WindowError::RadiusTooSmall(radius));
        }
        Self::new(n, radius, (-radius..=radius).map(f).collect())
    }

    /// `x ↦ x·a`.
    pub fn homomorphism(a: &SymMat, radius: i64) -> Result<Self, WindowError> {
        Self::from_fn(a.dim(), radius, |x| a.scale_int(x))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn contains(&self, x: i64) -> bool {
        (-self.radius..=self.radius).contains(&x)
    }

    /// Panics when `x` lies outside the window.
    pub fn get(&self, x: i64) -> &SymMat {
        assert!(
            self.contains(x),
            "x = {x} outside window of radius {}",
            self.radius
        );
        &self.values[(x + self.radius) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &SymMat)> {
        (-self.radius..=self.radius).zip(self.values.iter())
    }

    /// `f(x + y) - f(x) - f(y)`; `None` if any argument leaves the window.
    pub fn defect(&self, x: i64, y: i64) -> Option<SymMat> {
        if !(self.contains(x) && self.contains(y) && self.contains(x + y)) {
            return None;
        }
        let mut d = self.get(x + y).clone();
        d -= self.get(x);
        d -= self.get(y);
        Some(d)
    }

    pub fn truncated(&self, radius: i64) -> Result<Self, WindowError> {
        let radius = radius.min(self.radius);
        Self::from_fn(self.n, radius, |x| self.get(x).clone())
    }
}

/// Shift by a homomorphism so that `g(1) = 0`. Returns `(g, C)` with
/// `C = -f(1)` and `g(x) = f(x) + x·C`.
pub fn normalize(f: &QuasiHomWindow) -> (QuasiHomWindow, SymMat) {
    let c = -f.get(1);
    let values = f.iter().map(|(x, v)| v + &c.scale_int(x)).collect();
    let g = QuasiHomWindow {
        n: f.n,
        radius: f.radius,
        values,
    };
    (g, c)
}

/// `Δ(i) = g(i + 1) - g(i)` for `i ∈ [-N, N-1]`.
pub fn delta(g: &QuasiHomWindow) -> DeltaSeq {
    Seq::from_fn(g.radius, |i| g.get(i + 1) - g.get(i)).expect("window radius is at least 1")
}

/// The unique window `g` with `g(1) = 0` and `delta(g) = d`.
pub fn reconstruct(d: &DeltaSeq) -> QuasiHomWindow {
    let n = d.dim();
    let radius = d.radius();
    let mut values = vec![SymMat::zero(n); 2 * radius as usize + 1];
    let at = |x: i64| (x + radius) as usize;
    // g(x) = Δ(1) + … + Δ(x-1) for x ≥ 1
    for x in 2..=radius {
        values[at(x)] = &values[at(x - 1)] + d.get(x - 1);
    }
    // g(x) = -(Δ(x) + … + Δ(0)) for x ≤ 0
    for x in (-radius..=0).rev() {
        values[at(x)] = &values[at(x + 1)] - d.get(x);
    }
    QuasiHomWindow { n, radius, values }
}

/// Outcome of the direct defect scan over every `(x, y)` with `x`, `y`,
/// `x + y` in the window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectReport {
    pub c_measured: usize,
    /// Lexicographically smallest pair attaining `c_measured`.
    pub witness: Option<(i64, i64)>,
    pub pair_count: usize,
    pub bound: usize,
    pub satisfied: bool,
    #[serde(rename = "window_N")]
    pub window_n: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Best {
    rank: usize,
    pair: (i64, i64),
}

fn better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => match a.rank.cmp(&b.rank) {
            Ordering::Greater => Some(a),
            Ordering::Less => Some(b),
            Ordering::Equal => Some(if a.pair <= b.pair { a } else { b }),
        },
    }
}

/// Scans every admissible pair. The defect is symmetric in `(x, y)`, so only
/// `x ≤ y` is ranked; the smallest witness always has `x ≤ y`.
pub fn verify_direct(f: &QuasiHomWindow, c: usize) -> DefectReport {
    let r = f.radius;
    let per_x: Vec<Option<Best>> = (-r..=r)
        .into_par_iter()
        .map(|x| {
            let y_lo = x.max(-r - x);
            let y_hi = r.min(r - x);
            let mut best = None;
            for y in y_lo..=y_hi {
                let rank = f.defect(x, y).expect("pair inside window").rank();
                best = better(best, Some(Best { rank, pair: (x, y) }));
            }
            best
        })
        .collect();
    let best = per_x.into_iter().fold(None, better);
    let pair_count = (-r..=r)
        .map(|x| (r.min(r - x) - (-r).max(-r - x) + 1) as usize)
        .sum();
    let c_measured = best.map_or(0, |b| b.rank);
    DefectReport {
        c_measured,
        witness: best.map(|b| b.pair),
        pair_count,
        bound: c,
        satisfied: c_measured <= c,
        window_n: r,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaFamily {
    /// `Σ_{i=1}^{k} Δ(i) - Σ_{i=0}^{k} Δ(z-i)`, equal to `-(defect at (k+1, z-k))`.
    Positive,
    /// `Σ_{i=0}^{k} Δ(-i) - Σ_{i=0}^{k-1} Δ(z-i)`, equal to `defect at (-k, z+1)`.
    Negative,
}

/// Family, `k` and `z` of a maximizing delta-form sum.
pub type DeltaWitness = (DeltaFamily, i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaFormReport {
    pub max_rank: usize,
    pub witness: Option<DeltaWitness>,
    pub checked: usize,
}

/// Prefix sums: `sum(a, b) = Δ(a) + … + Δ(b)`, zero when `a > b`.
struct Prefix {
    lo: i64,
    acc: Vec<SymMat>,
}

impl Prefix {
    fn new(d: &DeltaSeq) -> Self {
        let mut acc = Vec::with_capacity(d.entries().len() + 1);
        acc.push(SymMat::zero(d.dim()));
        for (_, v) in d.iter() {
            let next = acc.last().expect("nonempty") + v;
            acc.push(next);
        }
        Self { lo: d.lo(), acc }
    }

    fn sum(&self, a: i64, b: i64) -> SymMat {
        if a > b {
            return SymMat::zero(self.acc[0].dim());
        }
        &self.acc[(b - self.lo + 1) as usize] - &self.acc[(a - self.lo) as usize]
    }
}

/// Largest rank over both inequality families, restricted to `(k, z)` whose
/// touched indices all lie in the sequence range.
pub fn delta_form_defect(d: &DeltaSeq) -> DeltaFormReport {
    let (lo, hi) = (d.lo(), d.hi());
    let prefix = Prefix::new(d);
    let mut jobs: Vec<(DeltaFamily, i64)> = Vec::new();
    // positive family: indices 1..=k and z-k..=z
    for k in 0..=hi {
        jobs.push((DeltaFamily::Positive, k));
    }
    // negative family: indices -k..=0 and z-k+1..=z
    for k in 0..=-lo {
        jobs.push((DeltaFamily::Negative, k));
    }
    let results: Vec<(usize, Option<DeltaWitness>, usize)> = jobs
        .par_iter()
        .map(|&(family, k)| {
            let mut best: (usize, Option<DeltaWitness>) = (0, None);
            let mut checked = 0;
            let (fixed, z_range) = match family {
                DeltaFamily::Positive => (prefix.sum(1, k), (lo + k)..=hi),
                DeltaFamily::Negative if k == 0 => (prefix.sum(0, 0), hi..=hi),
                DeltaFamily::Negative => (prefix.sum(-k, 0), (lo + k - 1)..=hi),
            };
            for z in z_range {
                let moving = match family {
                    DeltaFamily::Positive => prefix.sum(z - k, z),
                    DeltaFamily::Negative => prefix.sum(z - k + 1, z),
                };
                let rank = (&fixed - &moving).rank();
                checked += 1;
                if best.1.is_none() || rank > best.0 {
                    best = (rank, Some((family, k, z)));
                }
            }
            (best.0, best.1, checked)
        })
        .collect();
    let mut report = DeltaFormReport {
        max_rank: 0,
        witness: None,
        checked: 0,
    };
    for (rank, witness, checked) in results {
        report.checked += checked;
        if witness.is_some() && (report.witness.is_none() || rank > report.max_rank) {
            report.max_rank = rank;
            report.witness = witness;
        }
    }
    report
}

pub fn verify_delta_form(d: &DeltaSeq, c: usize) -> bool {
    delta_form_defect(d).max_rank <= c
}
