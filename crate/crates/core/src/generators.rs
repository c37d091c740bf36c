//! Deterministic test-input generators and the approximation-bound fuzzer.
//!
//! Every generator is a pure function of its [`GenSpec`]. Families whose
//! members are not 1-quasihomomorphisms by construction are proposed and
//! then verified; a failed verification comes back as
//! [`GenError::Rejected`] with the defect report.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apap::is_apap;
use crate::approximator::{approximate_with, ApproxError, CertPeriod, Verification};
use crate::linalg::{int, ratio, Rational, SymMat};
use crate::quasihom::{reconstruct, verify_direct, DefectReport, QuasiHomWindow};
use crate::seq::{DeltaSeq, Seq};

/// Largest numerator magnitude used for sampled entries.
pub const COEFF_BOUND: i64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Epsilon {
    /// Independent uniform values in `{-3, …, 3}` per window point.
    Random,
    Constant {
        value: i64,
    },
    /// `ε(x) = x`, which is absorbed into the homomorphism part.
    Linear,
    /// `ε(x) = x mod 2`.
    Parity,
    Explicit {
        values: BTreeMap<i64, i64>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// `f(x) = x·A₀`.
    Hom {
        #[serde(default)]
        base: Option<SymMat>,
    },
    /// `f(x) = x·A₀ + ε(x)·vvᵀ`; always a 1-quasihomomorphism.
    LinePerturbed {
        #[serde(default)]
        base: Option<SymMat>,
        #[serde(default)]
        line: Option<Vec<i64>>,
        epsilon: Epsilon,
    },
    /// Fully periodic delta: one palindromic block and one cancellation
    /// pair `(γ, -γ)` repeated with period `p`.
    PeriodicApap {
        p: i64,
        #[serde(default)]
        block: Option<Vec<SymMat>>,
        #[serde(default)]
        cancel: Option<SymMat>,
        #[serde(default)]
        base: Option<SymMat>,
    },
    /// APAP delta with an independently sampled cancellation pair at every
    /// multiple of `p`.
    ApapCandidate {
        p: i64,
        #[serde(default)]
        base: Option<SymMat>,
    },
    /// Window-wide APAP delta (periods `p` and `k·p`) whose lines first
    /// reach dimension 3 at the cancellation index `m = k·p - 1`. Not
    /// verified; used to exercise structure detection.
    SyntheticStructured {
        p: i64,
        k: i64,
        #[serde(default)]
        base: Option<SymMat>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Hom,
    LinePerturbed,
    PeriodicApap,
    ApapCandidate,
    SyntheticStructured,
}

impl Family {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::Hom { .. } => FamilyKind::Hom,
            Family::LinePerturbed { .. } => FamilyKind::LinePerturbed,
            Family::PeriodicApap { .. } => FamilyKind::PeriodicApap,
            Family::ApapCandidate { .. } => FamilyKind::ApapCandidate,
            Family::SyntheticStructured { .. } => FamilyKind::SyntheticStructured,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    #[serde(rename = "N")]
    pub radius: i64,
    pub seed: u64,
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("candidate is not a 1-quasihomomorphism: defect rank {} at {:?}", .report.c_measured, .report.witness)]
    Rejected { report: DefectReport },
    #[error("no admissible sample after {0} attempts")]
    Exhausted(usize),
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn small_rational(rng: &mut impl Rng) -> Rational {
    let num = rng.gen_range(-COEFF_BOUND..=COEFF_BOUND);
    let den = *[1, 1, 1, 2, 3].choose(rng).expect("nonempty");
    ratio(num, den)
}

pub(crate) fn random_sym(n: usize, rng: &mut impl Rng) -> SymMat {
    SymMat::from_fn(n, |_, _| small_rational(rng))
}

pub(crate) fn nonzero_vector(n: usize, rng: &mut impl Rng) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

pub(crate) fn to_rationals(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// `c·vvᵀ` with `c = ±a/b`, `a ∈ {1, 2}`, `b ∈ {1, 2, 3}`; entries keep
/// numerators within [`COEFF_BOUND`].
pub(crate) fn rank1_with(v: &[i64], rng: &mut impl Rng) -> SymMat {
    let a = rng.gen_range(1..=2);
    let b = rng.gen_range(1..=3);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    SymMat::outer(&to_rationals(v)).scale(&ratio(sign * a, b))
}

pub(crate) fn rank1(n: usize, rng: &mut impl Rng) -> SymMat {
    let v = nonzero_vector(n, rng);
    rank1_with(&v, rng)
}

pub fn gen_rank1_sym(n: usize, seed: u64) -> SymMat {
    assert!(n >= 1, "dimension must be positive");
    rank1(n, &mut rng_for(seed))
}

fn check_shape(spec: &GenSpec) -> Result<(), GenError> {
    if spec.n == 0 {
        return Err(GenError::InvalidSpec("n must be at least 1".into()));
    }
    if spec.radius < 1 {
        return Err(GenError::InvalidSpec("N must be at least 1".into()));
    }
    Ok(())
}

fn base_or_sample(base: &Option<SymMat>, n: usize, rng: &mut impl Rng) -> Result<SymMat, GenError> {
    match base {
        Some(b) if b.dim() != n => Err(GenError::InvalidSpec(format!(
            "base matrix has dimension {}, expected {n}",
            b.dim()
        ))),
        Some(b) => Ok(b.clone()),
        None => Ok(random_sym(n, rng)),
    }
}

fn wrong_family(expected: &str) -> GenError {
    GenError::InvalidSpec(format!("expected a {expected} spec"))
}

pub fn gen_homomorphism(spec: &GenSpec) -> Result<QuasiHomWindow, GenError> {
    check_shape(spec)?;
    let Family::Hom { base } = &spec.family else {
        return Err(wrong_family("hom"));
    };
    let mut rng = rng_for(spec.seed);
    let a0 = base_or_sample(base, spec.n, &mut rng)?;
    Ok(QuasiHomWindow::homomorphism(&a0, spec.radius).expect("shape checked"))
}

fn epsilon_fn(eps: &Epsilon, radius: i64, rng: &mut impl Rng) -> BTreeMap<i64, i64> {
    (-radius..=radius)
        .map(|x| {
            let e = match eps {
                Epsilon::Random => rng.gen_range(-3..=3),
                Epsilon::Constant { value } => *value,
                Epsilon::Linear => x,
                Epsilon::Parity => x.rem_euclid(2),
                Epsilon::Explicit { values } => values.get(&x).copied().unwrap_or(0),
            };
            (x, e)
        })
        .collect()
}

pub fn gen_line_perturbed(spec: &GenSpec) -> Result<QuasiHomWindow, GenError> {
    check_shape(spec)?;
    let Family::LinePerturbed {
        base,
        line,
        epsilon,
    } = &spec.family
    else {
        return Err(wrong_family("line_perturbed"));
    };
    let mut rng = rng_for(spec.seed);
    let a0 = base_or_sample(base, spec.n, &mut rng)?;
    let v = match line {
        Some(v) if v.len() != spec.n => {
            return Err(GenError::InvalidSpec(format!(
                "line vector has length {}, expected {}",
                v.len(),
                spec.n
            )))
        }
        Some(v) => v.clone(),
        None => nonzero_vector(spec.n, &mut rng),
    };
    let w = SymMat::outer(&to_rationals(&v));
    let eps = epsilon_fn(epsilon, spec.radius, &mut rng);
    let f = QuasiHomWindow::from_fn(spec.n, spec.radius, |x| {
        &a0.scale_int(x) + &w.scale_int(eps[&x])
    })
    .expect("shape checked");
    // defect is (ε(x+y) - ε(x) - ε(y))·vvᵀ, so this cannot fail
    let report = verify_direct(&f, 1);
    if !report.satisfied {
        return Err(GenError::Rejected { report });
    }
    Ok(f)
}

/// A pool of one or two rank-1 matrices, plus zero, to draw block and
/// cancellation values from.
fn value_pool(n: usize, rng: &mut impl Rng) -> Vec<SymMat> {
    let lines = if n >= 2 { rng.gen_range(1..=2) } else { 1 };
    let mut pool = vec![SymMat::zero(n)];
    for _ in 0..lines {
        pool.push(rank1(n, rng));
    }
    pool
}

fn palindromic_block(len: usize, pool: &[SymMat], rng: &mut impl Rng) -> Vec<SymMat> {
    let mut block = vec![SymMat::zero(pool[0].dim()); len];
    for i in 0..len.div_ceil(2) {
        let v = pool.choose(rng).expect("nonempty pool").clone();
        block[len - 1 - i] = v.clone();
        block[i] = v;
    }
    block
}

fn check_period(spec: &GenSpec, p: i64) -> Result<(), GenError> {
    if p < 2 || p > spec.radius {
        return Err(GenError::InvalidSpec(format!(
            "period {p} outside [2, N = {}]",
            spec.radius
        )));
    }
    Ok(())
}

/// Delta sequence with the given block and cancellation value at each
/// multiple `j` of `p` (`Δ(j-1) = γ_j`, `Δ(j) = -γ_j`).
fn apap_delta(
    radius: i64,
    p: i64,
    block: &[SymMat],
    mut cancel_at: impl FnMut(i64) -> SymMat,
) -> DeltaSeq {
    let mut cache: BTreeMap<i64, SymMat> = BTreeMap::new();
    let mut gamma = |j: i64| cache.entry(j).or_insert_with(|| cancel_at(j)).clone();
    Seq::from_fn(radius, |i| match i.rem_euclid(p) {
        0 => -gamma(i),
        r if r == p - 1 => gamma(i + 1),
        r => block[(r - 1) as usize].clone(),
    })
    .expect("radius checked")
}

fn validate_apap_family(spec: &GenSpec) -> Result<(), GenError> {
    check_shape(spec)?;
    let (p, block, cancel, base) = match &spec.family {
        Family::PeriodicApap {
            p,
            block,
            cancel,
            base,
        } => (*p, block, cancel, base),
        Family::ApapCandidate { p, base } => (*p, &None, &None, base),
        _ => return Err(wrong_family("periodic_apap or apap_candidate")),
    };
    check_period(spec, p)?;
    if let Some(b) = block {
        if b.len() as i64 != p - 2 {
            return Err(GenError::InvalidSpec(format!(
                "block needs {} entries",
                p - 2
            )));
        }
        if b.iter().any(|m| m.dim() != spec.n || m.rank() > 1) {
            return Err(GenError::InvalidSpec(
                "block entries must be rank <= 1".into(),
            ));
        }
        if (0..b.len()).any(|i| b[i] != b[b.len() - 1 - i]) {
            return Err(GenError::InvalidSpec("block must be palindromic".into()));
        }
    }
    if let Some(c) = cancel {
        if c.dim() != spec.n || c.rank() > 1 {
            return Err(GenError::InvalidSpec(
                "cancellation value must be rank <= 1".into(),
            ));
        }
    }
    if base.as_ref().is_some_and(|b| b.dim() != spec.n) {
        return Err(GenError::InvalidSpec(
            "base matrix dimension mismatch".into(),
        ));
    }
    Ok(())
}

/// Proposed window for an APAP family, before verification.
fn apap_candidate_window(spec: &GenSpec) -> Result<QuasiHomWindow, GenError> {
    validate_apap_family(spec)?;
    let mut rng = rng_for(spec.seed);
    let pool = value_pool(spec.n, &mut rng);
    let (d, base) = match &spec.family {
        Family::PeriodicApap {
            p,
            block,
            cancel,
            base,
        } => {
            let block = match block {
                Some(b) => b.clone(),
                None => palindromic_block((*p - 2) as usize, &pool, &mut rng),
            };
            let gamma = match cancel {
                Some(c) => c.clone(),
                None if rng.gen_bool(0.3) => rank1(spec.n, &mut rng),
                None => pool.choose(&mut rng).expect("nonempty pool").clone(),
            };
            (apap_delta(spec.radius, *p, &block, |_| gamma.clone()), base)
        }
        Family::ApapCandidate { p, base } => {
            let block = palindromic_block((*p - 2) as usize, &pool, &mut rng);
            let mut signed = pool.clone();
            signed.extend(pool.iter().map(|m| -m));
            let d = apap_delta(spec.radius, *p, &block, |_| {
                signed.choose(&mut rng).expect("nonempty pool").clone()
            });
            (d, base)
        }
        _ => unreachable!("validated"),
    };
    let g = reconstruct(&d);
    let base = base.clone().unwrap_or_else(|| SymMat::zero(spec.n));
    Ok(
        QuasiHomWindow::from_fn(spec.n, spec.radius, |x| g.get(x) + &base.scale_int(x))
            .expect("shape"),
    )
}

fn verified(f: QuasiHomWindow) -> Result<QuasiHomWindow, GenError> {
    let report = verify_direct(&f, 1);
    if !report.satisfied {
        return Err(GenError::Rejected { report });
    }
    Ok(f)
}

pub fn gen_periodic_apap(spec: &GenSpec) -> Result<QuasiHomWindow, GenError> {
    if !matches!(spec.family, Family::PeriodicApap { .. }) {
        return Err(wrong_family("periodic_apap"));
    }
    verified(apap_candidate_window(spec)?)
}

pub fn gen_apap_candidate(spec: &GenSpec) -> Result<QuasiHomWindow, GenError> {
    if !matches!(spec.family, Family::ApapCandidate { .. }) {
        return Err(wrong_family("apap_candidate"));
    }
    verified(apap_candidate_window(spec)?)
}

fn independent_vectors(n: usize, count: usize, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    loop {
        let vs: Vec<Vec<i64>> = (0..count).map(|_| nonzero_vector(n, rng)).collect();
        let rows: Vec<Vec<Rational>> = vs.iter().map(|v| to_rationals(v)).collect();
        if crate::linalg::Subspace::span(n, &rows)
            .expect("lengths match")
            .dim()
            == count
        {
            return vs;
        }
    }
}

/// Delta sequence for [`Family::SyntheticStructured`].
pub fn synthetic_structured_delta(
    n: usize,
    radius: i64,
    p: i64,
    k: i64,
    seed: u64,
) -> Result<DeltaSeq, GenError> {
    if n < 3 {
        return Err(GenError::InvalidSpec(
            "structured sequences need n >= 3".into(),
        ));
    }
    if p < 3 || k < 1 {
        return Err(GenError::InvalidSpec("need p >= 3 and k >= 1".into()));
    }
    if radius < k * p + 1 {
        return Err(GenError::InvalidSpec(format!(
            "radius {radius} below k·p + 1 = {}",
            k * p + 1
        )));
    }
    let mut rng = rng_for(seed);
    const ATTEMPTS: usize = 200;
    for _ in 0..ATTEMPTS {
        let vs = independent_vectors(n, 3, &mut rng);
        let (u, w, t) = (&vs[0], &vs[1], &vs[2]);
        let two_lines = p >= 4 && rng.gen_bool(0.7);
        // block values live on the line of u, or on the lines of u and w
        let mut pool = vec![rank1_with(u, &mut rng), rank1_with(u, &mut rng)];
        if two_lines {
            pool.push(rank1_with(w, &mut rng));
        }
        let len = (p - 2) as usize;
        let mut block = palindromic_block(len, &pool, &mut rng);
        block[0] = pool[0].clone();
        block[len - 1] = pool[0].clone();
        if two_lines && len >= 3 {
            let mid = len / 2;
            let wv = pool[2].clone();
            block[mid] = wv.clone();
            block[len - 1 - mid] = wv;
        }
        let block_lines = if two_lines && len >= 3 { 2 } else { 1 };

        // inner cancellation values: γ_{(k-j)p} = -γ_{jp}, γ_{-jp} = -γ_{jp}
        let mut gamma: BTreeMap<i64, SymMat> = BTreeMap::new();
        for j in 1..k {
            let pos = j * p;
            if gamma.contains_key(&pos) {
                continue;
            }
            let v = if 2 * j == k {
                SymMat::zero(n)
            } else {
                pool.choose(&mut rng).expect("nonempty").clone()
            };
            gamma.insert(pos, v.clone());
            gamma.insert((k - j) * p, -&v);
        }
        for j in 1..k {
            let v = -&gamma[&(j * p)];
            gamma.insert(-j * p, v);
        }
        gamma.insert(0, rank1(n, &mut rng));
        // the third dimension arrives at m = kp - 1 (and at -m - 1)
        let outer_pos = rank1_with(t, &mut rng);
        let outer_neg = if block_lines == 2 {
            if rng.gen_bool(0.5) {
                rank1_with(t, &mut rng)
            } else {
                rank1(n, &mut rng)
            }
        } else {
            rank1_with(w, &mut rng)
        };
        gamma.insert(k * p, outer_pos);
        gamma.insert(-k * p, -&outer_neg);

        // away from multiples of kp the values repeat with period kp
        let d = apap_delta(radius, p, &block, |j| {
            let jj = j / p;
            if jj.rem_euclid(k) != 0 {
                gamma[&(jj.rem_euclid(k) * p)].clone()
            } else {
                gamma.get(&j).cloned().unwrap_or_else(|| rank1(n, &mut rng))
            }
        });
        let planted_is_minimal = (2..p)
            .filter(|q| (k * p) % q == 0)
            .all(|q| q > radius || !is_apap(&d, q).unwrap_or(false));
        if planted_is_minimal {
            return Ok(d);
        }
    }
    Err(GenError::Exhausted(ATTEMPTS))
}

pub fn gen_synthetic_structured(spec: &GenSpec) -> Result<QuasiHomWindow, GenError> {
    check_shape(spec)?;
    let Family::SyntheticStructured { p, k, base } = &spec.family else {
        return Err(wrong_family("synthetic_structured"));
    };
    let d = synthetic_structured_delta(spec.n, spec.radius, *p, *k, spec.seed)?;
    let g = reconstruct(&d);
    let base = base.clone().unwrap_or_else(|| SymMat::zero(spec.n));
    if base.dim() != spec.n {
        return Err(GenError::InvalidSpec(
            "base matrix dimension mismatch".into(),
        ));
    }
    Ok(
        QuasiHomWindow::from_fn(spec.n, spec.radius, |x| g.get(x) + &base.scale_int(x))
            .expect("shape"),
    )
}

pub fn generate(spec: &GenSpec) -> Result<QuasiHomWindow, GenError> {
    match spec.family.kind() {
        FamilyKind::Hom => gen_homomorphism(spec),
        FamilyKind::LinePerturbed => gen_line_perturbed(spec),
        FamilyKind::PeriodicApap => gen_periodic_apap(spec),
        FamilyKind::ApapCandidate => gen_apap_candidate(spec),
        FamilyKind::SyntheticStructured => gen_synthetic_structured(spec),
    }
}

/// Union-find over indices where each node stores its sign relative to
/// its parent; classes forced to equal their own negation are zero.
struct SignedUnionFind {
    parent: Vec<usize>,
    flip: Vec<bool>,
    zero: Vec<bool>,
}

impl SignedUnionFind {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            flip: vec![false; len],
            zero: vec![false; len],
        }
    }

    /// Root of `a` and whether `x[a] = -x[root]`.
    fn find(&mut self, a: usize) -> (usize, bool) {
        let parent = self.parent[a];
        if parent == a {
            return (a, false);
        }
        let (root, parent_flip) = self.find(parent);
        self.flip[a] ^= parent_flip;
        self.parent[a] = root;
        (root, self.flip[a])
    }

    /// Imposes `x[a] = ±x[b]` (`negate` selects the minus sign).
    fn relate(&mut self, a: usize, b: usize, negate: bool) {
        let (ra, fa) = self.find(a);
        let (rb, fb) = self.find(b);
        if ra == rb {
            if fa ^ fb ^ negate {
                self.zero[ra] = true;
            }
            return;
        }
        self.parent[rb] = ra;
        self.flip[rb] = fa ^ fb ^ negate;
        self.zero[ra] |= self.zero[rb];
    }
}

/// A random integer sequence on `[-radius, radius-1]` that is APAP with
/// period `p` and, when `q` is given, also satisfies the `q`-periodicity,
/// `q`-palindrome and `Δ(q-1) + Δ(q) = 0` conditions. It is the most
/// general such sequence: each equivalence class of forced equalities gets
/// its own random nonzero value unless the class is forced to vanish.
pub fn constrained_sequence(
    radius: i64,
    p: i64,
    q: Option<i64>,
    seed: u64,
) -> Result<Seq<i64>, GenError> {
    if p < 2 || p > radius {
        return Err(GenError::InvalidSpec(format!(
            "period {p} outside [2, {radius}]"
        )));
    }
    if let Some(q) = q {
        if q < 2 || q >= p {
            return Err(GenError::InvalidSpec(format!(
                "need 2 <= q < p, got q = {q}"
            )));
        }
    }
    let lo = -radius;
    let hi = radius - 1;
    let idx = |i: i64| (i - lo) as usize;
    let mut uf = SignedUnionFind::new((hi - lo + 1) as usize);
    for i in lo..=hi - p {
        let r = i.rem_euclid(p);
        if r != 0 && r != p - 1 {
            uf.relate(idx(i), idx(i + p), false);
        }
    }
    for j in lo + 1..=hi {
        if j.rem_euclid(p) == 0 {
            uf.relate(idx(j - 1), idx(j), true);
        }
    }
    for i in 1..=p - 2 {
        uf.relate(idx(i), idx(p - 1 - i), false);
    }
    if let Some(q) = q {
        for i in 1..=p - q - 2 {
            uf.relate(idx(i), idx(i + q), false);
        }
        for i in 1..=q - 2 {
            uf.relate(idx(i), idx(q - 1 - i), false);
        }
        uf.relate(idx(q - 1), idx(q), true);
    }
    let mut rng = rng_for(seed);
    let mut values: BTreeMap<usize, i64> = BTreeMap::new();
    Seq::from_fn(radius, |i| {
        let (root, flip) = uf.find(idx(i));
        if uf.zero[root] {
            return 0;
        }
        let v = *values.entry(root).or_insert_with(|| {
            let v = rng.gen_range(1..=9);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        });
        if flip {
            -v
        } else {
            v
        }
    })
    .map_err(|e| GenError::InvalidSpec(e.to_string()))
}

/// `f(2) = e₁e₁ᵀ`, `f(4) = e₂e₂ᵀ`, zero elsewhere on `[-4, 4]`: APAP-shaped
/// with period 2 but with defect rank 2.
pub fn period_two_counterexample() -> QuasiHomWindow {
    let b1 = SymMat::outer(&to_rationals(&[1, 0]));
    let b2 = SymMat::outer(&to_rationals(&[0, 1]));
    QuasiHomWindow::from_fn(2, 4, |x| match x {
        2 => b1.clone(),
        4 => b2.clone(),
        _ => SymMat::zero(2),
    })
    .expect("fixed shape")
}

/// Period-3 delta with block `e₁e₁ᵀ` and cancellation pair
/// `(e₂e₂ᵀ, -e₂e₂ᵀ)`, `n = 3`, `N = 10`.
pub fn period_three_spec() -> GenSpec {
    GenSpec {
        n: 3,
        radius: 10,
        seed: 0,
        family: Family::PeriodicApap {
            p: 3,
            block: Some(vec![SymMat::outer(&to_rationals(&[1, 0, 0]))]),
            cancel: Some(SymMat::outer(&to_rationals(&[0, 1, 0]))),
            base: None,
        },
    }
}

/// Parameter space sampled by [`fuzz_theorem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzSpace {
    pub master_seed: u64,
    pub n_range: (usize, usize),
    pub radius_range: (i64, i64),
    pub max_period: i64,
    pub families: Vec<FamilyKind>,
}

impl Default for FuzzSpace {
    fn default() -> Self {
        Self {
            master_seed: 0x5eed_0001,
            n_range: (1, 5),
            radius_range: (5, 25),
            max_period: 8,
            families: vec![
                FamilyKind::Hom,
                FamilyKind::LinePerturbed,
                FamilyKind::PeriodicApap,
                FamilyKind::ApapCandidate,
            ],
        }
    }
}

impl FuzzSpace {
    /// Deterministic list of trial specs.
    pub fn sample_specs(&self, trials: usize) -> Vec<GenSpec> {
        let mut rng = rng_for(self.master_seed);
        (0..trials)
            .map(|_| {
                let n = rng.gen_range(self.n_range.0..=self.n_range.1);
                let radius = rng.gen_range(self.radius_range.0..=self.radius_range.1);
                let seed: u64 = rng.gen();
                let kind = *self.families.choose(&mut rng).expect("at least one family");
                let p = rng.gen_range(2..=self.max_period.min(radius).max(2));
                let base = rng.gen_bool(0.5).then(|| random_sym(n, &mut rng));
                let family = match kind {
                    FamilyKind::Hom => Family::Hom { base: None },
                    FamilyKind::LinePerturbed => Family::LinePerturbed {
                        base: None,
                        line: None,
                        epsilon: match rng.gen_range(0..10) {
                            0 => Epsilon::Constant {
                                value: rng.gen_range(-3..=3),
                            },
                            1 => Epsilon::Linear,
                            2 => Epsilon::Parity,
                            _ => Epsilon::Random,
                        },
                    },
                    FamilyKind::PeriodicApap => Family::PeriodicApap {
                        p,
                        block: None,
                        cancel: None,
                        base,
                    },
                    FamilyKind::ApapCandidate => Family::ApapCandidate { p, base },
                    FamilyKind::SyntheticStructured => Family::SyntheticStructured {
                        p: p.max(3),
                        k: 1,
                        base,
                    },
                };
                GenSpec {
                    n: if kind == FamilyKind::SyntheticStructured {
                        n.max(3)
                    } else {
                        n
                    },
                    radius: if kind == FamilyKind::SyntheticStructured {
                        radius.max(p.max(3) + 1)
                    } else {
                        radius
                    },
                    seed,
                    family,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub spec: GenSpec,
    pub reason: String,
    #[serde(default)]
    pub max_rank: Option<usize>,
    #[serde(default)]
    pub witness: Option<(i64, i64)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyStats {
    pub sampled: usize,
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub master_seed: u64,
    pub trials: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub violations: Vec<Violation>,
    pub structured_count: usize,
    pub degenerate_count: usize,
    pub inconclusive_count: usize,
    /// Specs of verified inputs that took the structured path.
    pub structured_specs: Vec<GenSpec>,
    pub inconclusive_specs: Vec<GenSpec>,
    /// Largest certificate rank seen over accepted inputs.
    pub max_rank_seen: usize,
    pub families: BTreeMap<FamilyKind, FamilyStats>,
}

enum Outcome {
    Rejected,
    Certified { structured: bool, max_rank: usize },
    Inconclusive,
    Violation(Violation),
}

fn run_trial(spec: &GenSpec) -> Outcome {
    let violation = |reason: String, max_rank, witness| {
        Outcome::Violation(Violation {
            spec: spec.clone(),
            reason,
            max_rank,
            witness,
        })
    };
    let f = match generate(spec) {
        Ok(f) => f,
        Err(GenError::Rejected { report }) => {
            let reproduced = report
                .witness
                .and_then(|(x, y)| regenerate_defect_rank(spec, x, y))
                == Some(report.c_measured);
            return if report.c_measured > 1 && reproduced {
                Outcome::Rejected
            } else {
                violation(
                    "rejection witness does not reproduce".into(),
                    None,
                    report.witness,
                )
            };
        }
        Err(e) => return violation(format!("generator failed: {e}"), None, None),
    };
    let report = verify_direct(&f, 1);
    if !report.satisfied {
        return violation(
            "generator emitted a window that fails verification".into(),
            None,
            report.witness,
        );
    }
    match approximate_with(&f, Verification::Bypass) {
        Ok(cert) if cert.bound_satisfied => Outcome::Certified {
            structured: matches!(cert.period, CertPeriod::Period(_)),
            max_rank: cert.max_rank,
        },
        Ok(cert) => violation(
            "certificate exceeds rank 2".into(),
            Some(cert.max_rank),
            None,
        ),
        Err(ApproxError::Inconclusive { .. }) => Outcome::Inconclusive,
        Err(e) => violation(format!("approximation failed: {e}"), None, None),
    }
}

/// Rank of the defect at `(x, y)` of the candidate window for `spec`.
pub fn regenerate_defect_rank(spec: &GenSpec, x: i64, y: i64) -> Option<usize> {
    candidate_window(spec).ok()?.defect(x, y).map(|d| d.rank())
}

/// The proposed window before verification.
pub fn candidate_window(spec: &GenSpec) -> Result<QuasiHomWindow, GenError> {
    match spec.family.kind() {
        FamilyKind::PeriodicApap | FamilyKind::ApapCandidate => apap_candidate_window(spec),
        _ => generate(spec),
    }
}

pub fn fuzz_theorem(trials: usize, space: &FuzzSpace) -> FuzzReport {
    let specs = space.sample_specs(trials);
    let outcomes: Vec<Outcome> = specs.par_iter().map(run_trial).collect();
    let mut report = FuzzReport {
        master_seed: space.master_seed,
        trials,
        ..FuzzReport::default()
    };
    for (spec, outcome) in specs.iter().zip(outcomes) {
        let stats = report.families.entry(spec.family.kind()).or_default();
        stats.sampled += 1;
        match outcome {
            Outcome::Rejected => {
                stats.rejected += 1;
                report.rejected += 1;
            }
            Outcome::Certified {
                structured,
                max_rank,
            } => {
                stats.accepted += 1;
                report.accepted += 1;
                report.max_rank_seen = report.max_rank_seen.max(max_rank);
                if structured {
                    report.structured_count += 1;
                    report.structured_specs.push(spec.clone());
                } else {
                    report.degenerate_count += 1;
                }
            }
            Outcome::Inconclusive => {
                stats.accepted += 1;
                report.accepted += 1;
                report.inconclusive_count += 1;
                report.inconclusive_specs.push(spec.clone());
            }
            Outcome::Violation(v) => report.violations.push(v),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approximator::{detect_structure, FindingKind};
    use crate::quasihom::{delta, normalize};

    fn spec(n: usize, radius: i64, seed: u64, family: Family) -> GenSpec {
        GenSpec {
            n,
            radius,
            seed,
            family,
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let s = spec(3, 8, 42, Family::ApapCandidate { p: 4, base: None });
        let a = candidate_window(&s).unwrap();
        let b = candidate_window(&s).unwrap();
        assert_eq!(a, b);
        assert_eq!(gen_rank1_sym(4, 9), gen_rank1_sym(4, 9));
    }

    #[test]
    fn rank1_sampler_stays_small() {
        for seed in 0..200 {
            let m = gen_rank1_sym(3, seed);
            assert_eq!(m.rank(), 1);
            for i in 0..3 {
                for j in 0..3 {
                    assert!(m.get(i, j).numer().magnitude() <= &COEFF_BOUND.unsigned_abs().into());
                }
            }
        }
    }

    #[test]
    fn line_perturbed_is_always_accepted() {
        for seed in 0..20 {
            let s = spec(
                2,
                6,
                seed,
                Family::LinePerturbed {
                    base: None,
                    line: None,
                    epsilon: Epsilon::Random,
                },
            );
            assert!(gen_line_perturbed(&s).is_ok());
        }
    }

    #[test]
    fn rejected_candidate_witness_reproduces() {
        let mut seen = 0;
        for seed in 0..60 {
            let s = spec(3, 7, seed, Family::ApapCandidate { p: 3, base: None });
            if let Err(GenError::Rejected { report }) = generate(&s) {
                let (x, y) = report.witness.unwrap();
                assert_eq!(regenerate_defect_rank(&s, x, y), Some(report.c_measured));
                assert!(report.c_measured >= 2);
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn wrong_family_is_reported() {
        let s = spec(2, 5, 0, Family::Hom { base: None });
        assert!(matches!(
            gen_periodic_apap(&s),
            Err(GenError::InvalidSpec(_))
        ));
    }

    #[test]
    fn synthetic_structured_plants_m_and_p() {
        for (p, k) in [(3, 1), (4, 1), (3, 2), (5, 2)] {
            for seed in 0..4 {
                let s = spec(
                    3,
                    k * p + 2,
                    seed,
                    Family::SyntheticStructured { p, k, base: None },
                );
                let f = gen_synthetic_structured(&s).unwrap();
                let (g, _) = normalize(&f);
                let finding = detect_structure(&delta(&g), Verification::Bypass).unwrap();
                assert_eq!(finding.kind, FindingKind::Structured, "p={p} k={k}");
                assert_eq!(finding.m, Some(k * p - 1));
                assert_eq!(finding.p, Some(p));
            }
        }
    }

    #[test]
    fn constrained_sequences_satisfy_their_constraints() {
        for (p, q) in [(6, 4), (6, 3), (5, 3), (8, 6), (9, 6)] {
            for seed in 0..5 {
                let d = constrained_sequence(20, p, Some(q), seed).unwrap();
                assert!(is_apap(&d, p).unwrap());
                let r = crate::apap::gcd_reduce(&d, p, q);
                assert!(r.is_ok(), "p={p} q={q}: {r:?}");
            }
        }
        let d = constrained_sequence(12, 4, None, 1).unwrap();
        assert!(is_apap(&d, 4).unwrap());
        assert!(d.iter().any(|(_, &v)| v != 0));
    }

    #[test]
    fn small_fuzz_run_is_clean() {
        let report = fuzz_theorem(
            40,
            &FuzzSpace {
                radius_range: (5, 9),
                ..FuzzSpace::default()
            },
        );
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert_eq!(report.accepted + report.rejected, 40);
        assert!(report.max_rank_seen <= 2);
    }
}
