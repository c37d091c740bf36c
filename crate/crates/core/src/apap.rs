//! Almost-periodic almost-palindromic (APAP) sequences.
//!
//! A sequence `(Δ(i))` on `[-N, N-1]` is APAP with period `p ∈ [2, N]` when
//!
//! * `Δ(i + p) = Δ(i)` whenever `i ≢ -1, 0 (mod p)`,
//! * `Δ(j - 1) + Δ(j) = 0` for every multiple `j` of `p` in `[-N+1, N-1]`,
//! * `Δ(p - 1 - i) = Δ(i)` for `i = 1, …, p-2` (the palindromic block).
//!
//! Everything here works over any abelian group through [`GroupElement`];
//! no rank information is used.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use crate::seq::{GroupElement, Seq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum ApapViolation {
    /// `Δ(i + p) ≠ Δ(i)`.
    Periodicity { i: i64 },
    /// `Δ(j - 1) + Δ(j) ≠ 0`.
    Cancellation { j: i64 },
    /// `Δ(p - 1 - i) ≠ Δ(i)`.
    Palindrome { i: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QHypothesis {
    /// `Δ(i) = Δ(i + q)` for `i = 1, …, p-q-2`.
    QPeriodicity,
    /// `Δ(i) = Δ(q - 1 - i)` for `i = 1, …, q-2`.
    QPalindrome,
    /// `Δ(q - 1) + Δ(q) = 0`.
    QCancellation,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApapError {
    #[error("period {p} outside [2, {radius}]")]
    PeriodOutOfRange { p: i64, radius: i64 },
    #[error("sequence is not APAP with period {p}: {violation:?}")]
    NotApap { p: i64, violation: ApapViolation },
    #[error("modulus must be positive, got {0}")]
    InvalidModulus(i64),
    #[error("expected 2 <= q < p, got p = {p}, q = {q}")]
    ParameterOrder { p: i64, q: i64 },
    #[error("closure radius {radius} is below 3·lcm(p, q) = {required}")]
    ClosureRadiusTooSmall { radius: i64, required: i64 },
    #[error("{x} lies outside the trusted central range [-{limit}, {limit}]")]
    OutsideCentralThird { x: i64, limit: i64 },
    #[error("hypothesis {which:?} fails at index {index}")]
    Hypothesis { which: QHypothesis, index: i64 },
    #[error("reduction to period {g} could not be certified: {reason}")]
    ConclusionFailed { g: i64, reason: String },
    #[error("k must be non-negative, got {0}")]
    NegativeCount(i64),
}

/// Detected APAP data for one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApapStructure<T> {
    pub period: i64,
    /// `Δ(1), …, Δ(p-2)`.
    pub block: Vec<T>,
    pub block_sum: T,
    /// `j ↦ (Δ(j-1), Δ(j))` for multiples `j` of `p` in `[-N+1, N-1]`.
    pub cancellation_pairs: BTreeMap<i64, (T, T)>,
    /// Entries at indices `≡ -1, 0 (mod p)` that belong to no complete
    /// cancellation pair because the window cuts the pair.
    pub unpaired: BTreeMap<i64, T>,
    pub radius: i64,
    /// True when no periodicity comparison fits in the window, so the
    /// periodicity condition held vacuously.
    pub periodicity_vacuous: bool,
}

impl<T: GroupElement> ApapStructure<T> {
    /// Rebuilds the full sequence from the structure.
    pub fn materialize(&self) -> Seq<T> {
        let p = self.period;
        Seq::from_fn(self.radius, |i| match i.rem_euclid(p) {
            0 => self
                .cancellation_pairs
                .get(&i)
                .map(|(_, b)| b.clone())
                .unwrap_or_else(|| self.unpaired[&i].clone()),
            r if r == p - 1 => self
                .cancellation_pairs
                .get(&(i + 1))
                .map(|(a, _)| a.clone())
                .unwrap_or_else(|| self.unpaired[&i].clone()),
            r => self.block[(r - 1) as usize].clone(),
        })
        .expect("structure radius is at least 1")
    }

    /// Label for index `i`: its block position `1..=p-2`, or `None` for a
    /// cancellation index.
    pub fn block_position(&self, i: i64) -> Option<i64> {
        let r = i.rem_euclid(self.period);
        (r != 0 && r != self.period - 1).then_some(r)
    }
}

fn check_period<T>(d: &Seq<T>, p: i64) -> Result<(), ApapError> {
    if p < 2 || p > d.radius() {
        return Err(ApapError::PeriodOutOfRange {
            p,
            radius: d.radius(),
        });
    }
    Ok(())
}

/// First violated condition, if any. Conditions are checked in the order
/// periodicity, cancellation, palindromicity, each by increasing index.
pub fn first_violation<T: GroupElement>(
    d: &Seq<T>,
    p: i64,
) -> Result<Option<ApapViolation>, ApapError> {
    check_period(d, p)?;
    for i in d.lo()..=d.hi() - p {
        let r = i.rem_euclid(p);
        if r != 0 && r != p - 1 && d.get(i + p) != d.get(i) {
            return Ok(Some(ApapViolation::Periodicity { i }));
        }
    }
    for j in (d.lo() + 1)..=d.hi() {
        if j.rem_euclid(p) == 0 && !d.get(j - 1).plus(d.get(j)).is_zero_elem() {
            return Ok(Some(ApapViolation::Cancellation { j }));
        }
    }
    for i in 1..=p - 2 {
        if d.get(p - 1 - i) != d.get(i) {
            return Ok(Some(ApapViolation::Palindrome { i }));
        }
    }
    Ok(None)
}

pub fn is_apap<T: GroupElement>(d: &Seq<T>, p: i64) -> Result<bool, ApapError> {
    Ok(first_violation(d, p)?.is_none())
}

/// Extracts the APAP structure at period `p`, or reports the first
/// violated condition.
pub fn apap_structure<T: GroupElement>(d: &Seq<T>, p: i64) -> Result<ApapStructure<T>, ApapError> {
    if let Some(violation) = first_violation(d, p)? {
        return Err(ApapError::NotApap { p, violation });
    }
    let block: Vec<T> = (1..=p - 2).map(|i| d.get(i).clone()).collect();
    let block_sum = sum_of(&block, d.get(0));
    let mut cancellation_pairs = BTreeMap::new();
    for j in (d.lo() + 1)..=d.hi() {
        if j.rem_euclid(p) == 0 {
            cancellation_pairs.insert(j, (d.get(j - 1).clone(), d.get(j).clone()));
        }
    }
    let mut unpaired = BTreeMap::new();
    for (i, v) in d.iter() {
        let r = i.rem_euclid(p);
        let paired = (r == 0 && cancellation_pairs.contains_key(&i))
            || (r == p - 1 && cancellation_pairs.contains_key(&(i + 1)));
        if (r == 0 || r == p - 1) && !paired {
            unpaired.insert(i, v.clone());
        }
    }
    let periodicity_vacuous = !(d.lo()..=d.hi() - p).any(|i| {
        let r = i.rem_euclid(p);
        r != 0 && r != p - 1
    });
    Ok(ApapStructure {
        period: p,
        block,
        block_sum,
        cancellation_pairs,
        unpaired,
        radius: d.radius(),
        periodicity_vacuous,
    })
}

fn sum_of<T: GroupElement>(items: &[T], like: &T) -> T {
    items.iter().fold(like.zero_like(), |acc, v| acc.plus(v))
}

/// `B_Δ = Δ(1) + … + Δ(p-2)`; zero for `p = 2`.
pub fn block_sum<T: GroupElement>(s: &ApapStructure<T>) -> T {
    s.block_sum.clone()
}

/// Every in-range window of `k·p` consecutive entries whose first index is
/// not a multiple of `p` sums to `k·B_Δ`.
pub fn consecutive_sum_check<T: GroupElement>(
    d: &Seq<T>,
    p: i64,
    k: i64,
) -> Result<bool, ApapError> {
    if k < 0 {
        return Err(ApapError::NegativeCount(k));
    }
    let s = apap_structure(d, p)?;
    let zero = d.get(0).zero_like();
    let target = (0..k).fold(zero.clone(), |acc, _| acc.plus(&s.block_sum));
    if k == 0 {
        return Ok(true);
    }
    let len = k * p;
    // sliding window sum over [start, start + len - 1]
    let mut window = zero;
    let mut start = d.lo();
    let end = start + len - 1;
    if end > d.hi() {
        return Ok(true);
    }
    for i in start..=end {
        window = window.plus(d.get(i));
    }
    loop {
        if start.rem_euclid(p) != 0 && window != target {
            return Ok(false);
        }
        let next_end = start + len;
        if next_end > d.hi() {
            return Ok(true);
        }
        window = window.plus(d.get(next_end)).plus(&d.get(start).negated());
        start += 1;
    }
}

/// The representative of `a mod q` in `{1, …, q}`.
pub fn residue_1_to_q(a: i64, q: i64) -> Result<i64, ApapError> {
    if q <= 0 {
        return Err(ApapError::InvalidModulus(q));
    }
    Ok((a - 1).rem_euclid(q) + 1)
}

fn check_order(p: i64, q: i64) -> Result<(), ApapError> {
    if q < 2 || q >= p {
        return Err(ApapError::ParameterOrder { p, q });
    }
    Ok(())
}

/// Closed form of the equivalence generated by `q`-periodicity,
/// `q`-palindromicity and `p`-palindromicity: `x ~ y` iff
/// `x ≡ y (mod g)` or `x + y ≡ -1 (mod g)`, with `g = gcd(p, q)`.
pub fn equiv_related(x: i64, y: i64, p: i64, q: i64) -> Result<bool, ApapError> {
    check_order(p, q)?;
    let g = p.gcd(&q);
    Ok((x - y).rem_euclid(g) == 0 || (x + y + 1).rem_euclid(g) == 0)
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Brute-force closure of the three generating relations on `[-L, L]`.
///
/// Chains may leave any finite interval, so answers are only given for
/// points in the central third `[-L/3, L/3]`.
pub struct EquivClosure {
    radius: i64,
    classes: Vec<usize>,
}

impl EquivClosure {
    pub fn new(p: i64, q: i64, radius: i64) -> Result<Self, ApapError> {
        check_order(p, q)?;
        let required = 3 * p.lcm(&q);
        if radius < required {
            return Err(ApapError::ClosureRadiusTooSmall { radius, required });
        }
        let len = (2 * radius + 1) as usize;
        let at = |x: i64| (x + radius) as usize;
        let inside = |x: i64| (-radius..=radius).contains(&x);
        let mut uf = UnionFind::new(len);
        for x in -radius..=radius {
            if inside(x + q) {
                uf.union(at(x), at(x + q));
            }
        }
        for x in 0..q {
            uf.union(at(x), at(q - 1 - x));
        }
        for x in 0..p {
            uf.union(at(x), at(p - 1 - x));
        }
        let classes = (0..len).map(|k| uf.find(k)).collect();
        Ok(Self { radius, classes })
    }

    pub fn central_limit(&self) -> i64 {
        self.radius / 3
    }

    pub fn related(&self, x: i64, y: i64) -> Result<bool, ApapError> {
        let limit = self.central_limit();
        for v in [x, y] {
            if v.abs() > limit {
                return Err(ApapError::OutsideCentralThird { x: v, limit });
            }
        }
        let at = |v: i64| (v + self.radius) as usize;
        Ok(self.classes[at(x)] == self.classes[at(y)])
    }
}

pub fn equiv_closure_oracle(
    x: i64,
    y: i64,
    p: i64,
    q: i64,
    radius: i64,
) -> Result<bool, ApapError> {
    EquivClosure::new(p, q, radius)?.related(x, y)
}

/// Outcome of combining an APAP period `p` with a compatible shorter `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GcdReduction<T> {
    /// `g = gcd(p, q) > 1`: the sequence is APAP with period `g`.
    Period {
        structure: ApapStructure<T>,
        /// Indices checked to be zero (`≡ -1, 0 mod g`, inside `[1, q]` or
        /// away from the multiples of `p`).
        zero_indices: Vec<i64>,
    },
    /// `g = 1`: the checked entries all equal `±value`.
    ConstantUpToSign { value: T, checked_indices: Vec<i64> },
}

impl<T> GcdReduction<T> {
    pub fn period(&self) -> Option<i64> {
        match self {
            GcdReduction::Period { structure, .. } => Some(structure.period),
            GcdReduction::ConstantUpToSign { .. } => None,
        }
    }
}

/// Checks the three `q`-hypotheses on top of APAP with period `p` and
/// certifies the reduction to `g = gcd(p, q)`.
///
/// The structural conclusions are certified on `[1, q]` and on every index
/// `≢ -1, 0 (mod p)`; entries of cancellation pairs at nonzero multiples of
/// `p` are not determined by the hypotheses.
pub fn gcd_reduce<T: GroupElement>(
    d: &Seq<T>,
    p: i64,
    q: i64,
) -> Result<GcdReduction<T>, ApapError> {
    check_order(p, q)?;
    apap_structure(d, p)?;
    for i in 1..=p - q - 2 {
        if d.get(i) != d.get(i + q) {
            return Err(ApapError::Hypothesis {
                which: QHypothesis::QPeriodicity,
                index: i,
            });
        }
    }
    for i in 1..=q - 2 {
        if d.get(i) != d.get(q - 1 - i) {
            return Err(ApapError::Hypothesis {
                which: QHypothesis::QPalindrome,
                index: i,
            });
        }
    }
    if !d.get(q - 1).plus(d.get(q)).is_zero_elem() {
        return Err(ApapError::Hypothesis {
            which: QHypothesis::QCancellation,
            index: q - 1,
        });
    }

    let determined: Vec<i64> = d
        .range()
        .filter(|&i| {
            (1..=q).contains(&i) || {
                let r = i.rem_euclid(p);
                r != 0 && r != p - 1
            }
        })
        .collect();

    let g = p.gcd(&q);
    if g > 1 {
        let structure = apap_structure(d, g).map_err(|e| ApapError::ConclusionFailed {
            g,
            reason: e.to_string(),
        })?;
        let zero_indices: Vec<i64> = determined
            .iter()
            .copied()
            .filter(|i| {
                let r = i.rem_euclid(g);
                r == 0 || r == g - 1
            })
            .collect();
        if let Some(i) = zero_indices.iter().find(|&&i| !d.get(i).is_zero_elem()) {
            return Err(ApapError::ConclusionFailed {
                g,
                reason: format!("entry at index {i} should vanish"),
            });
        }
        Ok(GcdReduction::Period {
            structure,
            zero_indices,
        })
    } else {
        let value = (1..=q)
            .map(|i| d.get(i))
            .find(|v| !v.is_zero_elem())
            .unwrap_or(d.get(1))
            .clone();
        let minus = value.negated();
        if let Some(i) = determined
            .iter()
            .find(|&&i| *d.get(i) != value && *d.get(i) != minus)
        {
            return Err(ApapError::ConclusionFailed {
                g,
                reason: format!("entry at index {i} differs from ±{value:?}"),
            });
        }
        Ok(GcdReduction::ConstantUpToSign {
            value,
            checked_indices: determined,
        })
    }
}

/// Smallest divisor `p ≥ 2` of `p0` at which the sequence is APAP.
pub fn minimal_apap_period<T: GroupElement>(d: &Seq<T>, p0: i64) -> Result<i64, ApapError> {
    apap_structure(d, p0)?;
    for p in 2..p0 {
        if p0 % p == 0 && is_apap(d, p)? {
            return Ok(p);
        }
    }
    Ok(p0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Period-3 pattern `b, α, -α` placed at residues 1, 2, 0.
    fn period3(radius: i64, b: i64, alpha: i64) -> Seq<i64> {
        Seq::from_fn(radius, |i| match i.rem_euclid(3) {
            1 => b,
            2 => alpha,
            _ => -alpha,
        })
        .unwrap()
    }

    #[test]
    fn zero_sequence_is_apap_everywhere() {
        let z = Seq::from_fn(6, |_| 0i64).unwrap();
        for p in 2..=6 {
            assert!(is_apap(&z, p).unwrap());
        }
        assert_eq!(
            minimal_apap_period(&Seq::from_fn(12, |_| 0i64).unwrap(), 12).unwrap(),
            2
        );
    }

    #[test]
    fn period_three_example() {
        let d = period3(9, 5, 7);
        assert!(is_apap(&d, 3).unwrap());
        assert!(!is_apap(&d, 2).unwrap());
        assert!(!is_apap(&d, 9).unwrap());
        assert_eq!(minimal_apap_period(&d, 3).unwrap(), 3);
        let s = apap_structure(&d, 3).unwrap();
        assert_eq!(s.block, vec![5]);
        assert_eq!(block_sum(&s), 5);
        assert_eq!(s.materialize(), d);
        assert!(consecutive_sum_check(&d, 3, 1).unwrap());
        assert!(consecutive_sum_check(&d, 3, 2).unwrap());
        assert!(consecutive_sum_check(&d, 3, 0).unwrap());
    }

    #[test]
    fn minimal_period_among_divisors() {
        // cancellation values alternate α, -α, β so the length-9 block is
        // also palindromic: b α -α b -α α b
        let d = Seq::from_fn(12, |i| {
            let gamma = |j: i64| match j.rem_euclid(9) {
                3 => 7,
                6 => -7,
                _ => 2,
            };
            match i.rem_euclid(3) {
                1 => 5i64,
                2 => gamma(i + 1),
                _ => -gamma(i),
            }
        })
        .unwrap();
        assert!(is_apap(&d, 9).unwrap());
        assert_eq!(minimal_apap_period(&d, 9).unwrap(), 3);
        // only APAP at the prime itself
        let q = Seq::from_fn(12, |i| match i.rem_euclid(7) {
            1 | 5 => 1i64,
            2 | 4 => 2,
            3 => 3,
            _ => 0,
        })
        .unwrap();
        assert_eq!(minimal_apap_period(&q, 7).unwrap(), 7);
    }

    #[test]
    fn period_out_of_range() {
        let d = period3(4, 1, 1);
        assert_eq!(
            is_apap(&d, 1),
            Err(ApapError::PeriodOutOfRange { p: 1, radius: 4 })
        );
        assert!(is_apap(&d, 5).is_err());
    }

    #[test]
    fn block_sums() {
        let p2 = Seq::from_fn(4, |i| if i.rem_euclid(2) == 0 { -3 } else { 3 }).unwrap();
        assert_eq!(apap_structure(&p2, 2).unwrap().block_sum, 0);
        let p5 = Seq::from_fn(10, |i| match i.rem_euclid(5) {
            1 | 3 => 2,
            2 => 11,
            4 => 1,
            _ => -1,
        })
        .unwrap();
        let s = apap_structure(&p5, 5).unwrap();
        assert_eq!(s.block, vec![2, 11, 2]);
        assert_eq!(s.block_sum, 2 * 2 + 11);
    }

    #[test]
    fn consecutive_sum_requires_apap() {
        let d = Seq::from_fn(6, |_| 1i64).unwrap();
        assert!(matches!(
            consecutive_sum_check(&d, 3, 1),
            Err(ApapError::NotApap {
                violation: ApapViolation::Cancellation { .. },
                ..
            })
        ));
    }

    #[test]
    fn violations_are_located() {
        let mut entries: Vec<i64> = period3(6, 1, 2).entries().to_vec();
        // break periodicity at i = 4 (residue 1)
        entries[(4 + 6) as usize] = 9;
        let d = Seq::new(6, entries).unwrap();
        assert_eq!(
            first_violation(&d, 3).unwrap(),
            Some(ApapViolation::Periodicity { i: 1 })
        );
    }

    #[test]
    fn residues() {
        assert_eq!(residue_1_to_q(0, 3).unwrap(), 3);
        assert_eq!(residue_1_to_q(7, 3).unwrap(), 1);
        assert_eq!(residue_1_to_q(-1, 4).unwrap(), 3);
        assert_eq!(residue_1_to_q(5, 1).unwrap(), 1);
        assert_eq!(residue_1_to_q(5, 0), Err(ApapError::InvalidModulus(0)));
    }

    #[test]
    fn closed_form_examples() {
        assert!(equiv_related(1, 4, 6, 3).unwrap());
        assert!(equiv_related(0, 2, 6, 3).unwrap());
        assert!(!equiv_related(0, 1, 6, 3).unwrap());
        for (x, y) in [(0, 1), (3, 8), (-5, 2)] {
            assert!(equiv_related(x, y, 6, 4).unwrap());
        }
        assert!(equiv_related(17, 17, 11, 7).unwrap());
        assert!(equiv_related(1, 1, 3, 3).is_err());
    }

    #[test]
    fn oracle_examples() {
        let l = 3 * 6;
        assert!(equiv_closure_oracle(5, 5, 6, 3, l).unwrap());
        assert!(equiv_closure_oracle(1, 4, 6, 3, l).unwrap());
        assert!(!equiv_closure_oracle(0, 1, 6, 3, l).unwrap());
        let c = EquivClosure::new(5, 2, 30).unwrap();
        for x in -10..=10 {
            for y in -10..=10 {
                assert!(c.related(x, y).unwrap());
            }
        }
        assert!(matches!(
            c.related(11, 0),
            Err(ApapError::OutsideCentralThird { .. })
        ));
        assert!(matches!(
            EquivClosure::new(6, 4, 10),
            Err(ApapError::ClosureRadiusTooSmall { required: 36, .. })
        ));
    }

    #[test]
    fn gcd_reduce_zero_sequence() {
        let z = Seq::from_fn(12, |_| 0i64).unwrap();
        let r = gcd_reduce(&z, 6, 4).unwrap();
        assert_eq!(r.period(), Some(2));
    }

    #[test]
    fn gcd_reduce_recovers_period_g() {
        // period-3 APAP is also APAP with period 6; q = 3 recovers 3.
        let d = Seq::from_fn(12, |i| match i.rem_euclid(3) {
            1 => 4i64,
            _ => 0,
        })
        .unwrap();
        assert!(is_apap(&d, 6).unwrap());
        let r = gcd_reduce(&d, 6, 3).unwrap();
        assert_eq!(r.period(), Some(3));
    }

    #[test]
    fn gcd_reduce_coprime_is_constant_up_to_sign() {
        // p = 3, q = 2: Δ(1) + Δ(2) = 0 forces ±b on the determined indices.
        let d = Seq::from_fn(9, |i| match i.rem_euclid(3) {
            1 => 5i64,
            2 => -5,
            _ => 5,
        })
        .unwrap();
        match gcd_reduce(&d, 3, 2).unwrap() {
            GcdReduction::ConstantUpToSign { value, .. } => assert_eq!(value, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gcd_reduce_reports_failed_hypothesis() {
        let d = period3(9, 5, 7);
        assert_eq!(
            gcd_reduce(&d, 3, 2),
            Err(ApapError::Hypothesis {
                which: QHypothesis::QCancellation,
                index: 1
            })
        );
    }
}
