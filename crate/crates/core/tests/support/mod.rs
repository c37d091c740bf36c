//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's elimination, subspace or closure code.

#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use num_traits::Zero;
use qhom::io::window_from_json;
use qhom::linalg::Rational;
use qhom::{QuasiHomWindow, SymMat};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> QuasiHomWindow {
    let text = std::fs::read_to_string(fixture_path(name)).expect("fixture exists");
    window_from_json(&text).expect("fixture parses")
}

/// All permutations of `0..k` with their signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, i32)> {
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(k - 1) {
        // insert k-1 at every position; moving it left by s places flips sign s times
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, k - 1);
            let shifts = perm.len() - pos;
            out.push((p, if shifts % 2 == 0 { sign } else { -sign }));
        }
    }
    out
}

/// Leibniz expansion.
pub fn det(m: &[Vec<Rational>]) -> Rational {
    let k = m.len();
    permutations(k)
        .into_iter()
        .map(|(perm, sign)| {
            let prod = perm
                .iter()
                .enumerate()
                .fold(Rational::from_integer(1.into()), |acc, (i, &j)| {
                    acc * &m[i][j]
                });
            if sign > 0 {
                prod
            } else {
                -prod
            }
        })
        .fold(Rational::zero(), |a, b| a + b)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Largest `k` with a nonzero `k×k` minor.
pub fn minors_rank(m: &SymMat) -> usize {
    let n = m.dim();
    for k in (1..=n).rev() {
        for rows in subsets(n, k) {
            for cols in subsets(n, k) {
                let minor: Vec<Vec<Rational>> = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| m.get(i, j).clone()).collect())
                    .collect();
                if !det(&minor).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

/// Symmetric matrix from its upper triangle, row by row.
pub fn sym_from_upper(n: usize, upper: &[i64]) -> SymMat {
    let mut it = upper.iter();
    let mut m = SymMat::zero(n);
    for i in 0..n {
        for j in i..n {
            m.set(
                i,
                j,
                Rational::from_integer((*it.next().expect("enough entries")).into()),
            );
        }
    }
    m
}

/// Connected components of the graph generated by `x ~ x + q`,
/// `x ~ q - 1 - x` and `x ~ p - 1 - x` on `[-radius, radius]`, by BFS.
pub fn bfs_components(p: i64, q: i64, radius: i64) -> Vec<usize> {
    let len = (2 * radius + 1) as usize;
    let at = |x: i64| (x + radius) as usize;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); len];
    let mut edge = |a: i64, b: i64| {
        if a.abs() <= radius && b.abs() <= radius {
            adj[at(a)].push(at(b));
            adj[at(b)].push(at(a));
        }
    };
    for x in -radius..=radius {
        edge(x, x + q);
    }
    for x in 0..q {
        edge(x, q - 1 - x);
    }
    for x in 0..p {
        edge(x, p - 1 - x);
    }
    let mut comp = vec![usize::MAX; len];
    let mut next = 0;
    for start in 0..len {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    comp
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// Brute-force maximum defect rank over all in-window pairs, ranked with
/// the all-minors oracle.
pub fn brute_max_defect(f: &QuasiHomWindow) -> usize {
    let r = f.radius();
    let mut best = 0;
    for x in -r..=r {
        for y in -r..=r {
            if let Some(d) = f.defect(x, y) {
                best = best.max(minors_rank(&d));
            }
        }
    }
    best
}

/// Checks the gcd conclusion with plain loops; panics on failure.
pub fn check_reduction(d: &qhom::Seq<i64>, p: i64, q: i64) {
    let g = gcd(p, q);
    let determined = |i: i64| (1..=q).contains(&i) || ![0, p - 1].contains(&i.rem_euclid(p));
    match qhom::apap::gcd_reduce(d, p, q).unwrap() {
        qhom::apap::GcdReduction::Period { structure, .. } => {
            assert!(g > 1);
            assert_eq!(structure.period, g);
            for i in d.lo()..=d.hi() {
                let r = i.rem_euclid(g);
                if determined(i) && (r == 0 || r == g - 1) {
                    assert_eq!(*d.get(i), 0, "p={p} q={q} i={i}");
                }
                if r != 0 && r != g - 1 && i + g <= d.hi() {
                    assert_eq!(d.get(i), d.get(i + g), "period g fails at {i}");
                }
            }
            for i in 1..=g - 2 {
                assert_eq!(d.get(i), d.get(g - 1 - i));
            }
        }
        qhom::apap::GcdReduction::ConstantUpToSign { .. } => {
            assert_eq!(g, 1);
            let v = d.get(1).abs();
            for i in (d.lo()..=d.hi()).filter(|&i| determined(i)) {
                assert_eq!(d.get(i).abs(), v, "p={p} q={q} i={i}");
            }
        }
    }
}
