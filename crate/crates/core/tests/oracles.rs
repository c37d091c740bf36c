mod support;

use qhom::apap::{equiv_related, is_apap, EquivClosure};
use qhom::generators::constrained_sequence;
use qhom::linalg::{ratio, Rational};
use qhom::SymMat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{bfs_components, check_reduction, det, lcm, minors_rank, sym_from_upper};

#[test]
fn determinant_oracle_sanity() {
    let r = |v: i64| Rational::from_integer(v.into());
    let m = vec![
        vec![r(2), r(1), r(0)],
        vec![r(1), r(3), r(1)],
        vec![r(0), r(1), r(4)],
    ];
    // 2(12 - 1) - 1(4 - 0) = 18
    assert_eq!(det(&m), r(18));
    assert_eq!(minors_rank(&SymMat::identity(4)), 4);
    assert_eq!(minors_rank(&SymMat::zero(3)), 0);
}

#[test]
fn rank_matches_all_minors_exhaustively_up_to_n3() {
    for n in 1..=3usize {
        let slots = n * (n + 1) / 2;
        let total = 3usize.pow(slots as u32);
        for code in 0..total {
            let mut c = code;
            let upper: Vec<i64> = (0..slots)
                .map(|_| {
                    let v = (c % 3) as i64 - 1;
                    c /= 3;
                    v
                })
                .collect();
            let m = sym_from_upper(n, &upper);
            assert_eq!(m.rank(), minors_rank(&m), "{m}");
        }
    }
}

#[test]
fn rank_matches_all_minors_on_seeded_n4_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let upper: Vec<i64> = (0..10).map(|_| rng.gen_range(-2..=2)).collect();
        let m = sym_from_upper(4, &upper);
        assert_eq!(m.rank(), minors_rank(&m), "{m}");
    }
    // rational entries and forced low rank
    for _ in 0..200 {
        let v: Vec<Rational> = (0..4)
            .map(|_| ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
            .collect();
        let w: Vec<Rational> = (0..4)
            .map(|_| ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
            .collect();
        let m = &SymMat::outer(&v) - &SymMat::outer(&w);
        assert_eq!(m.rank(), minors_rank(&m), "{m}");
    }
}

#[test]
fn closure_oracles_agree_with_closed_form() {
    for p in 3..=12i64 {
        for q in 2..p {
            let radius = 3 * lcm(p, q);
            let comps = bfs_components(p, q, radius);
            let uf = EquivClosure::new(p, q, radius).unwrap();
            let c = radius / 3;
            let at = |x: i64| (x + radius) as usize;
            for x in -c..=c {
                for y in -c..=c {
                    let bfs = comps[at(x)] == comps[at(y)];
                    assert_eq!(uf.related(x, y).unwrap(), bfs, "p={p} q={q} ({x},{y})");
                    assert_eq!(
                        equiv_related(x, y, p, q).unwrap(),
                        bfs,
                        "p={p} q={q} ({x},{y})"
                    );
                }
            }
        }
    }
}

#[test]
fn gcd_reduction_on_constrained_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(56);
    let mut count = 0;
    for p in 3..=9i64 {
        for q in 2..p {
            for _ in 0..4 {
                let radius = rng.gen_range(p..=30);
                let d = constrained_sequence(radius, p, Some(q), rng.gen()).unwrap();
                assert!(is_apap(&d, p).unwrap());
                check_reduction(&d, p, q);
                count += 1;
            }
        }
    }
    assert!(count >= 100);
}
