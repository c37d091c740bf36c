use proptest::prelude::*;

use qhom::apap::{consecutive_sum_check, is_apap};
use qhom::approximator::certify;
use qhom::generators::{
    candidate_window, constrained_sequence, generate, Epsilon, Family, GenSpec,
};
use qhom::io::{certificate_from_json, certificate_to_json, window_from_json, window_to_json};
use qhom::linalg::{format_rational, parse_rational, ratio, Rational};
use qhom::quasihom::{
    delta, delta_form_defect, normalize, reconstruct, verify_delta_form, verify_direct,
};
use qhom::{QuasiHomWindow, SymMat};

fn sym(n: usize) -> impl Strategy<Value = SymMat> {
    (
        prop::collection::vec(-4i64..=4, n * n),
        prop::collection::vec(1i64..=3, n * n),
    )
        .prop_map(move |(nums, dens)| {
            SymMat::from_fn(n, |i, j| {
                let k = i.min(j) * n + i.max(j);
                ratio(nums[k], dens[k])
            })
        })
}

fn rank_one(n: usize) -> impl Strategy<Value = SymMat> {
    (prop::collection::vec(-2i64..=2, n), -3i64..=3).prop_map(|(v, c)| {
        let v: Vec<Rational> = v.into_iter().map(|x| ratio(x, 1)).collect();
        SymMat::outer(&v).scale_int(c)
    })
}

fn sym_pair() -> impl Strategy<Value = (SymMat, SymMat)> {
    (1usize..=4).prop_flat_map(|n| (sym(n), sym(n)))
}

/// `f(x) = x·A + R(x)` with each `R(x)` of rank at most one; mostly not
/// quasihomomorphisms, which exercises both verdicts.
fn window() -> impl Strategy<Value = QuasiHomWindow> {
    (1usize..=3, 2i64..=5).prop_flat_map(|(n, r)| {
        (
            sym(n),
            prop::collection::vec(rank_one(n), (2 * r + 1) as usize),
            prop::bool::ANY,
        )
            .prop_map(move |(a, rs, sparse)| {
                QuasiHomWindow::from_fn(n, r, |x| {
                    let k = (x + r) as usize;
                    let perturb = if sparse && !k.is_multiple_of(3) {
                        SymMat::zero(n)
                    } else {
                        rs[k].clone()
                    };
                    &a.scale_int(x) + &perturb
                })
                .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn rank_is_a_norm((a, b) in sym_pair()) {
        prop_assert_eq!(a.rank() == 0, a.is_zero());
        prop_assert!((&a + &b).rank() <= a.rank() + b.rank());
        prop_assert_eq!((-&a).rank(), a.rank());
    }

    #[test]
    fn image_is_perp_of_kernel(a in (1usize..=5).prop_flat_map(sym)) {
        prop_assert_eq!(a.image(), a.kernel().perp());
        prop_assert_eq!(a.rank() + a.kernel().dim(), a.dim());
    }

    #[test]
    fn disjoint_blocks_add_ranks(a in sym(2), b in sym(3)) {
        let embed = |m: &SymMat, off: usize| SymMat::from_fn(5, |i, j| {
            let k = m.dim();
            if (off..off + k).contains(&i) && (off..off + k).contains(&j) {
                m.get(i - off, j - off).clone()
            } else {
                ratio(0, 1)
            }
        });
        let (ea, eb) = (embed(&a, 0), embed(&b, 2));
        prop_assert_eq!((&ea + &eb).rank(), a.rank() + b.rank());
    }

    #[test]
    fn rational_text_round_trips(num in -1000i64..1000, den in 1i64..50) {
        let r = ratio(num, den);
        prop_assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn matrix_literal_round_trips(a in (1usize..=4).prop_flat_map(sym)) {
        let text = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<SymMat>(&text).unwrap(), a);
    }

    #[test]
    fn window_json_round_trips(f in window()) {
        prop_assert_eq!(window_from_json(&window_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn normalization_preserves_defects(f in window()) {
        let (g, c) = normalize(&f);
        prop_assert!(g.get(1).is_zero());
        prop_assert_eq!(&c, &-f.get(1));
        let r = f.radius();
        for x in -r..=r {
            for y in -r..=r {
                if let (Some(a), Some(b)) = (f.defect(x, y), g.defect(x, y)) {
                    prop_assert_eq!(a.rank(), b.rank());
                }
            }
        }
        prop_assert_eq!(verify_direct(&f, 1).c_measured, verify_direct(&g, 1).c_measured);
    }

    #[test]
    fn reconstruction_inverts_delta(f in window()) {
        let (g, _) = normalize(&f);
        let d = delta(&g);
        prop_assert_eq!(&reconstruct(&d), &g);
        prop_assert_eq!(delta(&reconstruct(&d)), d);
    }

    #[test]
    fn delta_form_matches_direct_scan(f in window()) {
        let (g, _) = normalize(&f);
        let d = delta(&g);
        prop_assert_eq!(delta_form_defect(&d).max_rank, verify_direct(&f, 1).c_measured);
        for c in 0..=3 {
            prop_assert_eq!(verify_delta_form(&d, c), verify_direct(&g, c).satisfied);
        }
    }

    #[test]
    fn certificate_ranks_are_recomputable(f in window(), seed in 0u64..1000) {
        let a = {
            let spec = GenSpec { n: f.dim(), radius: 2, seed, family: Family::Hom { base: None } };
            generate(&spec).unwrap().get(1).clone()
        };
        let cert = certify(&f, &a, 2).unwrap();
        for (x, r) in &cert.per_x_rank {
            prop_assert_eq!(*r, (f.get(*x) - &a.scale_int(*x)).rank());
        }
        prop_assert_eq!(cert.max_rank, cert.per_x_rank.values().copied().max().unwrap());
        prop_assert_eq!(certificate_from_json(&certificate_to_json(&cert)).unwrap(), cert);
    }

    #[test]
    fn constrained_sequences_are_apap_and_mirror(p in 2i64..=8, extra in 0i64..20, seed in any::<u64>()) {
        let radius = p + extra;
        let d = constrained_sequence(radius, p, None, seed).unwrap();
        prop_assert!(is_apap(&d, p).unwrap());
        prop_assert!(is_apap(&d.mirrored(), p).unwrap());
        prop_assert_eq!(d.mirrored().mirrored(), d.clone());
        for k in 0..=2 * radius / p {
            prop_assert!(consecutive_sum_check(&d, p, k).unwrap());
        }
    }

    #[test]
    fn generators_are_pure(n in 1usize..=4, radius in 2i64..=8, seed in any::<u64>(), p in 2i64..=4) {
        let specs = [
            Family::Hom { base: None },
            Family::LinePerturbed { base: None, line: None, epsilon: Epsilon::Random },
            Family::ApapCandidate { p: p.min(radius), base: None },
        ];
        for family in specs {
            let spec = GenSpec { n, radius, seed, family };
            let text = serde_json::to_string(&spec).unwrap();
            let replayed: GenSpec = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&replayed, &spec);
            prop_assert_eq!(candidate_window(&spec).unwrap(), candidate_window(&replayed).unwrap());
        }
    }

    #[test]
    fn line_perturbed_windows_verify(n in 1usize..=4, radius in 2i64..=10, seed in any::<u64>()) {
        let spec = GenSpec {
            n, radius, seed,
            family: Family::LinePerturbed { base: None, line: None, epsilon: Epsilon::Random },
        };
        let f = generate(&spec).unwrap();
        prop_assert!(verify_direct(&f, 1).satisfied);
    }
}
