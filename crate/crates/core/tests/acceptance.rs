//! Acceptance gate: one test per criterion, each printing one
//! `A<k> PASS — <what was checked>` line on success. Every comparison is an
//! exact rational equality; there are no tolerances anywhere in this file.

use modpic_core::basis::{
    canonical_boundary, enumerate_basis, BasisElement, MarkSet, SpaceId,
};
use modpic_core::certify::{
    bn_space_general, bn_space_n1, showtriv_propagate, theta_rank_certificate,
};
use modpic_core::class::DivisorClass;
use modpic_core::classes::{
    bn_class, span_w2_coefficient, w2_reduced, weierstrass_class, ThetaIndex,
};
use modpic_core::counting::{a_count, even_genus_pair_check, odd_genus_pair_check};
use modpic_core::families::{attach_family, fiber_family, standard_catalog};
use modpic_core::linalg::RationalMatrix;
use modpic_core::maps::{
    bubble_pullback, elliptic_tails_pullback, forgetful_pullback, genus2_tail_pullback,
    genus2_tail_pullback_with, G2Sign, TailGenusReading,
};
use modpic_core::rational::{binomial, rat, ratio};
use modpic_core::serial::{parse_class, serialize_class};
use modpic_core::{Integer, Rational};
use num_traits::Zero;
use std::collections::BTreeMap;

fn pulled_bn(g: u32) -> DivisorClass {
    forgetful_pullback(g, 1, 1)
        .unwrap()
        .apply(&bn_class(g).unwrap())
        .unwrap()
}

#[test]
fn a01_elliptic_tails_annihilate_the_weierstrass_class() {
    for g in 3u32..=40 {
        let image = elliptic_tails_pullback(g)
            .unwrap()
            .apply(&weierstrass_class(g).unwrap())
            .unwrap();
        assert!(image.is_zero(), "A1 FAIL — nonzero image at g={g}");
    }
    println!("A1 PASS — elliptic-tails pullback annihilates the Weierstrass class, 3 <= g <= 40");
}

#[test]
fn a02_elliptic_tails_annihilate_the_pulled_brill_noether_class() {
    for g in 3u32..=40 {
        let image = elliptic_tails_pullback(g)
            .unwrap()
            .apply(&pulled_bn(g))
            .unwrap();
        assert!(image.is_zero(), "A2 FAIL — nonzero image at g={g}");
    }
    println!(
        "A2 PASS — elliptic-tails pullback annihilates the pulled-back Brill-Noether class, 3 <= g <= 40"
    );
}

#[test]
fn a03_genus2_tail_sends_weierstrass_to_weierstrass() {
    let target = w2_reduced();
    for g in 4u32..=40 {
        let image = genus2_tail_pullback(g, 1)
            .unwrap()
            .apply(&weierstrass_class(g).unwrap())
            .unwrap();
        assert_eq!(image, target, "A3 FAIL at g={g}");
    }
    println!(
        "A3 PASS — genus-2-tail pullback carries the Weierstrass class to the genus-2 one, 4 <= g <= 40"
    );
}

#[test]
fn a04_genus2_tail_scales_brill_noether_and_the_plus_sign_fails() {
    for g in 4u32..=40 {
        let image = genus2_tail_pullback(g, 1)
            .unwrap()
            .apply(&pulled_bn(g))
            .unwrap();
        let expected = w2_reduced().scale(&ratio(2 * (i64::from(g) - 2), 3));
        assert_eq!(image, expected, "A4 FAIL — wrong multiple at g={g}");

        let plus = genus2_tail_pullback_with(g, 1, G2Sign::Plus, TailGenusReading::GMinus2)
            .unwrap()
            .apply(&pulled_bn(g))
            .unwrap();
        assert_eq!(
            span_w2_coefficient(&plus).unwrap(),
            None,
            "A4 FAIL — plus sign unexpectedly stays in the Weierstrass span at g={g}"
        );
    }
    println!(
        "A4 PASS — Brill-Noether maps to (2(g-2)/3) times the genus-2 Weierstrass class and the plus sign leaves its span, 4 <= g <= 40"
    );
}

#[test]
fn a05_single_mark_kernel_has_dimension_two_with_the_named_members() {
    for g in 4u32..=30 {
        let certificate = bn_space_n1(g).unwrap();
        assert!(
            certificate.pass && certificate.achieved_dimension == 2,
            "A5 FAIL — dimension {} at g={g}",
            certificate.achieved_dimension
        );
        for label in ["membership:weierstrass", "membership:pulled-bn"] {
            let witness = certificate
                .witnesses
                .iter()
                .find(|w| w.label == label)
                .expect("witness present");
            assert!(witness.pass, "A5 FAIL — witness {label} at g={g}");
        }
    }
    println!(
        "A5 PASS — single-mark kernel certificate: dimension 2 containing both named classes, 4 <= g <= 30"
    );
}

#[test]
fn a06_theta_pairing_matrices_have_full_rank() {
    for g in 4u32..=30 {
        let certificate = theta_rank_certificate(g, 1).unwrap();
        assert!(
            certificate.pass && certificate.rank == (g - 2) as usize,
            "A6 FAIL — rank {} of {} at (g={g}, n=1)",
            certificate.rank,
            certificate.expected
        );
    }
    for g in 4u32..=15 {
        let certificate = theta_rank_certificate(g, 2).unwrap();
        assert!(
            certificate.pass && certificate.rank == certificate.expected,
            "A6 FAIL — rank {} of {} at (g={g}, n=2)",
            certificate.rank,
            certificate.expected
        );
    }
    println!(
        "A6 PASS — theta rank g-2 at one mark (4 <= g <= 30) and full marked rank at two marks (4 <= g <= 15)"
    );
}

#[test]
fn a07_point_counts_match_their_closed_forms() {
    let golden: &[((u64, u64, u64), i64)] = &[
        ((5, 1, 3), 120),
        ((4, 2, 3), 96),
        ((4, 3, 2), 36),
        ((4, 1, 2), 24),
        ((4, 1, 4), 60),
    ];
    for &((g, m, n), expected) in golden {
        assert_eq!(
            a_count(g, m, n).unwrap(),
            Integer::from(expected),
            "A7 FAIL — a_count({g},{m},{n})"
        );
    }
    let even4 = even_genus_pair_check(4).unwrap();
    assert_eq!(even4.lhs, Integer::from(132), "A7 FAIL — even lhs at g=4");
    assert_eq!(even4.rhs, Integer::from(84), "A7 FAIL — even rhs at g=4");
    assert_eq!(
        even4.difference,
        Integer::from(48),
        "A7 FAIL — difference at g=4"
    );

    for g in (3u64..=41).step_by(2) {
        assert_eq!(
            a_count(g, 1, 3).unwrap(),
            Integer::from(24) * binomial(g, (g + 3) / 2),
            "A7 FAIL — closed form at g={g}"
        );
        let check = odd_genus_pair_check(g).unwrap();
        let below = Integer::from(g - 1);
        let above = Integer::from(g + 1);
        let middle = Integer::from(g);
        assert!(
            check.nonzero
                && check.reduced_lhs == &below * &above
                && check.reduced_rhs == &middle * &above,
            "A7 FAIL — odd reduction at g={g}"
        );
    }
    for g in (4u64..=40).step_by(2) {
        let check = even_genus_pair_check(g).unwrap();
        assert!(check.nonzero, "A7 FAIL — even counts collide at g={g}");
        // The scaled difference identity is re-verified inside the check
        // itself; a successful return certifies it.
    }
    println!(
        "A7 PASS — point-count goldens, the 48 gap, the odd closed form to g=41, and both reductions to g=40/41"
    );
}

#[test]
fn a08_family_engine_reproduces_the_quoted_pairings() {
    let space = SpaceId::new(3, 8).unwrap();
    for k in 2u32..=6 {
        let s = MarkSet::from_marks(1..=k).unwrap();
        let family = attach_family(space, s).unwrap();
        let main = BasisElement::Boundary(canonical_boundary(space, 0, s).unwrap());
        assert_eq!(
            family.intersect(&main).unwrap(),
            2 - i64::from(k),
            "A8 FAIL — main row at |S|={k}"
        );
        for x in s.iter() {
            let rest = s.without(x);
            if rest.len() >= 2 {
                let b = BasisElement::Boundary(canonical_boundary(space, 0, rest).unwrap());
                assert_eq!(
                    family.intersect(&b).unwrap(),
                    1,
                    "A8 FAIL — unit row at |S|={k}, x={x}"
                );
            }
        }
        for i in 1..=8 {
            assert_eq!(
                family.intersect(&BasisElement::Omega(i)).unwrap(),
                0,
                "A8 FAIL — omega_{i} at |S|={k}"
            );
        }
        assert_eq!(family.intersect(&BasisElement::Lambda).unwrap(), 0);
        assert_eq!(family.intersect(&BasisElement::DeltaIrr).unwrap(), 0);
    }
    let first = MarkSet::from_marks([1]).unwrap();
    for g in 3u32..=12 {
        let fiber = fiber_family(g + 1, g + 1).unwrap();
        let idx = ThetaIndex { i: 1, s: first };
        assert_eq!(
            fiber.theta_pairing(g, 1, &idx).unwrap(),
            i64::from(g),
            "A8 FAIL — fiber theta_1 degree at g={g}"
        );
    }
    println!(
        "A8 PASS — attach-family rows (2-|S|, unit rows, omega zero) for |S| <= 6 and fiber theta_1 degree g"
    );
}

#[test]
fn a09_forwarded_pairings_cross_check_the_tails_table() {
    let first = MarkSet::from_marks([1]).unwrap();
    for g in 3u32..=12 {
        let pull = elliptic_tails_pullback(g).unwrap();
        let space = SpaceId::new(g, 1).unwrap();
        let basis = enumerate_basis(space);
        for family in standard_catalog(g, 1).unwrap() {
            for b in &basis {
                let d = DivisorClass::term(space, *b, rat(1)).unwrap();
                let direct = family.forward_pair(&d).unwrap();
                let combo = pull.apply(&d).unwrap();
                let mut formal = Rational::zero();
                for (i, c) in combo.iter() {
                    let idx = ThetaIndex { i: *i, s: first };
                    formal += c * rat(family.theta_pairing(g, 1, &idx).unwrap());
                }
                assert_eq!(
                    direct, formal,
                    "A9 FAIL — g={g}, moving point {:?}, basis {b}",
                    family.moving()
                );
            }
        }
    }
    println!(
        "A9 PASS — forwarded intersection numbers equal the formal theta pairings of the tails table, 3 <= g <= 12"
    );
}

#[test]
fn a10_multi_mark_kernels_have_the_predicted_dimensions() {
    for g in 4u32..=15 {
        let certificate = bn_space_general(g, 2).unwrap();
        assert!(
            certificate.pass && certificate.achieved_dimension == 4,
            "A10 FAIL — dimension {} of 4 at (g={g}, n=2)",
            certificate.achieved_dimension
        );
    }
    for g in 4u32..=10 {
        let certificate = bn_space_general(g, 3).unwrap();
        assert!(
            certificate.pass && certificate.achieved_dimension == 7,
            "A10 FAIL — dimension {} of 7 at (g={g}, n=3)",
            certificate.achieved_dimension
        );
    }
    println!(
        "A10 PASS — kernel dimension 4 at two marks (4 <= g <= 15) and 7 at three marks (4 <= g <= 10)"
    );
}

#[test]
fn a11_pair_coefficients_propagate_uniquely() {
    let pair_map = |n: u32, f: &dyn Fn(u32, u32) -> Rational| {
        let mut out = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                out.insert((i, j), f(i, j));
            }
        }
        out
    };
    let set = |list: &[u32]| MarkSet::from_marks(list.iter().copied()).unwrap();

    let out = showtriv_propagate(3, &pair_map(3, &|_, _| rat(1))).unwrap();
    assert_eq!(out[&MarkSet::full(3)], rat(3), "A11 FAIL — all-ones triple");

    let out = showtriv_propagate(4, &pair_map(4, &|_, _| rat(0))).unwrap();
    assert!(
        out.values().all(Rational::is_zero),
        "A11 FAIL — zero input must propagate to zero"
    );

    let out =
        showtriv_propagate(4, &pair_map(4, &|i, j| rat(i64::from((i, j) == (1, 2))))).unwrap();
    for (marks, expected) in [
        (&[1u32, 2, 3][..], 1i64),
        (&[1, 3, 4][..], 0),
        (&[1, 2, 3, 4][..], 1),
    ] {
        assert_eq!(
            out[&set(marks)],
            rat(expected),
            "A11 FAIL — indicator example at {marks:?}"
        );
    }

    // Uniqueness: with the pairs pinned, the relation rows restricted to the
    // larger subsets form a square system of full rank.
    let n = 5u32;
    let unknowns: Vec<MarkSet> = MarkSet::full(n)
        .subsets()
        .into_iter()
        .filter(|s| s.len() >= 3)
        .collect();
    let position: BTreeMap<MarkSet, usize> = unknowns
        .iter()
        .enumerate()
        .map(|(k, s)| (*s, k))
        .collect();
    let mut matrix = RationalMatrix::new(unknowns.len());
    for s in &unknowns {
        let mut row = vec![Rational::zero(); unknowns.len()];
        row[position[s]] = rat(2 - i64::from(s.len()));
        for x in s.iter() {
            let rest = s.without(x);
            if rest.len() >= 3 {
                row[position[&rest]] += rat(1);
            }
        }
        matrix.push_row(row).unwrap();
    }
    assert_eq!(
        matrix.rank(),
        unknowns.len(),
        "A11 FAIL — the triviality relations do not force a unique extension"
    );
    println!(
        "A11 PASS — worked propagation examples, zero-to-zero, and full-rank uniqueness of the extension"
    );
}

mod property_suites {
    use super::*;
    use proptest::prelude::*;
    use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

    fn runner() -> TestRunner {
        let config = Config {
            cases: 1000,
            failure_persistence: None,
            ..Config::default()
        };
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    }

    fn rational() -> impl Strategy<Value = Rational> {
        (-60i64..=60, 1i64..=24).prop_map(|(p, q)| ratio(p, q))
    }

    /// A valid space: genus-0 spaces need at least three marks.
    fn space() -> impl Strategy<Value = SpaceId> {
        (0u32..=8, 0u32..=8)
            .prop_filter_map("stable space", |(g, n)| SpaceId::new(g, n).ok())
    }

    /// A small random class on `space`, assembled from canonical elements.
    fn class_on(
        space: SpaceId,
        picks: &[(prop::sample::Index, Rational)],
    ) -> DivisorClass {
        let basis = enumerate_basis(space);
        let mut d = DivisorClass::zero(space);
        if basis.is_empty() {
            return d; // (0, 3) has a trivial divisor group
        }
        for (index, coeff) in picks {
            let element = basis[index.index(basis.len())];
            d.add_term(element, coeff.clone()).unwrap();
        }
        d
    }

    fn suite_canonicalization(runner: &mut TestRunner) -> Result<(), proptest::test_runner::TestError<(SpaceId, u32, u64)>> {
        runner.run(
            &(space(), 0u32..=8, proptest::num::u64::ANY),
            |(space, i, bits)| {
                if i > space.g {
                    return Ok(());
                }
                let mut marks = MarkSet::EMPTY;
                for m in 1..=space.n {
                    if bits & (1 << (m - 1)) != 0 {
                        marks = marks.with(m).unwrap();
                    }
                }
                let Ok(canonical) = canonical_boundary(space, i, marks) else {
                    return Ok(()); // unstable index: nothing to canonicalize
                };
                let again = canonical_boundary(space, canonical.genus, canonical.marks)
                    .map_err(|_| TestCaseError::fail("canonical index must stay valid"))?;
                prop_assert_eq!(again, canonical);
                let (mirror_genus, mirror_marks) = canonical.mirror(space);
                let from_mirror = canonical_boundary(space, mirror_genus, mirror_marks)
                    .map_err(|_| TestCaseError::fail("mirror must stay valid"))?;
                prop_assert_eq!(from_mirror, canonical);
                Ok(())
            },
        )
    }

    fn suite_psi_expansion(runner: &mut TestRunner) -> Result<(), proptest::test_runner::TestError<(u32, u32, u32, Rational)>> {
        runner.run(
            &(1u32..=6, 1u32..=7, 1u32..=7, rational()),
            |(g, n, raw_i, coeff)| {
                let i = 1 + (raw_i - 1) % n;
                let space = SpaceId::new(g, n).unwrap();
                let expanded =
                    DivisorClass::term(space, BasisElement::Psi(i), coeff.clone()).unwrap();
                let mut expected =
                    DivisorClass::term(space, BasisElement::Omega(i), coeff.clone()).unwrap();
                for s in MarkSet::full(n).subsets() {
                    if s.len() >= 2 && s.contains(i) {
                        let b = canonical_boundary(space, 0, s).unwrap();
                        expected
                            .add_term(BasisElement::Boundary(b), coeff.clone())
                            .unwrap();
                    }
                }
                prop_assert_eq!(expanded, expected);
                Ok(())
            },
        )
    }

    type CompositionCase = (u32, u32, u32, u32, Vec<(prop::sample::Index, Rational)>);

    fn suite_forgetful_composition(runner: &mut TestRunner) -> Result<(), proptest::test_runner::TestError<CompositionCase>> {
        runner.run(
            &(
                1u32..=5,
                2u32..=5,
                1u32..=5,
                1u32..=6,
                prop::collection::vec((prop::sample::Index::arbitrary(), rational()), 1..=4),
            ),
            |(g, n, raw_j, raw_k, picks)| {
                let j = 1 + (raw_j - 1) % n;
                let k = 1 + (raw_k - 1) % (n + 1);
                let d = class_on(SpaceId::new(g, n - 1).unwrap(), &picks);
                let first_a = forgetful_pullback(g, n, j).unwrap();
                let second_a = forgetful_pullback(g, n + 1, k).unwrap();
                // Inserting at j then k lands the two new marks at the same
                // final positions as the swapped order below.
                let (first_b, second_b) = if k <= j {
                    (
                        forgetful_pullback(g, n, k).unwrap(),
                        forgetful_pullback(g, n + 1, j + 1).unwrap(),
                    )
                } else {
                    (
                        forgetful_pullback(g, n, k - 1).unwrap(),
                        forgetful_pullback(g, n + 1, j).unwrap(),
                    )
                };
                let via_then = first_a.then(&second_a).unwrap().apply(&d).unwrap();
                let stepwise = second_a.apply(&first_a.apply(&d).unwrap()).unwrap();
                let swapped = second_b.apply(&first_b.apply(&d).unwrap()).unwrap();
                prop_assert_eq!(&via_then, &stepwise);
                prop_assert_eq!(&via_then, &swapped);
                Ok(())
            },
        )
    }

    type BubbleCase = (u32, u32, u32, u32, Vec<(prop::sample::Index, Rational)>);

    fn suite_bubble_splits_forgetful(runner: &mut TestRunner) -> Result<(), proptest::test_runner::TestError<BubbleCase>> {
        runner.run(
            &(
                1u32..=5,
                1u32..=5,
                1u32..=6,
                1u32..=6,
                prop::collection::vec((prop::sample::Index::arbitrary(), rational()), 1..=4),
            ),
            |(g, n, raw_i, raw_j, picks)| {
                let a = 1 + (raw_i - 1) % (n + 1);
                let b = 1 + (raw_j - 1) % (n + 1);
                if a == b {
                    return Ok(());
                }
                let (i, j) = (a.min(b), a.max(b));
                let d = class_on(SpaceId::new(g, n).unwrap(), &picks);
                let up = forgetful_pullback(g, n + 1, j).unwrap().apply(&d).unwrap();
                let back = bubble_pullback(g, n, i, j).unwrap().apply(&up).unwrap();
                prop_assert_eq!(back, d);
                Ok(())
            },
        )
    }

    type SerializationCase = (SpaceId, Vec<(prop::sample::Index, Rational)>);

    fn suite_serialization(runner: &mut TestRunner) -> Result<(), proptest::test_runner::TestError<SerializationCase>> {
        runner.run(
            &(
                space(),
                prop::collection::vec((prop::sample::Index::arbitrary(), rational()), 0..=5),
            ),
            |(space, picks)| {
                let d = class_on(space, &picks);
                let text = serialize_class(&d);
                let back = parse_class(&text)
                    .map_err(|e| TestCaseError::fail(format!("parse failed: {e}")))?;
                prop_assert_eq!(back, d);
                Ok(())
            },
        )
    }

    #[test]
    fn a12_property_suites_hold_for_one_thousand_cases_each() {
        suite_canonicalization(&mut runner()).expect("A12 FAIL — canonicalization idempotence");
        suite_psi_expansion(&mut runner()).expect("A12 FAIL — psi/omega round trip");
        suite_forgetful_composition(&mut runner())
            .expect("A12 FAIL — forgetful composition identities");
        suite_bubble_splits_forgetful(&mut runner())
            .expect("A12 FAIL — bubble after forgetful identity");
        suite_serialization(&mut runner()).expect("A12 FAIL — serialization round trip");
        println!(
            "A12 PASS — five property suites (canonicalization, psi expansion, composition, bubble, serialization), 1000 cases each"
        );
    }
}
