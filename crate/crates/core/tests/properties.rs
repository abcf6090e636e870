//! Property tests for the structural invariants of each module.

mod common;

use common::{dy, word_from_pairs};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thompson::convert::{
    generator_map, nf_conjugate, nf_to_pl, pl_to_treepair, pl_to_word, treepair_to_nf, word_to_pl,
};
use thompson::numerics::{glue, interval_bijection, slope_exponent};
use thompson::subgroups::{
    extend_partial_a, gens_a, gens_b, in_a, in_b, phi, sample_a, sample_b, transitive_element_a,
};
use thompson::words::{nf_from_word, nf_invert, nf_multiply, nf_product_special, NormalForm};
use thompson::{Dyadic, PLMap};

fn dyadic_in_unit() -> impl Strategy<Value = Dyadic> {
    (0u32..=10).prop_flat_map(|scale| {
        (0i64..=(1 << scale)).prop_map(move |num| Dyadic::new(num, scale as i64).unwrap())
    })
}

fn word_pairs(max_index: u32, max_len: usize) -> impl Strategy<Value = Vec<(u32, bool)>> {
    prop::collection::vec((0..max_index, any::<bool>()), 0..=max_len)
}

fn random_map() -> impl Strategy<Value = PLMap> {
    word_pairs(4, 10).prop_map(|pairs| word_to_pl(&word_from_pairs(&pairs)).unwrap())
}

proptest! {
    /// Composition evaluates pointwise: compose(f,g)(t) = f(g(t)).
    #[test]
    fn compose_matches_pointwise(fp in word_pairs(4, 8), gp in word_pairs(4, 8), t in dyadic_in_unit()) {
        let f = word_to_pl(&word_from_pairs(&fp)).unwrap();
        let g = word_to_pl(&word_from_pairs(&gp)).unwrap();
        let fg = f.compose(&g).unwrap();
        fg.validate().unwrap();
        prop_assert_eq!(fg.eval(&t).unwrap(), f.eval(&g.eval(&t).unwrap()).unwrap());
    }

    /// Inversion is an involution and composes to the identity exactly.
    #[test]
    fn invert_involution(fp in word_pairs(4, 10)) {
        let f = word_to_pl(&word_from_pairs(&fp)).unwrap();
        let inv = f.invert();
        inv.validate().unwrap();
        prop_assert_eq!(inv.invert(), f.clone());
        prop_assert_eq!(f.compose(&inv).unwrap(), PLMap::identity());
    }

    /// Every operation preserves the breakpoint invariants.
    #[test]
    fn operations_preserve_validity(fp in word_pairs(5, 8), gp in word_pairs(5, 8)) {
        let f = word_to_pl(&word_from_pairs(&fp)).unwrap();
        let g = word_to_pl(&word_from_pairs(&gp)).unwrap();
        f.validate().unwrap();
        f.invert().validate().unwrap();
        f.compose(&g).unwrap().validate().unwrap();
        if let Some((lo, hi)) = f.support() {
            prop_assert!(lo < hi);
        }
    }

    /// Normal-form multiplication is associative.
    #[test]
    fn multiplication_associative(pa in word_pairs(4, 10), pb in word_pairs(4, 10), pc in word_pairs(4, 10)) {
        let a = nf_from_word(&word_from_pairs(&pa));
        let b = nf_from_word(&word_from_pairs(&pb));
        let c = nf_from_word(&word_from_pairs(&pc));
        prop_assert_eq!(
            nf_multiply(&nf_multiply(&a, &b), &c),
            nf_multiply(&a, &nf_multiply(&b, &c))
        );
    }

    /// a · a^{-1} is the identity.
    #[test]
    fn inverse_cancels(pa in word_pairs(5, 16)) {
        let a = nf_from_word(&word_from_pairs(&pa));
        prop_assert!(nf_multiply(&a, &nf_invert(&a)).is_identity());
        prop_assert_eq!(nf_invert(&nf_invert(&a)), a);
    }

    /// word_to_pl is a homomorphism onto composition.
    #[test]
    fn homomorphism(pa in word_pairs(4, 8), pb in word_pairs(4, 8)) {
        let a = nf_from_word(&word_from_pairs(&pa));
        let b = nf_from_word(&word_from_pairs(&pb));
        let lhs = nf_to_pl(&nf_multiply(&a, &b)).unwrap();
        let rhs = nf_to_pl(&a).unwrap().compose(&nf_to_pl(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    /// Algebra -> geometry -> algebra is the identity.
    #[test]
    fn word_map_round_trip(pa in word_pairs(5, 12)) {
        let a = nf_from_word(&word_from_pairs(&pa));
        let map = nf_to_pl(&a).unwrap();
        prop_assert_eq!(pl_to_word(&map).unwrap(), a);
    }

    /// Geometry -> trees -> geometry is the identity.
    #[test]
    fn map_tree_round_trip(f in random_map()) {
        let tp = pl_to_treepair(&f).unwrap();
        prop_assert_eq!(tp.induced_map().unwrap(), f.clone());
        prop_assert_eq!(nf_to_pl(&treepair_to_nf(&tp)).unwrap(), f);
    }

    /// Interval bijections always produce dyadic breakpoints with
    /// power-of-two slopes and hit their endpoints.
    #[test]
    fn interval_bijection_invariants(a in 0i64..14, b in 0i64..14, c in 0i64..14, d in 0i64..14) {
        let (p, q) = (dy(a.min(b), 4), dy(a.max(b) + 1, 4));
        let (p2, q2) = (dy(c.min(d), 4), dy(c.max(d) + 1, 4));
        let pts = interval_bijection(&p, &q, &p2, &q2).unwrap();
        prop_assert_eq!(pts.first().unwrap(), &(p, p2));
        prop_assert_eq!(pts.last().unwrap(), &(q, q2));
        for w in pts.windows(2) {
            slope_exponent(&w[0], &w[1]).unwrap();
        }
    }

    /// Dyadic arithmetic round-trips its text format.
    #[test]
    fn dyadic_text_round_trip(t in dyadic_in_unit()) {
        let s = t.to_string();
        prop_assert_eq!(s.parse::<Dyadic>().unwrap(), t);
    }
}

#[test]
fn special_product_matches_general_multiplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for s in 2..=6u32 {
        for _ in 0..120 {
            let a = sample_a(s, 12, &mut rng);
            let b = sample_b(s, 12, &mut rng);
            assert!(
                b.min_index().is_none_or(|i| i > s),
                "B_s sample outside index range"
            );
            let special = nf_product_special(&a, &b, s).unwrap();
            assert_eq!(special, nf_multiply(&a, &b), "s = {s}");
        }
    }
}

#[test]
fn subgroups_commute_elementwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for s in 1..=6u32 {
        for _ in 0..90 {
            let a = sample_a(s, 10, &mut rng);
            let b = sample_b(s, 10, &mut rng);
            assert_eq!(nf_multiply(&a, &b), nf_multiply(&b, &a), "s = {s}");
        }
    }
}

#[test]
fn word_and_support_criteria_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for s in 2..=5u32 {
        let p = phi(s).unwrap();
        for i in 0..40 {
            let g = if i % 2 == 0 {
                sample_a(s, 14, &mut rng)
            } else {
                sample_b(s, 14, &mut rng)
            };
            let by_word = in_a(&g, s);
            let map = nf_to_pl(&g).unwrap();
            let by_support = match map.support() {
                None => true,
                Some((_, hi)) => hi <= p,
            };
            assert_eq!(by_word, by_support, "s = {s}, g = {g}");
        }
    }
}

#[test]
fn conjugation_shifts_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x0 = NormalForm::from_parts(vec![0], vec![]).unwrap();
    for s in 2..=5u32 {
        for _ in 0..30 {
            let g = sample_a(s, 10, &mut rng);
            let conj = nf_conjugate(&nf_invert(&x0), &g);
            let map = nf_to_pl(&conj).unwrap();
            if let Some((_, hi)) = map.support() {
                assert!(hi <= phi(s + 1).unwrap(), "s = {s}");
            }
        }
    }
}

#[test]
fn x0_xk_inverse_identity_interval() {
    for k in 1..=10u32 {
        let w = format!("x0 x{k}^-1");
        let map = nf_to_pl(&w.parse().unwrap()).unwrap();
        let pk = phi(k).unwrap();
        assert!(
            map.is_identity_on(&pk, &Dyadic::one()).unwrap(),
            "x0 x{k}^-1 moves a point of [phi_{k}, 1]"
        );
    }
}

#[test]
fn generator_maps_match_their_words() {
    for k in 0..6u32 {
        let via_tree = pl_to_word(&generator_map(k).unwrap()).unwrap();
        let expected = NormalForm::from_parts(vec![k], vec![]).unwrap();
        assert_eq!(via_tree, expected);
    }
}

#[test]
fn subgroup_samples_pass_membership_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for s in 2..=6u32 {
        for &len in &[16u32, 64, 256] {
            for _ in 0..6 {
                let a = sample_a(s, len, &mut rng);
                assert!(in_a(&a, s));
                let b = sample_b(s, len, &mut rng);
                assert!(in_b(&b, s).unwrap());
                let p = phi(s).unwrap();
                assert!(nf_to_pl(&b)
                    .unwrap()
                    .is_identity_on(&Dyadic::zero(), &p)
                    .unwrap());
            }
        }
    }
}

#[test]
fn transitivity_and_extension_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for s in 2..=4u32 {
        let p = phi(s).unwrap();
        for i in 1..8i64 {
            let t1 = dy(i, 3);
            let t2 = dy(((i * 3) % 7).max(1), 3);
            if t1 >= p || t2 >= p {
                continue;
            }
            let a = transitive_element_a(s, &t1, &t2).unwrap();
            assert!(in_a(&a, s));
            assert_eq!(nf_to_pl(&a).unwrap().eval(&t1).unwrap(), t2);
        }
        // extension agrees with the partial data it was given
        for _ in 0..10 {
            let a = sample_a(s, 10, &mut rng);
            let map = nf_to_pl(&a).unwrap();
            let t0 = dy(1, 2);
            let ext = extend_partial_a(s, &map, &t0).unwrap();
            assert!(in_a(&ext, s));
            let ext_map = nf_to_pl(&ext).unwrap();
            let mut xs: Vec<Dyadic> = map
                .points()
                .iter()
                .map(|(x, _)| x.clone())
                .filter(|x| *x <= t0)
                .collect();
            xs.push(t0.clone());
            for x in xs {
                assert_eq!(ext_map.eval(&x).unwrap(), map.eval(&x).unwrap());
            }
        }
    }
}

#[test]
fn generator_membership_lists() {
    for s in 1..=6u32 {
        assert_eq!(gens_a(s).len(), s as usize);
        assert_eq!(gens_b(s).len(), s as usize);
        for g in gens_a(s) {
            assert!(in_a(&g, s));
        }
        for g in gens_b(s) {
            assert!(in_b(&g, s).unwrap());
        }
    }
}

#[test]
fn glued_pieces_validate() {
    let p = phi(2).unwrap();
    let pieces = vec![
        interval_bijection(&dy(0, 0), &dy(1, 2), &dy(0, 0), &dy(1, 1)).unwrap(),
        interval_bijection(&dy(1, 2), &p, &dy(1, 1), &p).unwrap(),
        vec![(p.clone(), p), (dy(1, 0), dy(1, 0))],
    ];
    let f = glue(pieces).unwrap();
    f.validate().unwrap();
    assert!(f.is_identity_on(&phi(2).unwrap(), &dy(1, 0)).unwrap());
}
