//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its trial counts (run with `--nocapture` to see them).
//!
//! The sweeps drive honest exchanges across the full parameter grid and
//! require exact normal-form equality everywhere; a single miss fails the
//! criterion.

mod common;

use std::time::Instant;

use common::{oracle_normal_form, word_from_pairs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thompson::attack::{
    attack_kl, attack_restriction, attack_transitivity, attack_word_level, case_branch, CaseBranch,
};
use thompson::convert::{nf_conjugate, nf_to_pl, pl_to_word, word_to_pl};
use thompson::protocol::{run_exchange, Exchange, Role, Variant};
use thompson::subgroups::{in_a, phi, sample_a, sample_b};
use thompson::words::{
    nf_from_word, nf_invert, nf_multiply, nf_product_special, Letter, NormalForm, Word,
};
use thompson::Dyadic;

const LENGTHS: [u32; 3] = [16, 64, 256];

fn grid_exchanges(
    variant: Variant,
    s_range: std::ops::RangeInclusive<u32>,
    per_cell: u64,
) -> Vec<Exchange> {
    let mut out = Vec::new();
    for s in s_range {
        for &wl in &LENGTHS {
            for &kl in &LENGTHS {
                for i in 0..per_cell {
                    let seed = (s as u64) << 40 | (wl as u64) << 28 | (kl as u64) << 12 | i;
                    out.push(
                        run_exchange(variant, s, wl, kl, seed)
                            .expect("honest exchange must not fail"),
                    );
                }
            }
        }
    }
    out
}

/// Criterion 1: the restriction attack recovers the exact shared key on
/// every SU instance across the whole parameter grid, within the time
/// budget.
#[test]
fn criterion_1_restriction_attack_completeness() {
    let _shared = common::shared_machine();
    let start = Instant::now();
    let exchanges = grid_exchanges(Variant::Su, 2..=8, 16);
    assert!(exchanges.len() >= 1000, "need at least 1000 instances");
    let mut below = 0usize;
    let mut above = 0usize;
    for e in &exchanges {
        let r = attack_restriction(&e.transcript).expect("attack must run");
        assert_eq!(r.key, e.key, "key mismatch (s = {})", e.transcript.public.s);
        assert!(r.verification.all_passed());
        match r.case_branch {
            CaseBranch::AtOrBelow => below += 1,
            CaseBranch::Above => above += 1,
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 300,
        "sweep exceeded the five-minute budget: {elapsed:?}"
    );
    assert!(below >= 100 && above >= 100, "case split {below}/{above}");
    println!(
        "ACCEPTANCE 1 restriction attack: PASS ({} instances, {below}/{above} case split, {:.1}s)",
        exchanges.len(),
        elapsed.as_secs_f64()
    );
}

/// Criterion 2: transitivity attacks recover the key on both case
/// branches, at least 500 instances each.
#[test]
fn criterion_2_transitivity_attacks() {
    let _shared = common::shared_machine();
    let mut per_branch = [0usize; 2];
    let mut seed = 0u64;
    let mut s_cycle = [2u32, 3, 4, 5, 6, 7, 8].iter().cycle();
    while per_branch.iter().any(|&c| c < 500) {
        seed += 1;
        assert!(seed < 40_000, "rejection sampling failed to fill branches");
        let s = *s_cycle.next().unwrap();
        let e = run_exchange(Variant::Su, s, 48, 48, seed).unwrap();
        let branch = case_branch(&e.transcript).unwrap();
        let (idx, target) = match branch {
            CaseBranch::AtOrBelow => (0, Role::Alice),
            CaseBranch::Above => (1, Role::Bob),
        };
        if per_branch[idx] >= 500 {
            continue;
        }
        let r = attack_transitivity(&e.transcript, target).unwrap();
        assert_eq!(r.key, e.key, "seed {seed} s {s} branch {branch:?}");
        assert!(
            r.verification.all_passed(),
            "seed {seed}: {:?}",
            r.verification
        );
        per_branch[idx] += 1;
    }
    println!(
        "ACCEPTANCE 2 transitivity attacks: PASS ({} + {} instances)",
        per_branch[0], per_branch[1]
    );
}

/// Criterion 3: the KL-variant attack recovers the key on both case
/// branches with the intermediate identity check holding in every trial.
#[test]
fn criterion_3_kl_attack() {
    let _shared = common::shared_machine();
    let mut per_branch = [0usize; 2];
    let mut seed = 0u64;
    let mut s_cycle = [2u32, 3, 4, 5, 6].iter().cycle();
    while per_branch.iter().any(|&c| c < 500) {
        seed += 1;
        assert!(seed < 40_000, "rejection sampling failed to fill branches");
        let s = *s_cycle.next().unwrap();
        let e = run_exchange(Variant::Kl, s, 48, 48, seed).unwrap();
        let branch = case_branch(&e.transcript).unwrap();
        let idx = match branch {
            CaseBranch::AtOrBelow => 0,
            CaseBranch::Above => 1,
        };
        if per_branch[idx] >= 500 {
            continue;
        }
        let r = attack_kl(&e.transcript).unwrap();
        assert_eq!(r.key, e.key, "seed {seed} s {s} branch {branch:?}");
        assert_eq!(
            r.verification.aux_identity,
            Some(true),
            "derived left factor must be trivial on the fixed side (seed {seed})"
        );
        assert!(
            r.verification.all_passed(),
            "seed {seed}: {:?}",
            r.verification
        );
        per_branch[idx] += 1;
    }
    println!(
        "ACCEPTANCE 3 kl attack: PASS ({} + {} instances)",
        per_branch[0], per_branch[1]
    );
}

/// Criterion 4: the word-level attack factors at least one of the two
/// products on every SU instance, and agrees with the restriction attack.
#[test]
fn criterion_4_word_level_attack() {
    let _shared = common::shared_machine();
    let exchanges = grid_exchanges(Variant::Su, 2..=8, 16);
    assert!(exchanges.len() >= 1000);
    for e in &exchanges {
        let r = attack_word_level(&e.transcript).expect("one factorization must succeed");
        assert_eq!(r.key, e.key);
        assert!(r.verification.all_passed());
        let restriction = attack_restriction(&e.transcript).unwrap();
        assert_eq!(r.key, restriction.key, "methods disagree");
    }
    println!(
        "ACCEPTANCE 4 word-level attack: PASS ({} instances, agrees with restriction)",
        exchanges.len()
    );
}

/// Criterion 5: the direct product formula equals general multiplication on
/// admissible pairs.
#[test]
fn criterion_5_product_formula() {
    let _shared = common::shared_machine();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut count = 0usize;
    for s in 2..=6u32 {
        for _ in 0..500 {
            let a = sample_a(s, 16, &mut rng);
            let b = sample_b(s, 16, &mut rng);
            let special = nf_product_special(&a, &b, s).expect("admissible pair");
            assert_eq!(special, nf_multiply(&a, &b), "s = {s}");
            count += 1;
        }
    }
    println!("ACCEPTANCE 5 product formula: PASS ({count} pairs)");
}

/// Criterion 6: the subgroups commute elementwise.
#[test]
fn criterion_6_commutation() {
    let _shared = common::shared_machine();
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let mut count = 0usize;
    for s in 1..=6u32 {
        for _ in 0..500 {
            let a = sample_a(s, 16, &mut rng);
            let b = sample_b(s, 16, &mut rng);
            assert_eq!(nf_multiply(&a, &b), nf_multiply(&b, &a), "s = {s}");
            count += 1;
        }
    }
    println!("ACCEPTANCE 6 commutation: PASS ({count} pairs)");
}

/// Criterion 7: the subgroup characterizations - word criterion versus
/// support, support of B_s samples, identity intervals of x_0 x_k^{-1},
/// the conjugation shift, and the two explicit half-interval generators.
#[test]
fn criterion_7_subgroup_characterizations() {
    let _shared = common::shared_machine();
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let one = Dyadic::one();
    let half = Dyadic::new(1, 1).unwrap();

    // word criterion <=> support criterion for s >= 2, on A and B samples
    let mut checked = 0usize;
    for s in 2..=6u32 {
        let p = phi(s).unwrap();
        for i in 0..120 {
            let g = if i % 2 == 0 {
                sample_a(s, 20, &mut rng)
            } else {
                sample_b(s, 20, &mut rng)
            };
            let by_support = match nf_to_pl(&g).unwrap().support() {
                None => true,
                Some((_, hi)) => hi <= p,
            };
            assert_eq!(in_a(&g, s), by_support, "s = {s} g = {g}");
            checked += 1;
        }
    }

    // random B_s elements are the identity on [0, phi_s]
    for s in 1..=6u32 {
        let p = phi(s).unwrap();
        for _ in 0..40 {
            let b = sample_b(s, 24, &mut rng);
            assert!(nf_to_pl(&b)
                .unwrap()
                .is_identity_on(&Dyadic::zero(), &p)
                .unwrap());
        }
    }

    // x_0 x_k^{-1} is the identity on [phi_k, 1] for k = 1..10
    for k in 1..=10u32 {
        let g: NormalForm = format!("x0 x{k}^-1").parse().unwrap();
        let map = nf_to_pl(&g).unwrap();
        assert!(map.is_identity_on(&phi(k).unwrap(), &one).unwrap());
    }

    // conjugation by x_0^{-1} shifts supports one parameter up
    let x0 = NormalForm::from_parts(vec![0], vec![]).unwrap();
    let mut shifted = 0usize;
    for s in 2..=5u32 {
        for _ in 0..30 {
            let g = sample_a(s, 16, &mut rng);
            let conj = nf_conjugate(&nf_invert(&x0), &g);
            if let Some((_, hi)) = nf_to_pl(&conj).unwrap().support() {
                assert!(hi <= phi(s + 1).unwrap(), "s = {s}");
            }
            shifted += 1;
        }
    }
    assert!(shifted >= 100);

    // the two standard generators of the maps supported in [0, 1/2], and
    // their conjugates by x_0^2 landing in A_2
    let gen_a: NormalForm = "x0 x0 x1^-1 x0^-1".parse().unwrap();
    let gen_b: NormalForm = "x0 x1 x1 x2^-1 x1^-1 x0^-1".parse().unwrap();
    for g in [&gen_a, &gen_b] {
        let (lo, hi) = nf_to_pl(g).unwrap().support().expect("nontrivial");
        assert!(Dyadic::zero() <= lo && hi <= half);
    }
    let x0sq = nf_multiply(&x0, &x0);
    for g in [&gen_a, &gen_b] {
        let conj = nf_conjugate(&x0sq, g);
        assert!(in_a(&conj, 2), "conjugate {conj} fails the A_2 criterion");
    }
    // the conjugates written out in normal form
    assert_eq!(
        nf_conjugate(&x0sq, &gen_a),
        "x0 x0 x0 x0 x1^-1 x0^-1 x0^-1 x0^-1".parse().unwrap()
    );

    println!("ACCEPTANCE 7 subgroup characterizations: PASS ({checked} criterion checks)");
}

/// Criterion 8: representation coherence - homomorphism plus round trip on
/// 1000 random normal forms, and agreement with the rewriting oracle and
/// the PL semantics on short words.
#[test]
fn criterion_8_representation_coherence() {
    let _shared = common::shared_machine();
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mut count = 0usize;
    for _ in 0..1000 {
        let len = rng.random_range(0..24usize);
        let pairs: Vec<(u32, bool)> = (0..len)
            .map(|_| (rng.random_range(0..5u32), rng.random_bool(0.5)))
            .collect();
        let a = nf_from_word(&word_from_pairs(&pairs));
        let map = nf_to_pl(&a).unwrap();
        assert_eq!(pl_to_word(&map).unwrap(), a, "round trip");
        count += 1;
    }
    // homomorphism on random pairs
    for _ in 0..300 {
        let mk = |rng: &mut ChaCha8Rng| {
            let len = rng.random_range(0..14usize);
            let pairs: Vec<(u32, bool)> = (0..len)
                .map(|_| (rng.random_range(0..4u32), rng.random_bool(0.5)))
                .collect();
            nf_from_word(&word_from_pairs(&pairs))
        };
        let a = mk(&mut rng);
        let b = mk(&mut rng);
        let lhs = nf_to_pl(&nf_multiply(&a, &b)).unwrap();
        let rhs = nf_to_pl(&a)
            .unwrap()
            .compose(&nf_to_pl(&b).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs, "homomorphism");
    }
    // oracle and PL-semantics agreement on short words
    let mut oracle_checks = 0usize;
    for seed in 0..600u64 {
        let mut wrng = ChaCha8Rng::seed_from_u64(seed);
        let len = wrng.random_range(0..=12usize);
        let letters: Vec<Letter> = (0..len)
            .map(|_| {
                let i = wrng.random_range(0..4u32);
                if wrng.random_bool(0.5) {
                    Letter::negative(i)
                } else {
                    Letter::positive(i)
                }
            })
            .collect();
        let w = Word::new(letters);
        let fast = nf_from_word(&w);
        assert_eq!(fast, oracle_normal_form(&w), "oracle disagrees on {w}");
        assert_eq!(
            word_to_pl(&w).unwrap(),
            nf_to_pl(&fast).unwrap(),
            "PL semantics disagree on {w}"
        );
        oracle_checks += 1;
    }
    println!(
        "ACCEPTANCE 8 representation coherence: PASS ({count} round trips, {oracle_checks} oracle checks)"
    );
}

/// Criterion 9: soft complexity check - interleaved timing ratios
/// t(4n)/t(n) stay at or below 5 for n = 2^10 .. 2^18.
#[test]
fn criterion_9_normal_form_scaling() {
    let _quiet = common::quiet_machine();
    fn random_word(len: usize, rng: &mut ChaCha8Rng) -> Word {
        Word::new(
            (0..len)
                .map(|_| {
                    let i = rng.random_range(0..5u32);
                    if rng.random_bool(0.5) {
                        Letter::negative(i)
                    } else {
                        Letter::positive(i)
                    }
                })
                .collect(),
        )
    }
    fn window(words: &[Word]) -> f64 {
        let start = Instant::now();
        let mut passes = 0u32;
        loop {
            for w in words {
                std::hint::black_box(nf_from_word(std::hint::black_box(w)));
            }
            passes += 1;
            if start.elapsed().as_millis() >= 12 {
                break;
            }
        }
        start.elapsed().as_secs_f64() / passes as f64
    }

    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let pows: Vec<u32> = (10..=18).collect();
    let sets: Vec<Vec<Word>> = pows
        .iter()
        .map(|&p| (0..2).map(|_| random_word(1 << p, &mut rng)).collect())
        .collect();
    let mut ratios = Vec::new();
    for i in 0..sets.len() - 2 {
        let mut rounds: Vec<f64> = (0..5)
            .map(|_| {
                let t_small = window(&sets[i]);
                let t_large = window(&sets[i + 2]);
                t_large / t_small
            })
            .collect();
        rounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ratios.push((1usize << pows[i], rounds[rounds.len() / 2]));
    }
    for &(n, r) in &ratios {
        assert!(
            r <= 5.0,
            "t(4n)/t(n) = {r:.2} at n = {n} exceeds the soft linearithmic threshold"
        );
    }
    let summary: Vec<String> = ratios.iter().map(|(n, r)| format!("{n}:{r:.2}")).collect();
    println!(
        "ACCEPTANCE 9 normal-form scaling: PASS ({})",
        summary.join(" ")
    );
}

/// Criterion 10: both parties always agree on the key, in both variants.
#[test]
fn criterion_10_protocol_correctness() {
    let _shared = common::shared_machine();
    let mut count = 0usize;
    for &variant in &[Variant::Su, Variant::Kl] {
        for s in 1..=6u32 {
            for i in 0..40u64 {
                let e = run_exchange(variant, s, 32, 32, (s as u64) << 16 | i).unwrap();
                // run_exchange validates K_A = K_B internally; recheck from
                // the raw material here
                let (ka, kb) = match variant {
                    Variant::Su => (
                        thompson::protocol::su_key_alice(
                            &e.transcript.u2,
                            &e.alice.first,
                            &e.alice.second,
                        ),
                        thompson::protocol::su_key_bob(
                            &e.transcript.u1,
                            &e.bob.first,
                            &e.bob.second,
                        ),
                    ),
                    Variant::Kl => (
                        thompson::protocol::kl_key_alice(
                            &e.transcript.u2,
                            &e.alice.first,
                            &e.alice.second,
                        ),
                        thompson::protocol::kl_key_bob(
                            &e.transcript.u1,
                            &e.bob.first,
                            &e.bob.second,
                        ),
                    ),
                };
                assert_eq!(ka, kb);
                assert_eq!(ka, e.key);
                count += 1;
            }
        }
    }
    println!("ACCEPTANCE 10 protocol correctness: PASS ({count} honest runs)");
}
