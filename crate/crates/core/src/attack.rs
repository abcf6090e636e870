//! Eve's key-recovery procedures.
//!
//! All four attacks consume only the public part of a transcript: `s`, `w`
//! and the exchanged elements `u_1`, `u_2`. The case split everywhere is
//! whether the graph of `w` passes at-or-below or above the point
//! `(phi_s, phi_s)`; ties go to the at-or-below branch.
//!
//! * `attack_restriction`: reads one party's `A_s` factor straight off the
//!   transcript by restricting `w^{-1} u` to the interval where the `B_s`
//!   factor cannot act, then solves for the other factor.
//! * `attack_transitivity`: attacks the opposite party in each case by
//!   recovering the `A_s` factor on a subinterval only, and extending it to
//!   a full subgroup element; any extension reproduces the shared key.
//! * `attack_kl`: the Ko-Lee-variant attack; first moves a point into
//!   place with a `B_s` (or `A_s`) conjugator so the restriction argument
//!   applies, then proceeds as above.
//! * `attack_word_level`: purely algebraic; factors `w u_1^{-1}` or
//!   `w^{-1} u_2` over `A_s · B_s` by scanning the normal form for the
//!   first index violating the `A_s` criterion.
//!
//! The transitivity and KL procedures lean on `A_s` and `B_s` acting
//! transitively on the dyadic points interior to their support intervals,
//! so replacing them with non-transitive commuting subgroups would block
//! those two. The restriction and word-level attacks need no transitivity:
//! any commuting pair whose supports meet in one point stays vulnerable.

use serde::{Deserialize, Serialize};

use crate::convert::{nf_to_pl, pl_to_word};
use crate::error::{Error, Result};
use crate::numerics::dyadic::Dyadic;
use crate::numerics::plmap::{PLMap, Side};
use crate::protocol::{Role, SharedKey, Transcript, Variant};
use crate::subgroups::{
    extend_partial_a, extend_partial_b, in_a, in_b, phi, transitive_element_a, transitive_element_b,
};
use crate::words::{nf_invert, nf_multiply, NormalForm};

/// Which procedure produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Restriction,
    Transitivity,
    WordLevel,
    Kl,
}

/// Side of the case split on `w(phi_s)` versus `phi_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseBranch {
    /// `w(phi_s) <= phi_s`
    AtOrBelow,
    /// `w(phi_s) > phi_s`
    Above,
}

/// Runtime checks recorded alongside a recovered pair. `key_matches_honest`
/// stays unset until a caller holding the private material fills it in.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Verification {
    pub first_membership: bool,
    pub second_membership: bool,
    pub reconstruction: bool,
    /// Extra identity check specific to the method (e.g. that the derived
    /// left factor is trivial below `phi_s` in the KL attack).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux_identity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_matches_honest: Option<bool>,
}

impl Verification {
    pub fn all_passed(&self) -> bool {
        self.first_membership
            && self.second_membership
            && self.reconstruction
            && self.aux_identity.unwrap_or(true)
            && self.key_matches_honest.unwrap_or(true)
    }
}

/// A successful recovery: a pair reproducing the observed transcript
/// element as `first · w · second`, and the shared key it yields.
#[derive(Clone, Debug)]
pub struct AttackResult {
    pub method: Method,
    pub cracked_party: Role,
    pub case_branch: CaseBranch,
    pub recovered_pair: (NormalForm, NormalForm),
    pub key: SharedKey,
    pub verification: Verification,
}

/// Evaluates the case split for a transcript.
pub fn case_branch(t: &Transcript) -> Result<CaseBranch> {
    let p = phi(t.public.s)?;
    Ok(if t.public.w_map().eval(&p)? <= p {
        CaseBranch::AtOrBelow
    } else {
        CaseBranch::Above
    })
}

fn require_su(t: &Transcript) -> Result<()> {
    if t.variant != Variant::Su {
        return Err(Error::Precondition(
            "attack applies to the SU variant only".into(),
        ));
    }
    Ok(())
}

/// The restriction attack. Cracks Bob when `w(phi_s) <= phi_s` (the `B_s`
/// factor of `u_2` is invisible on `[0, phi_s]`, so `a_2 = w^{-1} u_2`
/// there), and Alice otherwise (symmetrically, `b_1 = w^{-1} u_1` on
/// `[phi_s, 1]`). Patch preconditions failing signal a dishonest
/// transcript.
pub fn attack_restriction(t: &Transcript) -> Result<AttackResult> {
    require_su(t)?;
    let s = t.public.s;
    let p = phi(s)?;
    let w = &t.public.w;
    let w_map = t.public.w_map();
    let branch = case_branch(t)?;
    match branch {
        CaseBranch::AtOrBelow => {
            // u_2 = b_2 w a_2 and w^{-1} u_2 = a_2 on [0, phi_s]
            let u2_map = nf_to_pl(&t.u2)?;
            let g = w_map.invert().compose(&u2_map)?;
            let a2_map = g.patch(&p, Side::Left)?;
            let a2 = pl_to_word(&a2_map)?;
            let b2 = nf_multiply(&nf_multiply(&t.u2, &nf_invert(&a2)), &nf_invert(w));
            let reconstruction = nf_multiply(&nf_multiply(&b2, w), &a2) == t.u2;
            let key = SharedKey(nf_multiply(&nf_multiply(&b2, &t.u1), &a2));
            Ok(AttackResult {
                method: Method::Restriction,
                cracked_party: Role::Bob,
                case_branch: branch,
                verification: Verification {
                    first_membership: in_b(&b2, s)?,
                    second_membership: in_a(&a2, s),
                    reconstruction,
                    aux_identity: None,
                    key_matches_honest: None,
                },
                recovered_pair: (b2, a2),
                key,
            })
        }
        CaseBranch::Above => {
            // u_1 = a_1 w b_1 and w^{-1} u_1 = b_1 on [phi_s, 1]
            let u1_map = nf_to_pl(&t.u1)?;
            let g = w_map.invert().compose(&u1_map)?;
            let b1_map = g.patch(&p, Side::Right)?;
            let b1 = pl_to_word(&b1_map)?;
            let a1 = nf_multiply(&nf_multiply(&t.u1, &nf_invert(&b1)), &nf_invert(w));
            let reconstruction = nf_multiply(&nf_multiply(&a1, w), &b1) == t.u1;
            let key = SharedKey(nf_multiply(&nf_multiply(&a1, &t.u2), &b1));
            Ok(AttackResult {
                method: Method::Restriction,
                cracked_party: Role::Alice,
                case_branch: branch,
                verification: Verification {
                    first_membership: in_a(&a1, s),
                    second_membership: in_b(&b1, s)?,
                    reconstruction,
                    aux_identity: None,
                    key_matches_honest: None,
                },
                recovered_pair: (a1, b1),
                key,
            })
        }
    }
}

/// Recovers a pair `(a, b)` with `a w b = u`, `a ∈ A_s`, `b ∈ B_s`, given
/// that `w` keeps `phi_s` at or below itself. `a` is pinned only on
/// `[0, w(phi_s)]` and extended arbitrarily beyond; `b` then comes out as
/// the exact complement. Returns `(a, b, b_is_identity_below)`.
fn recover_alice_shape(
    s: u32,
    w: &NormalForm,
    w_map: &PLMap,
    u: &NormalForm,
    u_map: &PLMap,
) -> Result<(NormalForm, NormalForm, bool)> {
    let p = phi(s)?;
    // a = u w^{-1} on [0, w(phi_s)]
    let t0 = w_map.eval(&p)?;
    let partial = u_map.compose(&w_map.invert())?;
    let a = extend_partial_a(s, &partial, &t0)?;
    // b := w^{-1} a^{-1} u
    let b = nf_multiply(&nf_multiply(&nf_invert(w), &nf_invert(&a)), u);
    let b_identity_below = nf_to_pl(&b)?.is_identity_on(&Dyadic::zero(), &p)?;
    Ok((a, b, b_identity_below))
}

/// The transitivity attack on the party the restriction attack leaves
/// alone: Alice when `w(phi_s) <= phi_s`, Bob when it is above. Requires
/// `s >= 2` (it leans on `A_s` being every map supported in `[0, phi_s]`).
pub fn attack_transitivity(t: &Transcript, target: Role) -> Result<AttackResult> {
    require_su(t)?;
    let s = t.public.s;
    if s < 2 {
        return Err(Error::Precondition(
            "transitivity attack needs s >= 2".into(),
        ));
    }
    let branch = case_branch(t)?;
    match (branch, target) {
        (CaseBranch::AtOrBelow, Role::Alice) => {
            let u1_map = nf_to_pl(&t.u1)?;
            let (a, b, b_below) =
                recover_alice_shape(s, &t.public.w, t.public.w_map(), &t.u1, &u1_map)?;
            let reconstruction = nf_multiply(&nf_multiply(&a, &t.public.w), &b) == t.u1;
            let key = SharedKey(nf_multiply(&nf_multiply(&a, &t.u2), &b));
            Ok(AttackResult {
                method: Method::Transitivity,
                cracked_party: Role::Alice,
                case_branch: branch,
                verification: Verification {
                    first_membership: in_a(&a, s),
                    second_membership: in_b(&b, s)?,
                    reconstruction,
                    aux_identity: Some(b_below),
                    key_matches_honest: None,
                },
                recovered_pair: (a, b),
                key,
            })
        }
        (CaseBranch::Above, Role::Bob) => {
            // u_2^{-1} = a_2^{-1} w^{-1} b_2^{-1} has the Alice shape with
            // base word w^{-1}, which keeps phi_s below itself here.
            let w_inv = nf_invert(&t.public.w);
            let w_inv_map = t.public.w_map().invert();
            let u2_inv = nf_invert(&t.u2);
            let u2_inv_map = nf_to_pl(&u2_inv)?;
            let (a, b, b_below) = recover_alice_shape(s, &w_inv, &w_inv_map, &u2_inv, &u2_inv_map)?;
            // a w^{-1} b = u_2^{-1}, so u_2 = b^{-1} w a^{-1}
            let first = nf_invert(&b);
            let second = nf_invert(&a);
            let reconstruction = nf_multiply(&nf_multiply(&first, &t.public.w), &second) == t.u2;
            let key = SharedKey(nf_multiply(&nf_multiply(&first, &t.u1), &second));
            Ok(AttackResult {
                method: Method::Transitivity,
                cracked_party: Role::Bob,
                case_branch: branch,
                verification: Verification {
                    first_membership: in_b(&first, s)?,
                    second_membership: in_a(&second, s),
                    reconstruction,
                    aux_identity: Some(b_below),
                    key_matches_honest: None,
                },
                recovered_pair: (first, second),
                key,
            })
        }
        _ => Err(Error::Precondition(format!(
            "transitivity attack on {target:?} does not apply when the case is {branch:?}"
        ))),
    }
}

/// The Ko-Lee-variant attack. In the at-or-below case Bob's `u_2 = b_1 w
/// b_2` is decomposed: a `B_s` element `b_0` first moves `u_2^{-1}(phi_s)`
/// to `w^{-1}(phi_s)` so that `u_2' = u_2 b_0^{-1}` has a right factor
/// fixing `w^{-1}(phi_s)`; that factor is then read off `w^{-1} u_2'` below
/// the fixed point and extended over `B_s`. The above case runs the mirror
/// procedure on Alice's `u_1` over `A_s`.
pub fn attack_kl(t: &Transcript) -> Result<AttackResult> {
    if t.variant != Variant::Kl {
        return Err(Error::Precondition(
            "KL attack applies to the KL variant only".into(),
        ));
    }
    let s = t.public.s;
    if s < 2 {
        return Err(Error::Precondition("KL attack needs s >= 2".into()));
    }
    let p = phi(s)?;
    let w = &t.public.w;
    let w_map = t.public.w_map();
    let branch = case_branch(t)?;
    match branch {
        CaseBranch::AtOrBelow => {
            let u2_map = nf_to_pl(&t.u2)?;
            let from = u2_map.invert().eval(&p)?;
            let to = w_map.invert().eval(&p)?;
            let b0 = if from == to {
                NormalForm::identity()
            } else {
                transitive_element_b(s, &from, &to)?
            };
            let u2p = nf_multiply(&t.u2, &nf_invert(&b0));
            let u2p_map = nf_to_pl(&u2p)?;
            // b_2' = w^{-1} u_2' on [0, w^{-1}(phi_s)], and it fixes the endpoint
            let partial = w_map.invert().compose(&u2p_map)?;
            let b_sigma2 = extend_partial_b(s, &partial, &to)?;
            let b_sigma1 = nf_multiply(&nf_multiply(&u2p, &nf_invert(&b_sigma2)), &nf_invert(w));
            let aux = nf_to_pl(&b_sigma1)?.is_identity_on(&Dyadic::zero(), &p)?;
            let second = nf_multiply(&b_sigma2, &b0);
            let reconstruction = nf_multiply(&nf_multiply(&b_sigma1, w), &second) == t.u2;
            let key = SharedKey(nf_multiply(&nf_multiply(&b_sigma1, &t.u1), &second));
            Ok(AttackResult {
                method: Method::Kl,
                cracked_party: Role::Bob,
                case_branch: branch,
                verification: Verification {
                    first_membership: in_b(&b_sigma1, s)?,
                    second_membership: in_b(&second, s)?,
                    reconstruction,
                    aux_identity: Some(aux),
                    key_matches_honest: None,
                },
                recovered_pair: (b_sigma1, second),
                key,
            })
        }
        CaseBranch::Above => {
            // attack u_1 = a_1 w a_2; here w^{-1}(phi_s) < phi_s
            let u1_map = nf_to_pl(&t.u1)?;
            let from = u1_map.invert().eval(&p)?;
            let to = w_map.invert().eval(&p)?;
            let a0 = if from == to {
                NormalForm::identity()
            } else {
                transitive_element_a(s, &from, &to)?
            };
            let u1p = nf_multiply(&t.u1, &nf_invert(&a0));
            let u1p_map = nf_to_pl(&u1p)?;
            // a_2' = w^{-1} u_1' on [w^{-1}(phi_s), 1]; it fixes the endpoint,
            // so keeping the right side of the fixed point extends it by the
            // identity, which lies in A_s because a_2' is trivial past phi_s
            let g = w_map.invert().compose(&u1p_map)?;
            let a_sigma2_map = g.patch(&to, Side::Right)?;
            let a_sigma2 = pl_to_word(&a_sigma2_map)?;
            let a_sigma1 = nf_multiply(&nf_multiply(&u1p, &nf_invert(&a_sigma2)), &nf_invert(w));
            let aux = nf_to_pl(&a_sigma1)?.is_identity_on(&p, &Dyadic::one())?;
            let second = nf_multiply(&a_sigma2, &a0);
            let reconstruction = nf_multiply(&nf_multiply(&a_sigma1, w), &second) == t.u1;
            let key = SharedKey(nf_multiply(&nf_multiply(&a_sigma1, &t.u2), &second));
            Ok(AttackResult {
                method: Method::Kl,
                cracked_party: Role::Alice,
                case_branch: branch,
                verification: Verification {
                    first_membership: in_a(&a_sigma1, s),
                    second_membership: in_a(&second, s),
                    reconstruction,
                    aux_identity: Some(aux),
                    key_matches_honest: None,
                },
                recovered_pair: (a_sigma1, second),
                key,
            })
        }
    }
}

/// Splits `z` as `a · b` with `a ∈ A_s` balanced and `b` a shifted element
/// over indices `> s`. The `A_s` part is the longest balanced prefix whose
/// positions all satisfy the index criterion; the middle letters, shifted
/// down by its length, form `b`. Elements admitting no such factorization
/// come back as the distinguished [`Error::NotInProduct`] outcome.
pub fn extract_as_part(z: &NormalForm, s: u32) -> Result<(NormalForm, NormalForm)> {
    let pos = z.pos();
    let neg = z.neg();
    let cap = pos.len().min(neg.len());
    let mut m = cap;
    for k in 0..cap {
        let bound = s as i64 + k as i64; // i_{k+1} - (k+1) < s
        if pos[k] as i64 > bound || neg[k] as i64 > bound {
            m = k;
            break;
        }
    }
    let a = NormalForm::from_parts(pos[..m].to_vec(), neg[..m].to_vec())
        .map_err(|_| Error::NotInProduct)?;
    let shift = m as u32;
    let down = |xs: &[u32]| -> Result<Vec<u32>> {
        xs.iter()
            .map(|&x| x.checked_sub(shift).ok_or(Error::NotInProduct))
            .collect()
    };
    let b = NormalForm::from_parts(down(&pos[m..])?, down(&neg[m..])?)
        .map_err(|_| Error::NotInProduct)?;
    if b.min_index().is_some_and(|i| i < s + 1) {
        return Err(Error::NotInProduct);
    }
    if !in_a(&a, s) || nf_multiply(&a, &b) != *z {
        return Err(Error::NotInProduct);
    }
    Ok((a, b))
}

/// The word-level attack: one of `z_1 = w u_1^{-1}`, `z_2 = w^{-1} u_2`
/// factors over `A_s · B_s`; a successful `z_2` split yields Bob's pair
/// `(w b' w^{-1}, a)`, a successful `z_1` split Alice's `(a^{-1}, w^{-1}
/// b^{-1} w)`. Every validated candidate reconstructs its transcript
/// element exactly, and when both factor the two keys must agree.
pub fn attack_word_level(t: &Transcript) -> Result<AttackResult> {
    require_su(t)?;
    let s = t.public.s;
    let w = &t.public.w;
    let branch = case_branch(t)?;
    let z2 = nf_multiply(&nf_invert(w), &t.u2);
    let z1 = nf_multiply(w, &nf_invert(&t.u1));

    let bob = extract_as_part(&z2, s).ok().map(|(a, bp)| {
        // z_2 = a b' with u_2 = w z_2, so u_2 = (w b' w^{-1}) w a
        let b2 = nf_multiply(&nf_multiply(w, &bp), &nf_invert(w));
        let key = SharedKey(nf_multiply(&nf_multiply(&b2, &t.u1), &a));
        (b2, a, key)
    });
    let alice = extract_as_part(&z1, s).ok().map(|(a, bp)| {
        // z_1 = a b' with u_1 = z_1^{-1} w = a^{-1} (w^{-1} b'^{-1} w)^{... }
        // rearranged: u_1 = a^{-1} w (w^{-1} b'^{-1} w)
        let a1 = nf_invert(&a);
        let b1 = nf_multiply(&nf_multiply(&nf_invert(w), &nf_invert(&bp)), w);
        let key = SharedKey(nf_multiply(&nf_multiply(&a1, &t.u2), &b1));
        (a1, b1, key)
    });

    if let (Some((_, _, k2)), Some((_, _, k1))) = (&bob, &alice) {
        if k1 != k2 {
            return Err(Error::Attack(
                "word-level candidates disagree on the key".into(),
            ));
        }
    }

    if let Some((b2, a2, key)) = bob {
        let reconstruction = nf_multiply(&nf_multiply(&b2, w), &a2) == t.u2;
        return Ok(AttackResult {
            method: Method::WordLevel,
            cracked_party: Role::Bob,
            case_branch: branch,
            verification: Verification {
                first_membership: in_b(&b2, s)?,
                second_membership: in_a(&a2, s),
                reconstruction,
                aux_identity: None,
                key_matches_honest: None,
            },
            recovered_pair: (b2, a2),
            key,
        });
    }
    if let Some((a1, b1, key)) = alice {
        let reconstruction = nf_multiply(&nf_multiply(&a1, w), &b1) == t.u1;
        return Ok(AttackResult {
            method: Method::WordLevel,
            cracked_party: Role::Alice,
            case_branch: branch,
            verification: Verification {
                first_membership: in_a(&a1, s),
                second_membership: in_b(&b1, s)?,
                reconstruction,
                aux_identity: None,
                key_matches_honest: None,
            },
            recovered_pair: (a1, b1),
            key,
        });
    }
    Err(Error::Attack(
        "neither z_1 nor z_2 factors over A_s B_s; transcript is dishonest".into(),
    ))
}

/// Serialized attack report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttackDoc {
    pub method: Method,
    pub case_branch: CaseBranch,
    pub cracked_party: Role,
    pub recovered_pair: [String; 2],
    pub key: String,
    pub verification: Verification,
}

impl AttackResult {
    pub fn to_doc(&self) -> AttackDoc {
        AttackDoc {
            method: self.method,
            case_branch: self.case_branch,
            cracked_party: self.cracked_party,
            recovered_pair: [
                self.recovered_pair.0.to_string(),
                self.recovered_pair.1.to_string(),
            ],
            key: self.key.0.to_string(),
            verification: self.verification,
        }
    }

    /// Fills in the honest-key comparison, for callers holding the private
    /// section of a transcript.
    pub fn check_against(&mut self, honest: &SharedKey) {
        self.verification.key_matches_honest = Some(self.key == *honest);
    }
}
