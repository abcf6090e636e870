//! Simulation of the Shpilrain-Ushakov decomposition key exchange over
//! Thompson's group F, and the Ko-Lee style variant.
//!
//! Public data is a parameter `s` and a word `w`; the parties draw private
//! elements of the commuting subgroups `A_s` and `B_s` and exchange the
//! products below. Both key computations agree because the subgroups
//! commute elementwise.
//!
//! In the standard variant Alice holds `a_1 ∈ A_s, b_1 ∈ B_s` and sends
//! `u_1 = a_1 w b_1`; Bob holds `b_2 ∈ B_s, a_2 ∈ A_s` and sends
//! `u_2 = b_2 w a_2`; the shared key is `K = a_1 u_2 b_1 = b_2 u_1 a_2`.
//! In the Ko-Lee variant Alice uses two `A_s` elements and Bob two `B_s`
//! elements, with keys `a_1 u_2 a_2 = b_1 u_1 b_2`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convert::nf_to_pl;
use crate::error::{Error, Result};
use crate::numerics::plmap::PLMap;
use crate::subgroups::{in_a, in_b, sample_a, sample_b};
use crate::words::{nf_from_word, nf_multiply, Letter, NormalForm, Sign, Word};

/// Which exchange is being run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Shpilrain-Ushakov: mixed-subgroup private pairs.
    Su,
    /// Ko-Lee style: same-subgroup private pairs.
    Kl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Alice,
    Bob,
}

/// The public parameters: the subgroup index and the base word.
#[derive(Clone, Debug)]
pub struct PublicData {
    pub s: u32,
    pub w: NormalForm,
    w_map: PLMap,
}

impl PublicData {
    pub fn new(s: u32, w: NormalForm) -> Result<PublicData> {
        if s < 1 {
            return Err(Error::Precondition("s must be positive".into()));
        }
        let w_map = nf_to_pl(&w)?;
        Ok(PublicData { s, w, w_map })
    }

    /// The cached PL map of `w`.
    pub fn w_map(&self) -> &PLMap {
        &self.w_map
    }
}

/// One party's private pair. The subgroup pattern depends on role and
/// variant: SU Alice holds `(A_s, B_s)`, SU Bob `(B_s, A_s)`, KL Alice
/// `(A_s, A_s)`, KL Bob `(B_s, B_s)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyMaterial {
    pub role: Role,
    pub variant: Variant,
    pub first: NormalForm,
    pub second: NormalForm,
}

impl KeyMaterial {
    pub fn validate(&self, s: u32) -> Result<()> {
        let (first_a, second_a) = match (self.variant, self.role) {
            (Variant::Su, Role::Alice) => (true, false),
            (Variant::Su, Role::Bob) => (false, true),
            (Variant::Kl, Role::Alice) => (true, true),
            (Variant::Kl, Role::Bob) => (false, false),
        };
        let check = |g: &NormalForm, want_a: bool, which: &str| -> Result<()> {
            let ok = if want_a { in_a(g, s) } else { in_b(g, s)? };
            if ok {
                Ok(())
            } else {
                Err(Error::Membership(format!(
                    "{which} key of {:?} lies outside its subgroup",
                    self.role
                )))
            }
        };
        check(&self.first, first_a, "first")?;
        check(&self.second, second_a, "second")
    }
}

/// Everything the eavesdropper sees: public data plus the two exchanged
/// elements.
#[derive(Clone, Debug)]
pub struct Transcript {
    pub public: PublicData,
    pub variant: Variant,
    pub u1: NormalForm,
    pub u2: NormalForm,
}

/// The agreed key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedKey(pub NormalForm);

fn product3(a: &NormalForm, b: &NormalForm, c: &NormalForm) -> NormalForm {
    nf_multiply(&nf_multiply(a, b), c)
}

/// Alice's SU message `u_1 = a_1 w b_1`.
pub fn su_round_alice(
    pub_data: &PublicData,
    a1: &NormalForm,
    b1: &NormalForm,
) -> Result<NormalForm> {
    if !in_a(a1, pub_data.s) {
        return Err(Error::Membership("a1 is not in A_s".into()));
    }
    if !in_b(b1, pub_data.s)? {
        return Err(Error::Membership("b1 is not in B_s".into()));
    }
    Ok(product3(a1, &pub_data.w, b1))
}

/// Bob's SU message `u_2 = b_2 w a_2`.
pub fn su_round_bob(pub_data: &PublicData, b2: &NormalForm, a2: &NormalForm) -> Result<NormalForm> {
    if !in_b(b2, pub_data.s)? {
        return Err(Error::Membership("b2 is not in B_s".into()));
    }
    if !in_a(a2, pub_data.s) {
        return Err(Error::Membership("a2 is not in A_s".into()));
    }
    Ok(product3(b2, &pub_data.w, a2))
}

/// Alice's SU key `K_A = a_1 u_2 b_1`.
pub fn su_key_alice(u2: &NormalForm, a1: &NormalForm, b1: &NormalForm) -> SharedKey {
    SharedKey(product3(a1, u2, b1))
}

/// Bob's SU key `K_B = b_2 u_1 a_2`.
pub fn su_key_bob(u1: &NormalForm, b2: &NormalForm, a2: &NormalForm) -> SharedKey {
    SharedKey(product3(b2, u1, a2))
}

/// Alice's KL message `u_1 = a_1 w a_2`.
pub fn kl_round_alice(
    pub_data: &PublicData,
    a1: &NormalForm,
    a2: &NormalForm,
) -> Result<NormalForm> {
    if !in_a(a1, pub_data.s) || !in_a(a2, pub_data.s) {
        return Err(Error::Membership("KL Alice keys must lie in A_s".into()));
    }
    Ok(product3(a1, &pub_data.w, a2))
}

/// Bob's KL message `u_2 = b_1 w b_2`.
pub fn kl_round_bob(pub_data: &PublicData, b1: &NormalForm, b2: &NormalForm) -> Result<NormalForm> {
    if !in_b(b1, pub_data.s)? || !in_b(b2, pub_data.s)? {
        return Err(Error::Membership("KL Bob keys must lie in B_s".into()));
    }
    Ok(product3(b1, &pub_data.w, b2))
}

/// Alice's KL key `K_A = a_1 u_2 a_2`; agreement with Bob's side follows
/// from elementwise commutation.
pub fn kl_key_alice(u2: &NormalForm, a1: &NormalForm, a2: &NormalForm) -> SharedKey {
    SharedKey(product3(a1, u2, a2))
}

/// Bob's KL key `K_B = b_1 u_1 b_2`.
pub fn kl_key_bob(u1: &NormalForm, b1: &NormalForm, b2: &NormalForm) -> SharedKey {
    SharedKey(product3(b1, u1, b2))
}

/// A full honest run: transcript, both private pairs, and the shared key.
#[derive(Clone, Debug)]
pub struct Exchange {
    pub transcript: Transcript,
    pub alice: KeyMaterial,
    pub bob: KeyMaterial,
    pub key: SharedKey,
}

/// Samples a random word over `x_0^{±1}, x_1^{±1}`.
pub fn random_base_word(length: u32, rng: &mut impl Rng) -> NormalForm {
    let letters: Vec<Letter> = (0..length)
        .map(|_| Letter {
            index: rng.random_range(0..2u32),
            sign: if rng.random_bool(0.5) {
                Sign::Plus
            } else {
                Sign::Minus
            },
        })
        .collect();
    nf_from_word(&Word::new(letters))
}

/// Deterministic simulation of one exchange. The draw order is fixed
/// (w, then Alice's pair, then Bob's pair), so a seed pins the whole run.
pub fn run_exchange(
    variant: Variant,
    s: u32,
    w_length: u32,
    key_length: u32,
    seed: u64,
) -> Result<Exchange> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run_exchange_with_rng(variant, s, w_length, key_length, &mut rng)
}

/// As [`run_exchange`] but drawing from a caller-provided generator.
pub fn run_exchange_with_rng(
    variant: Variant,
    s: u32,
    w_length: u32,
    key_length: u32,
    rng: &mut impl Rng,
) -> Result<Exchange> {
    if s < 1 {
        return Err(Error::Precondition("s must be positive".into()));
    }
    let w = random_base_word(w_length, rng);
    let public = PublicData::new(s, w)?;
    let (alice, bob, u1, u2, key) = match variant {
        Variant::Su => {
            let a1 = sample_a(s, key_length, rng);
            let b1 = sample_b(s, key_length, rng);
            let b2 = sample_b(s, key_length, rng);
            let a2 = sample_a(s, key_length, rng);
            let u1 = su_round_alice(&public, &a1, &b1)?;
            let u2 = su_round_bob(&public, &b2, &a2)?;
            let ka = su_key_alice(&u2, &a1, &b1);
            let kb = su_key_bob(&u1, &b2, &a2);
            if ka != kb {
                return Err(Error::Precondition("key agreement failed".into()));
            }
            (
                KeyMaterial {
                    role: Role::Alice,
                    variant,
                    first: a1,
                    second: b1,
                },
                KeyMaterial {
                    role: Role::Bob,
                    variant,
                    first: b2,
                    second: a2,
                },
                u1,
                u2,
                ka,
            )
        }
        Variant::Kl => {
            let a1 = sample_a(s, key_length, rng);
            let a2 = sample_a(s, key_length, rng);
            let b1 = sample_b(s, key_length, rng);
            let b2 = sample_b(s, key_length, rng);
            let u1 = kl_round_alice(&public, &a1, &a2)?;
            let u2 = kl_round_bob(&public, &b1, &b2)?;
            let ka = kl_key_alice(&u2, &a1, &a2);
            let kb = kl_key_bob(&u1, &b1, &b2);
            if ka != kb {
                return Err(Error::Precondition("key agreement failed".into()));
            }
            (
                KeyMaterial {
                    role: Role::Alice,
                    variant,
                    first: a1,
                    second: a2,
                },
                KeyMaterial {
                    role: Role::Bob,
                    variant,
                    first: b1,
                    second: b2,
                },
                u1,
                u2,
                ka,
            )
        }
    };
    Ok(Exchange {
        transcript: Transcript {
            public,
            variant,
            u1,
            u2,
        },
        alice,
        bob,
        key,
    })
}

/// Serialized transcript document. The `private` section is optional and
/// excluded by default: attacks must run from the public part alone.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranscriptDoc {
    pub variant: Variant,
    pub s: u32,
    pub w: String,
    pub u1: String,
    pub u2: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub private: Option<PrivateDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrivateDoc {
    pub alice: PartyDoc,
    pub bob: PartyDoc,
    pub shared_key: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartyDoc {
    pub first: String,
    pub second: String,
}

impl Transcript {
    pub fn to_doc(
        &self,
        private: Option<(&KeyMaterial, &KeyMaterial, &SharedKey)>,
    ) -> TranscriptDoc {
        TranscriptDoc {
            variant: self.variant,
            s: self.public.s,
            w: self.public.w.to_string(),
            u1: self.u1.to_string(),
            u2: self.u2.to_string(),
            private: private.map(|(alice, bob, key)| PrivateDoc {
                alice: PartyDoc {
                    first: alice.first.to_string(),
                    second: alice.second.to_string(),
                },
                bob: PartyDoc {
                    first: bob.first.to_string(),
                    second: bob.second.to_string(),
                },
                shared_key: key.0.to_string(),
            }),
        }
    }

    pub fn from_doc(doc: &TranscriptDoc) -> Result<Transcript> {
        Ok(Transcript {
            public: PublicData::new(doc.s, doc.w.parse()?)?,
            variant: doc.variant,
            u1: doc.u1.parse()?,
            u2: doc.u2.parse()?,
        })
    }
}
