//! The commuting subgroup pair `A_s`, `B_s` of Thompson's group F.
//!
//! `A_s` is generated by `x_0 x_1^{-1}, ..., x_0 x_s^{-1}` and, for `s >= 2`,
//! equals the full group of PL maps supported on `[0, phi_s]`; `B_s` is
//! generated by `x_{s+1}, ..., x_{2s}` and equals the maps supported on
//! `[phi_s, 1]`, where `phi_s = 1 - 1/2^{s+1}`. Elements of the two
//! subgroups commute because their supports overlap in a single point.
//!
//! Membership in `A_s` uses the word criterion on balanced normal forms
//! (valid for every `s >= 1`); membership in `B_s` uses the geometric
//! support criterion. The transitivity and extension constructions require
//! `s >= 2` (`A_1` is cyclic).

use rand::Rng;

use crate::convert::{nf_to_pl, pl_to_word};
use crate::error::{Error, Result};
use crate::numerics::dyadic::Dyadic;
use crate::numerics::plmap::{glue, interval_bijection, PLMap};
use crate::words::{index_criterion, nf_from_word, Letter, NormalForm, Word};

/// The boundary point `phi_s = 1 - 1/2^{s+1}` separating the supports.
/// Fails only when `s + 1` exceeds the configured scale limit.
pub fn phi(s: u32) -> Result<Dyadic> {
    Ok(Dyadic::one().sub(&Dyadic::pow2_inverse(s + 1)?))
}

/// Generators `x_0 x_k^{-1}` for `k = 1..=s`.
pub fn gens_a(s: u32) -> Vec<NormalForm> {
    (1..=s)
        .map(|k| NormalForm::from_parts(vec![0], vec![k]).expect("valid normal form"))
        .collect()
}

/// Generators `x_{s+1}, ..., x_{2s}`.
pub fn gens_b(s: u32) -> Vec<NormalForm> {
    (s + 1..=2 * s)
        .map(|k| NormalForm::from_parts(vec![k], vec![]).expect("valid normal form"))
        .collect()
}

/// Word criterion for membership in `A_s`: the normal form is balanced with
/// `i_k - k < s` and `j_k - k < s` throughout.
pub fn in_a(g: &NormalForm, s: u32) -> bool {
    g.pos().len() == g.neg().len() && index_criterion(g, s)
}

/// Support criterion for membership in `B_s`: the induced map is the
/// identity outside `[phi_s, 1]`.
pub fn in_b(g: &NormalForm, s: u32) -> Result<bool> {
    let map = nf_to_pl(g)?;
    Ok(match map.support() {
        None => true,
        Some((lo, _)) => lo >= phi(s)?,
    })
}

fn sample_word(gens: &[NormalForm], length: u32, rng: &mut impl Rng) -> NormalForm {
    let mut letters: Vec<Letter> = Vec::new();
    for _ in 0..length {
        let g = &gens[rng.random_range(0..gens.len())];
        let invert = rng.random_bool(0.5);
        let w = g.to_word();
        if invert {
            letters.extend(w.inverse().letters);
        } else {
            letters.extend(w.letters);
        }
    }
    nf_from_word(&Word::new(letters))
}

/// Normal form of a uniformly random `length`-letter word over the `A_s`
/// generators and their inverses. Deterministic for a fixed generator state.
pub fn sample_a(s: u32, length: u32, rng: &mut impl Rng) -> NormalForm {
    sample_word(&gens_a(s), length, rng)
}

/// Random element of `B_s`, as [`sample_a`].
pub fn sample_b(s: u32, length: u32, rng: &mut impl Rng) -> NormalForm {
    sample_word(&gens_b(s), length, rng)
}

fn require_interior(t: &Dyadic, lo: &Dyadic, hi: &Dyadic) -> Result<()> {
    if t <= lo || t >= hi {
        Err(Error::Precondition(format!(
            "point {t} outside the open interval ({lo}, {hi})"
        )))
    } else {
        Ok(())
    }
}

/// An element of `A_s` carrying `t1` to `t2`, for interior dyadic points of
/// `(0, phi_s)`. Requires `s >= 2` so that `A_s` is all of the maps
/// supported on `[0, phi_s]`.
pub fn transitive_element_a(s: u32, t1: &Dyadic, t2: &Dyadic) -> Result<NormalForm> {
    if s < 2 {
        return Err(Error::Precondition("transitivity needs s >= 2".into()));
    }
    let p = phi(s)?;
    require_interior(t1, &Dyadic::zero(), &p)?;
    require_interior(t2, &Dyadic::zero(), &p)?;
    let pieces = vec![
        interval_bijection(&Dyadic::zero(), t1, &Dyadic::zero(), t2)?,
        interval_bijection(t1, &p, t2, &p)?,
        vec![(p.clone(), p), (Dyadic::one(), Dyadic::one())],
    ];
    let map = glue(pieces)?;
    pl_to_word(&map)
}

/// An element of `B_s` carrying `t1` to `t2`, for interior points of
/// `(phi_s, 1)`.
pub fn transitive_element_b(s: u32, t1: &Dyadic, t2: &Dyadic) -> Result<NormalForm> {
    if s < 2 {
        return Err(Error::Precondition("transitivity needs s >= 2".into()));
    }
    let p = phi(s)?;
    require_interior(t1, &p, &Dyadic::one())?;
    require_interior(t2, &p, &Dyadic::one())?;
    let pieces = vec![
        vec![(Dyadic::zero(), Dyadic::zero()), (p.clone(), p.clone())],
        interval_bijection(&p, t1, &p, t2)?,
        interval_bijection(t1, &Dyadic::one(), t2, &Dyadic::one())?,
    ];
    let map = glue(pieces)?;
    pl_to_word(&map)
}

/// Extends a map known only on `[0, t0]` to a full element of `A_s` that
/// agrees with it there. `partial` carries the data as a full PL map whose
/// restriction to `[0, t0]` is read; the completion maps `[t0, phi_s]` onto
/// `[partial(t0), phi_s]` and is the identity beyond.
pub fn extend_partial_a(s: u32, partial: &PLMap, t0: &Dyadic) -> Result<NormalForm> {
    if s < 2 {
        return Err(Error::Precondition("extension needs s >= 2".into()));
    }
    let p = phi(s)?;
    if *t0 <= Dyadic::zero() || *t0 > p {
        return Err(Error::Precondition(format!(
            "extension point {t0} outside (0, {p}]"
        )));
    }
    let v = partial.eval(t0)?;
    let mut pieces = vec![partial.restrict_points(&Dyadic::zero(), t0)?];
    if *t0 == p {
        if v != p {
            return Err(Error::Precondition(format!(
                "partial map sends {t0} to {v}, not {p}"
            )));
        }
    } else {
        if v >= p {
            return Err(Error::Precondition(format!(
                "no increasing extension: partial({t0}) = {v} >= {p}"
            )));
        }
        pieces.push(interval_bijection(t0, &p, &v, &p)?);
    }
    pieces.push(vec![(p.clone(), p), (Dyadic::one(), Dyadic::one())]);
    let map = glue(pieces)?;
    let out = pl_to_word(&map)?;
    debug_assert!(in_a(&out, s));
    Ok(out)
}

/// Extends a map known on `[0, t0]` with `t0 >= phi_s` to an element of
/// `B_s`. The known part must already be the identity on `[0, phi_s]`.
pub fn extend_partial_b(s: u32, partial: &PLMap, t0: &Dyadic) -> Result<NormalForm> {
    if s < 2 {
        return Err(Error::Precondition("extension needs s >= 2".into()));
    }
    let p = phi(s)?;
    let one = Dyadic::one();
    if *t0 < p || *t0 >= one {
        return Err(Error::Precondition(format!(
            "extension point {t0} outside [{p}, 1)"
        )));
    }
    if !partial.is_identity_on(&Dyadic::zero(), &p)? {
        return Err(Error::Precondition(
            "partial map is not the identity below phi_s".into(),
        ));
    }
    let v = partial.eval(t0)?;
    if v >= one {
        return Err(Error::Precondition(format!(
            "no increasing extension: partial({t0}) = {v}"
        )));
    }
    let mut pieces = vec![vec![
        (Dyadic::zero(), Dyadic::zero()),
        (p.clone(), p.clone()),
    ]];
    if *t0 > p {
        pieces.push(partial.restrict_points(&p, t0)?);
    }
    pieces.push(interval_bijection(t0, &one, &v, &one)?);
    let map = glue(pieces)?;
    let out = pl_to_word(&map)?;
    debug_assert!(in_b(&out, s).unwrap_or(false));
    Ok(out)
}
