//! Words over the infinite generating set `{x_0, x_1, ...}` of Thompson's
//! group F and their unique normal forms.
//!
//! The group is presented by `x_n x_k = x_k x_{n+1}` for all `k < n`, with
//! the product convention fixed crate-wide: `fg` means `f` applied last.
//! Every element has a unique normal form
//! `x_{i_1} ... x_{i_u} x_{j_v}^{-1} ... x_{j_1}^{-1}` with nondecreasing
//! index sequences, subject to the reducedness condition: whenever some
//! index `i` occurs among both the positive and the negative letters, index
//! `i + 1` occurs somewhere too.
//!
//! `nf_from_word` normalizes by divide and conquer: split the word, recurse,
//! and merge the two normal forms. The merge walks sorted index sequences
//! with lazily applied offsets, so it runs in time linear in the operand
//! lengths and the whole normalization in `O(n log n)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sign of a generator occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A single letter `x_k` or `x_k^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub index: u32,
    pub sign: Sign,
}

impl Letter {
    pub fn positive(index: u32) -> Letter {
        Letter {
            index,
            sign: Sign::Plus,
        }
    }

    pub fn negative(index: u32) -> Letter {
        Letter {
            index,
            sign: Sign::Minus,
        }
    }

    pub fn inverse(self) -> Letter {
        Letter {
            index: self.index,
            sign: self.sign.flip(),
        }
    }
}

/// An arbitrary, possibly unreduced word. Letters act left-to-right with the
/// leftmost applied last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word { letters }
    }

    pub fn empty() -> Word {
        Word {
            letters: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }
}

/// The unique normal form of a group element, stored as the two sorted index
/// sequences: `pos` for `x_{i_1} ... x_{i_u}` and `neg` for
/// `x_{j_v}^{-1} ... x_{j_1}^{-1}` (so `neg` ascending reads the negative
/// letters from the outside in).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pos: Vec<u32>,
    neg: Vec<u32>,
}

impl NormalForm {
    pub fn identity() -> NormalForm {
        NormalForm::default()
    }

    pub fn is_identity(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn from_letter(l: Letter) -> NormalForm {
        match l.sign {
            Sign::Plus => NormalForm {
                pos: vec![l.index],
                neg: vec![],
            },
            Sign::Minus => NormalForm {
                pos: vec![],
                neg: vec![l.index],
            },
        }
    }

    /// Rebuilds a normal form from raw sequences, rejecting anything that is
    /// not sorted and reduced.
    pub fn from_parts(pos: Vec<u32>, neg: Vec<u32>) -> Result<NormalForm> {
        if !is_reduced_shape(&pos, &neg) {
            return Err(Error::Precondition(
                "sequences do not form a normal form".into(),
            ));
        }
        Ok(NormalForm { pos, neg })
    }

    pub fn pos(&self) -> &[u32] {
        &self.pos
    }

    pub fn neg(&self) -> &[u32] {
        &self.neg
    }

    /// Total letter count `u + v`.
    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// The normal form as a linear word.
    pub fn to_word(&self) -> Word {
        let mut letters = Vec::with_capacity(self.len());
        letters.extend(self.pos.iter().map(|&i| Letter::positive(i)));
        letters.extend(self.neg.iter().rev().map(|&j| Letter::negative(j)));
        Word { letters }
    }

    /// Swapping the two sequences inverts the element.
    pub fn inverse(&self) -> NormalForm {
        NormalForm {
            pos: self.neg.clone(),
            neg: self.pos.clone(),
        }
    }

    pub fn max_index(&self) -> Option<u32> {
        self.pos.last().max(self.neg.last()).copied()
    }

    pub fn min_index(&self) -> Option<u32> {
        match (self.pos.first(), self.neg.first()) {
            (Some(a), Some(b)) => Some(*a.min(b)),
            (a, b) => a.or(b).copied(),
        }
    }
}

/// Normal form of the product `a · b`.
///
/// Works in three sweeps over sorted sequences: transport `b`'s positive
/// letters left through `a`'s negative letters (cancelling, or incrementing
/// whichever letter the relation says), merge the surviving blocks, then
/// run the junction reduction that deletes `x_i ... x_i^{-1}` pairs whose
/// in-between letters can absorb the conjugation shift.
pub fn nf_multiply(a: &NormalForm, b: &NormalForm) -> NormalForm {
    let j = &a.neg;
    let mut kept: Vec<u32> = Vec::with_capacity(j.len());
    let mut exits: Vec<u32> = Vec::with_capacity(b.pos.len());
    let mut frontier = 0usize;
    let mut prefix = 0u32; // negatives every later positive passes over
    let mut exit_shift = 0u32; // +1 per positive that passed under the tail
    for &c in &b.pos {
        let mut cur = c + prefix;
        loop {
            if frontier == j.len() {
                exits.push(cur);
                exit_shift += 1;
                break;
            }
            let jv = j[frontier] + exit_shift;
            if jv < cur {
                kept.push(jv);
                frontier += 1;
                prefix += 1;
                cur += 1;
            } else if jv == cur {
                frontier += 1; // free cancellation
                break;
            } else {
                exits.push(cur);
                exit_shift += 1;
                break;
            }
        }
    }
    while frontier < j.len() {
        kept.push(j[frontier] + exit_shift);
        frontier += 1;
    }
    let pos = shift_merge(&a.pos, &exits);
    let neg = shift_merge(&b.neg, &kept);
    junction_reduce(pos, neg)
}

/// Merges a sorted block with a sorted block of letters entering from its
/// right; each entering letter that lands left of a remaining block letter
/// bumps that letter's index by one (applied lazily via `s`).
fn shift_merge(block: &[u32], entering: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(block.len() + entering.len());
    let (mut i, mut k, mut s) = (0usize, 0usize, 0u32);
    while i < block.len() && k < entering.len() {
        if block[i] + s <= entering[k] {
            out.push(block[i] + s);
            i += 1;
        } else {
            out.push(entering[k]);
            k += 1;
            s += 1;
        }
    }
    while i < block.len() {
        out.push(block[i] + s);
        i += 1;
    }
    out.extend_from_slice(&entering[k..]);
    out
}

/// Deletes `x_i ... x_i^{-1}` pairs at the junction of sorted positive and
/// negative sequences whenever index `i+1` is absent, decrementing every
/// letter between the deleted pair. Scans values downward; emitted letters
/// carry their pending shifts lazily.
fn junction_reduce(pos: Vec<u32>, neg: Vec<u32>) -> NormalForm {
    let mut ip = pos.len();
    let mut in_ = neg.len();
    let mut shift = 0u32; // total deletions so far
    let mut min_key = u32::MAX; // min over emitted of value-at-emit + shift-at-emit
    let mut pos_rev: Vec<u32> = Vec::with_capacity(ip);
    let mut neg_rev: Vec<u32> = Vec::with_capacity(in_);
    while ip > 0 || in_ > 0 {
        let vp = if ip > 0 { Some(pos[ip - 1]) } else { None };
        let vn = if in_ > 0 { Some(neg[in_ - 1]) } else { None };
        let v = vp.max(vn).unwrap();
        if vp == Some(v) && vn == Some(v) {
            while ip > 0
                && in_ > 0
                && pos[ip - 1] == v
                && neg[in_ - 1] == v
                && (min_key == u32::MAX || min_key - shift != v + 1)
            {
                ip -= 1;
                in_ -= 1;
                shift += 1;
            }
        }
        while ip > 0 && pos[ip - 1] == v {
            pos_rev.push(v + shift);
            min_key = min_key.min(v + shift);
            ip -= 1;
        }
        while in_ > 0 && neg[in_ - 1] == v {
            neg_rev.push(v + shift);
            min_key = min_key.min(v + shift);
            in_ -= 1;
        }
    }
    pos_rev.reverse();
    neg_rev.reverse();
    for x in &mut pos_rev {
        *x -= shift;
    }
    for x in &mut neg_rev {
        *x -= shift;
    }
    debug_assert!(is_reduced_shape(&pos_rev, &neg_rev));
    NormalForm {
        pos: pos_rev,
        neg: neg_rev,
    }
}

/// Swapping sequences; see [`NormalForm::inverse`].
pub fn nf_invert(a: &NormalForm) -> NormalForm {
    a.inverse()
}

/// Normal form of a two-letter word, written down directly from the
/// defining relation.
fn nf_from_pair(l: Letter, r: Letter) -> NormalForm {
    use Sign::{Minus, Plus};
    let (a, b) = (l.index, r.index);
    match (l.sign, r.sign) {
        (Plus, Plus) if a <= b => NormalForm {
            pos: vec![a, b],
            neg: vec![],
        },
        (Plus, Plus) => NormalForm {
            pos: vec![b, a + 1],
            neg: vec![],
        },
        (Minus, Minus) if b <= a => NormalForm {
            pos: vec![],
            neg: vec![b, a],
        },
        (Minus, Minus) => NormalForm {
            pos: vec![],
            neg: vec![a, b + 1],
        },
        (Plus, Minus) if a == b => NormalForm::identity(),
        (Plus, Minus) => NormalForm {
            pos: vec![a],
            neg: vec![b],
        },
        (Minus, Plus) if a == b => NormalForm::identity(),
        // x_a^-1 x_b = x_{b+1} x_a^-1 (a < b) or x_b x_{a+1}^-1 (a > b)
        (Minus, Plus) if a < b => NormalForm {
            pos: vec![b + 1],
            neg: vec![a],
        },
        (Minus, Plus) => NormalForm {
            pos: vec![b],
            neg: vec![a + 1],
        },
    }
}

/// Normal form of a word, by divide and conquer over [`nf_multiply`].
pub fn nf_from_word(w: &Word) -> NormalForm {
    fn rec(letters: &[Letter]) -> NormalForm {
        match letters.len() {
            0 => NormalForm::identity(),
            1 => NormalForm::from_letter(letters[0]),
            2 => nf_from_pair(letters[0], letters[1]),
            n => nf_multiply(&rec(&letters[..n / 2]), &rec(&letters[n / 2..])),
        }
    }
    rec(&w.letters)
}

/// Quadratic reference implementation: folds the word one letter at a time.
/// Kept as a scaling contrast for the benchmark harness.
pub fn nf_from_word_letterwise(w: &Word) -> NormalForm {
    let mut acc = NormalForm::identity();
    for &l in &w.letters {
        acc = nf_multiply(&acc, &NormalForm::from_letter(l));
    }
    acc
}

/// Product of `a` in `A_s` (balanced normal form meeting the index
/// criterion) with `b` whose indices all exceed `s`: the result is written
/// down directly by splicing `b`'s letters, shifted by `m = |a.pos|`,
/// between `a`'s positive and negative parts.
pub fn nf_product_special(a: &NormalForm, b: &NormalForm, s: u32) -> Result<NormalForm> {
    let m = a.pos.len();
    if a.neg.len() != m {
        return Err(Error::Precondition("left factor is not balanced".into()));
    }
    if !index_criterion(a, s) {
        return Err(Error::Precondition(
            "left factor fails the A_s index criterion".into(),
        ));
    }
    if b.min_index().is_some_and(|i| i < s + 1) {
        return Err(Error::Precondition(format!(
            "right factor has an index below {}",
            s + 1
        )));
    }
    let m = m as u32;
    let mut pos = a.pos.clone();
    pos.extend(b.pos.iter().map(|&c| c + m));
    let mut neg = a.neg.clone();
    neg.extend(b.neg.iter().map(|&d| d + m));
    Ok(NormalForm { pos, neg })
}

/// The balanced-index criterion shared with the subgroup membership test:
/// `i_k - k < s` and `j_k - k < s` for all `k` (1-based).
pub(crate) fn index_criterion(a: &NormalForm, s: u32) -> bool {
    let check = |seq: &[u32]| {
        seq.iter()
            .enumerate()
            .all(|(k0, &i)| (i as i64) - (k0 as i64 + 1) < s as i64)
    };
    check(&a.pos) && check(&a.neg)
}

/// True iff the sequences are nondecreasing and satisfy the reducedness
/// condition of the normal form.
pub fn is_reduced_shape(pos: &[u32], neg: &[u32]) -> bool {
    if !pos.windows(2).all(|w| w[0] <= w[1]) || !neg.windows(2).all(|w| w[0] <= w[1]) {
        return false;
    }
    let occurs = |seq: &[u32], i: u32| seq.binary_search(&i).is_ok();
    for &i in pos {
        if occurs(neg, i) && !occurs(pos, i + 1) && !occurs(neg, i + 1) {
            return false;
        }
    }
    true
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Plus => write!(f, "x{}", self.index),
            Sign::Minus => write!(f, "x{}^-1", self.index),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let mut first = true;
        for l in &self.letters {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", l)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_word().fmt(f)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks == ["e"] || toks.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::with_capacity(toks.len());
        for tok in toks {
            let (body, sign) = match tok.strip_suffix("^-1") {
                Some(b) => (b, Sign::Minus),
                None => (tok, Sign::Plus),
            };
            let index = body
                .strip_prefix('x')
                .and_then(|d| d.parse::<u32>().ok())
                .ok_or_else(|| Error::Parse(format!("bad letter {tok:?}")))?;
            letters.push(Letter { index, sign });
        }
        Ok(Word { letters })
    }
}

impl FromStr for NormalForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<NormalForm> {
        Ok(nf_from_word(&s.parse::<Word>()?))
    }
}
