//! Translation between the algebraic view (normal forms) and the geometric
//! view (PL maps), with tree pairs over standard dyadic partitions as the
//! intermediate structure.
//!
//! A finite binary tree encodes a partition of `[0,1]` into standard dyadic
//! intervals (each caret halves its interval). A pair of trees with equal
//! leaf counts encodes the element mapping the i-th domain leaf affinely
//! onto the i-th range leaf. `word_to_pl` goes the other way by composing
//! generator maps with a balanced fold.

use crate::error::{Error, Result};
use crate::numerics::dyadic::Dyadic;
use crate::numerics::plmap::PLMap;
use crate::words::{nf_from_word, nf_invert, nf_multiply, Letter, NormalForm, Word};

/// A finite binary tree; leaves read left-to-right as the intervals of a
/// standard dyadic partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinTree {
    Leaf,
    Node(Box<BinTree>, Box<BinTree>),
}

impl BinTree {
    pub fn caret(left: BinTree, right: BinTree) -> BinTree {
        BinTree::Node(Box::new(left), Box::new(right))
    }

    pub fn leaves(&self) -> usize {
        match self {
            BinTree::Leaf => 1,
            BinTree::Node(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Cut points of the encoded partition of `[lo, hi]`, excluding the
    /// interval endpoints.
    fn cuts_into(&self, lo: &Dyadic, hi: &Dyadic, out: &mut Vec<Dyadic>) -> Result<()> {
        if let BinTree::Node(l, r) = self {
            let mid = Dyadic::midpoint(lo, hi)?;
            l.cuts_into(lo, &mid, out)?;
            out.push(mid.clone());
            r.cuts_into(&mid, hi, out)?;
        }
        Ok(())
    }

    /// Partition endpoints `0 = t_0 < ... < t_n = 1`.
    pub fn partition(&self) -> Result<Vec<Dyadic>> {
        let mut cuts = vec![Dyadic::zero()];
        self.cuts_into(&Dyadic::zero(), &Dyadic::one(), &mut cuts)?;
        cuts.push(Dyadic::one());
        Ok(cuts)
    }

    /// Rebuilds the tree whose partition of `[lo, hi]` has the given
    /// interior cut points. Every standard dyadic partition with more than
    /// one piece cuts at the interval midpoint, so the shape is forced.
    fn from_cuts(cuts: &[Dyadic], lo: &Dyadic, hi: &Dyadic) -> Result<BinTree> {
        if cuts.is_empty() {
            return Ok(BinTree::Leaf);
        }
        let mid = Dyadic::midpoint(lo, hi)?;
        let at = cuts
            .binary_search(&mid)
            .map_err(|_| Error::InvalidMap(format!("partition misses midpoint {mid}")))?;
        Ok(BinTree::caret(
            BinTree::from_cuts(&cuts[..at], lo, &mid)?,
            BinTree::from_cuts(&cuts[at + 1..], &mid, hi)?,
        ))
    }

    pub fn from_partition(endpoints: &[Dyadic]) -> Result<BinTree> {
        if endpoints.len() < 2 {
            return Err(Error::InvalidMap("partition needs two endpoints".into()));
        }
        BinTree::from_cuts(
            &endpoints[1..endpoints.len() - 1],
            &endpoints[0],
            endpoints.last().unwrap(),
        )
    }
}

/// A reduced pair of trees with equal leaf counts; `domain` partitions the
/// input side, `range` the output side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePair {
    pub domain: BinTree,
    pub range: BinTree,
}

impl TreePair {
    pub fn new(domain: BinTree, range: BinTree) -> Result<TreePair> {
        if domain.leaves() != range.leaves() {
            return Err(Error::Precondition("leaf counts differ".into()));
        }
        let mut pair = TreePair { domain, range };
        pair.reduce();
        Ok(pair)
    }

    /// Removes carets exposed at the same leaf position in both trees.
    fn reduce(&mut self) {
        loop {
            let exposed_d = exposed_carets(&self.domain);
            let exposed_r = exposed_carets(&self.range);
            match exposed_d.iter().find(|p| exposed_r.contains(p)) {
                Some(&p) => {
                    collapse_at(&mut self.domain, p);
                    collapse_at(&mut self.range, p);
                }
                None => break,
            }
        }
    }

    /// The PL map sending the domain partition onto the range partition.
    pub fn induced_map(&self) -> Result<PLMap> {
        let d = self.domain.partition()?;
        let r = self.range.partition()?;
        PLMap::new(d.into_iter().zip(r).collect())
    }
}

/// Leaf positions carrying a caret with two leaf children.
fn exposed_carets(t: &BinTree) -> Vec<usize> {
    fn walk(t: &BinTree, leaf_at: usize, out: &mut Vec<usize>) -> usize {
        match t {
            BinTree::Leaf => leaf_at + 1,
            BinTree::Node(l, r) => {
                if **l == BinTree::Leaf && **r == BinTree::Leaf {
                    out.push(leaf_at);
                    leaf_at + 2
                } else {
                    let after = walk(l, leaf_at, out);
                    walk(r, after, out)
                }
            }
        }
    }
    let mut out = Vec::new();
    walk(t, 0, &mut out);
    out
}

/// Replaces the caret whose left leaf sits at position `p` by a leaf.
fn collapse_at(t: &mut BinTree, p: usize) -> bool {
    // Ok(()) = collapsed; Err(n) = subtree untouched, n leaves consumed.
    fn walk(t: &mut BinTree, leaf_at: usize, p: usize) -> std::result::Result<(), usize> {
        match t {
            BinTree::Leaf => Err(leaf_at + 1),
            BinTree::Node(l, r) => {
                if leaf_at == p && **l == BinTree::Leaf && **r == BinTree::Leaf {
                    *t = BinTree::Leaf;
                    return Ok(());
                }
                let after = match walk(l, leaf_at, p) {
                    Ok(()) => return Ok(()),
                    Err(n) => n,
                };
                walk(r, after, p)
            }
        }
    }
    walk(t, 0, p).is_ok()
}

/// The PL map of the generator `x_k`: the identity on `[0, 1 - 1/2^k]` and a
/// shrunk copy of `x_0` on `[1 - 1/2^k, 1]`.
pub fn generator_map(k: u32) -> Result<PLMap> {
    let one = Dyadic::one();
    let c = one.sub(&Dyadic::pow2_inverse(k)?);
    let at = |num: i64, scale: i64| -> Result<Dyadic> {
        Ok(c.add(&Dyadic::new(num, scale)?.mul_pow2(-(k as i64))?))
    };
    let mut pts = vec![(Dyadic::zero(), Dyadic::zero())];
    pts.push((c.clone(), c.clone()));
    pts.push((at(1, 1)?, at(1, 2)?));
    pts.push((at(3, 2)?, at(1, 1)?));
    pts.push((one.clone(), one));
    PLMap::new(pts)
}

fn letter_map(l: Letter) -> Result<PLMap> {
    let g = generator_map(l.index)?;
    Ok(match l.sign {
        crate::words::Sign::Plus => g,
        crate::words::Sign::Minus => g.invert(),
    })
}

/// The PL map of a word, composed with a balanced fold so intermediate
/// breakpoint counts stay near-linear.
pub fn word_to_pl(w: &Word) -> Result<PLMap> {
    fn rec(letters: &[Letter]) -> Result<PLMap> {
        match letters.len() {
            0 => Ok(PLMap::identity()),
            1 => letter_map(letters[0]),
            n => rec(&letters[..n / 2])?.compose(&rec(&letters[n / 2..])?),
        }
    }
    rec(&w.letters)
}

/// The PL map of a normal form.
pub fn nf_to_pl(a: &NormalForm) -> Result<PLMap> {
    word_to_pl(&a.to_word())
}

/// The reduced tree pair inducing `f`: refine the breakpoints into the
/// coarsest pair of standard dyadic partitions such that `f` is affine on
/// each domain piece and maps it onto a standard dyadic interval.
pub fn pl_to_treepair(f: &PLMap) -> Result<TreePair> {
    fn is_standard(lo: &Dyadic, hi: &Dyadic) -> bool {
        let len = hi.sub(lo);
        match len.two_adic_split() {
            Some((odd, e)) => {
                odd == num_bigint::BigInt::from(1) && e <= 0 && lo.is_multiple_of_pow2(e)
            }
            None => false,
        }
    }
    fn affine_on(f: &PLMap, lo: &Dyadic, hi: &Dyadic) -> bool {
        !f.points().iter().any(|(x, _)| x > lo && x < hi)
    }
    fn refine(f: &PLMap, lo: &Dyadic, hi: &Dyadic, cuts: &mut Vec<Dyadic>) -> Result<()> {
        let flo = f.eval(lo)?;
        let fhi = f.eval(hi)?;
        if affine_on(f, lo, hi) && is_standard(&flo, &fhi) {
            return Ok(());
        }
        let mid = Dyadic::midpoint(lo, hi)?;
        refine(f, lo, &mid, cuts)?;
        cuts.push(mid.clone());
        refine(f, &mid, hi, cuts)
    }

    let mut dom = vec![Dyadic::zero()];
    refine(f, &Dyadic::zero(), &Dyadic::one(), &mut dom)?;
    dom.push(Dyadic::one());
    let ran = dom.iter().map(|x| f.eval(x)).collect::<Result<Vec<_>>>()?;
    TreePair::new(
        BinTree::from_partition(&dom)?,
        BinTree::from_partition(&ran)?,
    )
}

/// Positive word (indices only) for the element carrying the right comb
/// onto `t`: peel exposed carets, emitting `x_p` for a caret at leaf `p`
/// unless the caret sits on the last two leaves. Letters are emitted
/// innermost-first and reversed at the end.
fn comb_word(t: &BinTree) -> Vec<u32> {
    let mut tree = t.clone();
    let mut letters = Vec::new();
    while tree.leaves() > 1 {
        let leaves = tree.leaves();
        let p = *exposed_carets(&tree).first().expect("tree has a caret");
        if p + 2 < leaves {
            letters.push(p as u32);
        }
        collapse_at(&mut tree, p);
    }
    letters.reverse();
    letters
}

/// Normal form of the element a tree pair induces: the range tree yields a
/// positive word, the domain tree the negative part, and normalization does
/// the rest.
pub fn treepair_to_nf(tp: &TreePair) -> NormalForm {
    let pos = comb_word(&tp.range);
    let neg = comb_word(&tp.domain);
    let mut letters: Vec<Letter> = pos.into_iter().map(Letter::positive).collect();
    letters.extend(neg.into_iter().rev().map(Letter::negative));
    nf_from_word(&Word::new(letters))
}

/// Normal form of a PL map, via its tree pair.
pub fn pl_to_word(f: &PLMap) -> Result<NormalForm> {
    Ok(treepair_to_nf(&pl_to_treepair(f)?))
}

/// Convenience: the PL map of the product of two normal forms, used by
/// tests to cross-check the homomorphism property.
pub fn product_map(a: &NormalForm, b: &NormalForm) -> Result<PLMap> {
    nf_to_pl(&nf_multiply(a, b))
}

/// Conjugate `g ↦ h g h^{-1}` on normal forms.
pub fn nf_conjugate(h: &NormalForm, g: &NormalForm) -> NormalForm {
    nf_multiply(&nf_multiply(h, g), &nf_invert(h))
}
