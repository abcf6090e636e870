//! Piecewise-linear homeomorphisms of `[0, 1]` with power-of-two slopes and
//! dyadic breakpoints.
//!
//! A `PLMap` is stored as its canonical breakpoint list: the first point is
//! `(0, 0)`, the last is `(1, 1)`, both coordinate sequences are strictly
//! increasing, every segment slope is exactly `2^e`, and no interior point is
//! collinear with its neighbours. Group elements of Thompson's group F act as
//! these maps; composition of maps realizes the group product.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::dyadic::Dyadic;

/// Which side of a fixed point to keep in [`PLMap::patch`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// An orientation-preserving PL homeomorphism of `[0,1]` in `PL_2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLMap {
    points: Vec<(Dyadic, Dyadic)>,
}

impl PLMap {
    /// The identity map, `[(0,0), (1,1)]`.
    pub fn identity() -> Self {
        PLMap {
            points: vec![
                (Dyadic::zero(), Dyadic::zero()),
                (Dyadic::one(), Dyadic::one()),
            ],
        }
    }

    /// Builds a map from breakpoints, validating every invariant and merging
    /// collinear interior points. Duplicate consecutive points are dropped.
    pub fn new(points: Vec<(Dyadic, Dyadic)>) -> Result<Self> {
        let mut pts: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(points.len());
        for p in points {
            match pts.last() {
                Some(last) if *last == p => continue,
                _ => pts.push(p),
            }
        }
        if pts.len() < 2 {
            return Err(Error::InvalidMap("fewer than two breakpoints".into()));
        }
        let zero = Dyadic::zero();
        let one = Dyadic::one();
        if pts[0] != (zero.clone(), zero) || *pts.last().unwrap() != (one.clone(), one) {
            return Err(Error::InvalidMap(
                "endpoints must be (0,0) and (1,1)".into(),
            ));
        }
        for w in pts.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 <= w[0].1 {
                return Err(Error::InvalidMap(
                    "coordinates must be strictly increasing".into(),
                ));
            }
            slope_exponent(&w[0], &w[1])?;
        }
        Ok(PLMap {
            points: merge_collinear(pts),
        })
    }

    pub fn points(&self) -> &[(Dyadic, Dyadic)] {
        &self.points
    }

    pub fn is_identity(&self) -> bool {
        self.points.len() == 2
    }

    /// Exact image of `t` under the map.
    pub fn eval(&self, t: &Dyadic) -> Result<Dyadic> {
        if !t.in_unit_interval() {
            return Err(Error::OutOfDomain(t.to_string()));
        }
        match self.points.binary_search_by(|(x, _)| x.cmp(t)) {
            Ok(i) => Ok(self.points[i].1.clone()),
            Err(i) => {
                // t lies strictly inside segment [i-1, i]
                let a = &self.points[i - 1];
                let b = &self.points[i];
                let e = slope_exponent(a, b)?;
                Ok(a.1.add(&t.sub(&a.0).mul_pow2(e)?))
            }
        }
    }

    /// Composition `self ∘ g`, i.e. `t ↦ self(g(t))`. This realizes the group
    /// product `self · g` under the fixed left-factor-applied-last convention.
    pub fn compose(&self, g: &PLMap) -> Result<PLMap> {
        let g_inv = g.invert();
        let mut xs: Vec<Dyadic> = g.points.iter().map(|(x, _)| x.clone()).collect();
        for (fx, _) in &self.points {
            xs.push(g_inv.eval(fx)?);
        }
        xs.sort();
        xs.dedup();
        let mut pts = Vec::with_capacity(xs.len());
        for x in xs {
            let y = self.eval(&g.eval(&x)?)?;
            pts.push((x, y));
        }
        PLMap::new(pts)
    }

    /// The inverse homeomorphism (coordinates swapped).
    pub fn invert(&self) -> PLMap {
        PLMap {
            points: self
                .points
                .iter()
                .map(|(x, y)| (y.clone(), x.clone()))
                .collect(),
        }
    }

    /// True iff the map fixes `[lo, hi]` pointwise.
    pub fn is_identity_on(&self, lo: &Dyadic, hi: &Dyadic) -> Result<bool> {
        if lo >= hi || !lo.in_unit_interval() || !hi.in_unit_interval() {
            return Err(Error::InvalidInterval(lo.to_string(), hi.to_string()));
        }
        if self.eval(lo)? != *lo || self.eval(hi)? != *hi {
            return Ok(false);
        }
        Ok(self
            .points
            .iter()
            .filter(|(x, _)| x > lo && x < hi)
            .all(|(x, y)| x == y))
    }

    /// Smallest closed interval outside which the map is the identity;
    /// `None` for the identity map.
    pub fn support(&self) -> Option<(Dyadic, Dyadic)> {
        let n = self.points.len();
        let mut lo = 0;
        while lo + 1 < n && self.points[lo + 1].0 == self.points[lo + 1].1 {
            lo += 1;
        }
        if lo + 1 == n {
            return None;
        }
        let mut hi = n - 1;
        while hi > 0 && self.points[hi - 1].0 == self.points[hi - 1].1 {
            hi -= 1;
        }
        Some((self.points[lo].0.clone(), self.points[hi].0.clone()))
    }

    /// Keeps the map on one side of a fixed point `d` and replaces the other
    /// side with the identity. Errors when `self(d) != d`.
    pub fn patch(&self, d: &Dyadic, keep: Side) -> Result<PLMap> {
        if self.eval(d)? != *d {
            return Err(Error::NotFixed(d.to_string()));
        }
        let mut pts = Vec::new();
        match keep {
            Side::Left => {
                pts.extend(self.points.iter().filter(|(x, _)| x < d).cloned());
                pts.push((d.clone(), d.clone()));
                pts.push((Dyadic::one(), Dyadic::one()));
            }
            Side::Right => {
                pts.push((Dyadic::zero(), Dyadic::zero()));
                pts.push((d.clone(), d.clone()));
                pts.extend(self.points.iter().filter(|(x, _)| x > d).cloned());
            }
        }
        PLMap::new(pts)
    }

    /// Breakpoints of the restriction to `[a, b]`, including both endpoint
    /// images. Used to carry partial maps into gluing constructions.
    pub fn restrict_points(&self, a: &Dyadic, b: &Dyadic) -> Result<Vec<(Dyadic, Dyadic)>> {
        if a >= b {
            return Err(Error::InvalidInterval(a.to_string(), b.to_string()));
        }
        let mut pts = vec![(a.clone(), self.eval(a)?)];
        pts.extend(self.points.iter().filter(|(x, _)| x > a && x < b).cloned());
        pts.push((b.clone(), self.eval(b)?));
        Ok(pts)
    }

    /// Full invariant check, used by tests after every operation.
    pub fn validate(&self) -> Result<()> {
        let zero = Dyadic::zero();
        let one = Dyadic::one();
        if self.points.len() < 2
            || self.points[0] != (zero.clone(), zero)
            || *self.points.last().unwrap() != (one.clone(), one)
        {
            return Err(Error::InvalidMap("bad endpoints".into()));
        }
        let mut prev_exp: Option<i64> = None;
        for w in self.points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 <= w[0].1 {
                return Err(Error::InvalidMap("not strictly increasing".into()));
            }
            let e = slope_exponent(&w[0], &w[1])?;
            if prev_exp == Some(e) {
                return Err(Error::InvalidMap(format!(
                    "collinear breakpoint at {}",
                    w[0].0
                )));
            }
            prev_exp = Some(e);
        }
        Ok(())
    }
}

/// Slope of the segment from `a` to `b` as a power-of-two exponent.
/// Errors when the slope is not an integral power of two.
pub fn slope_exponent(a: &(Dyadic, Dyadic), b: &(Dyadic, Dyadic)) -> Result<i64> {
    let dx = b.0.sub(&a.0);
    let dy = b.1.sub(&a.1);
    let (ox, ex) = dx
        .two_adic_split()
        .ok_or_else(|| Error::InvalidMap("zero-length segment".into()))?;
    let (oy, ey) = dy
        .two_adic_split()
        .ok_or_else(|| Error::InvalidMap("flat segment".into()))?;
    if ox != oy {
        return Err(Error::InvalidMap(format!(
            "slope between {} and {} is not a power of two",
            a.0, b.0
        )));
    }
    Ok(ey - ex)
}

// Drops interior breakpoints whose adjacent segments share a slope. Callers
// have already validated that every slope is a power of two, so collinearity
// reduces to equal slope exponents.
fn merge_collinear(pts: Vec<(Dyadic, Dyadic)>) -> Vec<(Dyadic, Dyadic)> {
    let mut out: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(pts.len());
    for p in pts {
        while out.len() >= 2 {
            let a = &out[out.len() - 2];
            let b = &out[out.len() - 1];
            match (slope_exponent(a, b), slope_exponent(b, &p)) {
                (Ok(e1), Ok(e2)) if e1 == e2 => {
                    out.pop();
                }
                _ => break,
            }
        }
        out.push(p);
    }
    out
}

/// A PL bijection `[p, q] -> [p2, q2]` with power-of-two slopes, returned as
/// a breakpoint list from `(p, p2)` to `(q, q2)`. Callers glue such pieces
/// into full maps with [`glue`].
///
/// Both intervals are decomposed greedily into maximal standard dyadic
/// intervals; the shorter decomposition has its largest piece (leftmost on
/// ties) split in half until the counts match, and pieces are then mapped
/// affinely in order. Every piece maps a standard dyadic interval onto a
/// standard dyadic interval, so all slopes are powers of two.
pub fn interval_bijection(
    p: &Dyadic,
    q: &Dyadic,
    p2: &Dyadic,
    q2: &Dyadic,
) -> Result<Vec<(Dyadic, Dyadic)>> {
    if p >= q || p2 >= q2 {
        return Err(Error::InvalidInterval(p.to_string(), q.to_string()));
    }
    let mut dom = standard_decomposition(p, q)?;
    let mut ran = standard_decomposition(p2, q2)?;
    while dom.len() < ran.len() {
        split_largest(&mut dom)?;
    }
    while ran.len() < dom.len() {
        split_largest(&mut ran)?;
    }
    Ok(dom.into_iter().zip(ran).collect())
}

/// Cut points `p = t_0 < t_1 < ... < t_n = q` where each `[t_i, t_{i+1}]` is
/// a maximal standard dyadic interval fitting in the remainder.
fn standard_decomposition(p: &Dyadic, q: &Dyadic) -> Result<Vec<Dyadic>> {
    let mut cuts = vec![p.clone()];
    let mut t = p.clone();
    while t < *q {
        let rest = q.sub(&t);
        // smallest m with 2^-m <= rest
        let (odd, e) = rest.two_adic_split().expect("rest > 0");
        let fit = -(e + (odd.bits() as i64 - 1));
        // alignment: t must be a multiple of 2^-m
        let align = t.scale() as i64;
        let m = fit.max(align).max(0);
        t = t.add(&Dyadic::new(1, m)?);
        cuts.push(t.clone());
    }
    Ok(cuts)
}

fn split_largest(cuts: &mut Vec<Dyadic>) -> Result<()> {
    let mut best = 0;
    let mut best_len = cuts[1].sub(&cuts[0]);
    for i in 1..cuts.len() - 1 {
        let len = cuts[i + 1].sub(&cuts[i]);
        if len > best_len {
            best = i;
            best_len = len;
        }
    }
    let mid = Dyadic::midpoint(&cuts[best], &cuts[best + 1])?;
    cuts.insert(best + 1, mid);
    Ok(())
}

/// Glues breakpoint pieces (each a contiguous list from `interval_bijection`
/// or [`PLMap::restrict_points`]) into a full map on `[0,1]`. Consecutive
/// pieces must agree at their shared endpoint; the result must start at
/// `(0,0)` and end at `(1,1)`.
pub fn glue(pieces: Vec<Vec<(Dyadic, Dyadic)>>) -> Result<PLMap> {
    let mut pts: Vec<(Dyadic, Dyadic)> = Vec::new();
    for piece in pieces {
        for pt in piece {
            match pts.last() {
                Some(last) if *last == pt => continue,
                Some(last) if pt.0 < last.0 => {
                    return Err(Error::InvalidMap("pieces overlap".into()))
                }
                _ => pts.push(pt),
            }
        }
    }
    PLMap::new(pts)
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (x, y) in &self.points {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "({},{})", x, y)?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PLMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for tok in s.split_whitespace() {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad breakpoint {tok:?}")))?;
            let (x, y) = inner
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad breakpoint {tok:?}")))?;
            pts.push((x.parse()?, y.parse()?));
        }
        PLMap::new(pts)
    }
}
