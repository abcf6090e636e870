//! Exact dyadic rational numbers `p / 2^q`.
//!
//! Every coordinate in the engine is a dyadic rational. Values are kept in a
//! canonical form (scale zero, or odd numerator) so that structural equality
//! coincides with numerical equality. Addition, subtraction and comparison
//! never grow the scale; multiplication and scaling check the result against
//! a process-wide scale limit so pathological inputs fail loudly instead of
//! exhausting memory.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Default bound on the scale (the `q` in `p / 2^q`).
pub const DEFAULT_SCALE_LIMIT: u32 = 1 << 20;

static SCALE_LIMIT: AtomicU32 = AtomicU32::new(DEFAULT_SCALE_LIMIT);

/// Overrides the process-wide scale limit. Intended for CLI configuration;
/// values in flight are unaffected.
pub fn set_scale_limit(limit: u32) {
    SCALE_LIMIT.store(limit, AtomicOrdering::Relaxed);
}

pub fn scale_limit() -> u32 {
    SCALE_LIMIT.load(AtomicOrdering::Relaxed)
}

/// An exact dyadic rational `num / 2^scale` in canonical form:
/// either `scale == 0` or `num` is odd.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    scale: u32,
}

impl Dyadic {
    /// Builds `num / 2^scale`, canonicalizing the representation.
    pub fn new(num: impl Into<BigInt>, scale: i64) -> Result<Self> {
        if scale < 0 {
            return Err(Error::NegativeScale(scale));
        }
        check_scale(scale as u64)?;
        Ok(Self::canonical(num.into(), scale as u32))
    }

    fn canonical(num: BigInt, scale: u32) -> Self {
        if num.is_zero() {
            return Dyadic { num, scale: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(scale as u64) as u32;
        Dyadic {
            num: num >> tz,
            scale: scale - tz,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic {
            num: BigInt::from(n),
            scale: 0,
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// `1 / 2^k`.
    pub fn pow2_inverse(k: u32) -> Result<Self> {
        Self::new(1, k as i64)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// Exact sum. The result scale never exceeds the operand scales.
    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let s = self.scale.max(other.scale);
        let a = &self.num << (s - self.scale) as u64;
        let b = &other.num << (s - other.scale) as u64;
        Dyadic::canonical(a + b, s)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let s = self.scale.max(other.scale);
        let a = &self.num << (s - self.scale) as u64;
        let b = &other.num << (s - other.scale) as u64;
        Dyadic::canonical(a - b, s)
    }

    /// Exact product; fails if the combined scale exceeds the limit.
    pub fn mul(&self, other: &Dyadic) -> Result<Dyadic> {
        let s = self.scale as u64 + other.scale as u64;
        check_scale(s)?;
        Ok(Dyadic::canonical(&self.num * &other.num, s as u32))
    }

    /// Exact multiplication by `2^e` (shifting). Fails only when `e < 0`
    /// pushes the scale past the limit.
    pub fn mul_pow2(&self, e: i64) -> Result<Dyadic> {
        if self.num.is_zero() {
            return Ok(Dyadic::zero());
        }
        if e >= 0 {
            let e = e as u64;
            let drop = (self.scale as u64).min(e);
            Ok(Dyadic {
                num: &self.num << (e - drop),
                scale: self.scale - drop as u32,
            })
        } else {
            let s = self.scale as u64 + e.unsigned_abs();
            check_scale(s)?;
            // numerator is odd (or scale was 0), so no re-canonicalization
            Ok(Dyadic::canonical(self.num.clone(), s as u32))
        }
    }

    /// Midpoint of `a` and `b`.
    pub fn midpoint(a: &Dyadic, b: &Dyadic) -> Result<Dyadic> {
        a.add(b).mul_pow2(-1)
    }

    /// Splits a nonzero value as `odd * 2^e`, returning `(odd, e)`.
    pub fn two_adic_split(&self) -> Option<(BigInt, i64)> {
        if self.num.is_zero() {
            return None;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0);
        Some((&self.num >> tz, tz as i64 - self.scale as i64))
    }

    /// True when the value is an integer multiple of `2^e` (e <= 0 typical).
    pub fn is_multiple_of_pow2(&self, e: i64) -> bool {
        match self.two_adic_split() {
            None => true,
            Some((_, v)) => v >= e,
        }
    }

    /// True when the value lies in `[0, 1]`.
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && *self <= Dyadic::one()
    }
}

fn check_scale(s: u64) -> Result<()> {
    let limit = scale_limit();
    if s > limit as u64 {
        Err(Error::ScaleOverflow(s, limit))
    } else {
        Ok(())
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.scale.max(other.scale);
        let a = &self.num << (s - self.scale) as u64;
        let b = &other.num << (s - other.scale) as u64;
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.scale)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_int = |t: &str| {
            t.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
        };
        match s.split_once("/2^") {
            None => Ok(Dyadic::canonical(parse_int(s)?, 0)),
            Some((p, q)) => {
                let scale: i64 = q
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad scale {q:?}")))?;
                Dyadic::new(parse_int(p)?, scale)
            }
        }
    }
}
