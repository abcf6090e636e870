//! Exact-arithmetic engine for Thompson's group F.
//!
//! The crate provides two coupled views of group elements — the algebraic
//! view (words over the infinite generating set and their unique normal
//! forms) and the geometric view (piecewise-linear homeomorphisms of `[0,1]`
//! with power-of-two slopes and dyadic breakpoints) — together with the
//! commuting subgroup pairs `A_s`, `B_s`, a simulator for the
//! Shpilrain-Ushakov decomposition key exchange (and its Ko-Lee style
//! variant), and the eavesdropper procedures that recover the shared secret
//! key from a public transcript.
//!
//! All arithmetic is exact; no floating point appears anywhere.

pub mod attack;
pub mod convert;
pub mod error;
pub mod numerics;
pub mod protocol;
pub mod subgroups;
pub mod words;

pub use error::{Error, Result};
pub use numerics::{Dyadic, PLMap, Side};
pub use words::{Letter, NormalForm, Word};
