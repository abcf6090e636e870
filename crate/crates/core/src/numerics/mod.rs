//! Exact numerics: dyadic rationals and PL homeomorphisms of `[0,1]`.

pub mod dyadic;
pub mod plmap;

pub use dyadic::{scale_limit, set_scale_limit, Dyadic, DEFAULT_SCALE_LIMIT};
pub use plmap::{glue, interval_bijection, slope_exponent, PLMap, Side};
