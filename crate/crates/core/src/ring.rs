//! Element traits shared by the coefficient fields, the truncated series
//! rings and the matrix helpers.

use std::fmt;

use crate::error::Result;

pub type Rational = num_rational::Ratio<i64>;

/// Commutative ring element that knows its own ring.
///
/// The `_ref` suffix keeps these methods from colliding with `std::ops`
/// implementations on the concrete types.
pub trait RingElem: Clone + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    /// True when the element is indistinguishable from zero at its precision
    /// (and, for series, within its truncation).
    fn is_zero(&self) -> bool;
}

/// A p-adic coefficient field: `W(k)[1/p]` or a totally ramified extension.
pub trait Coeff: RingElem + Send + Sync {
    fn prime(&self) -> u64;
    /// Ramification index over `W(k)[1/p]`; valuations lie in `(1/e)Z`.
    fn ramification(&self) -> i64;
    fn from_i64_like(&self, n: i64) -> Self;
    fn inv(&self) -> Result<Self>;
    /// `val_p`, normalized by `val_p(p) = 1`; `None` for zero-to-precision.
    fn valuation(&self) -> Option<Rational>;
    /// Absolute precision in p-digits; `None` for exact values.
    fn precision(&self) -> Option<Rational>;
    /// Exact multiplication by `p^k` (for any sign of `k`).
    fn mul_p_pow(&self, k: i64) -> Self;
    /// Forget everything below `p^abs`.
    fn cap_precision(&self, abs: i64) -> Self;

    fn is_integral(&self) -> bool {
        self.valuation().map_or(true, |v| v >= Rational::from(0))
    }

    fn is_unit_integral(&self) -> bool {
        self.valuation() == Some(Rational::from(0))
    }
}

/// Minimum of two optional precisions where `None` means exact.
pub fn min_precision(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}
