//! Exact coefficient rings: arbitrary-precision integers and rationals.

use core::fmt::{Debug, Display};
use core::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Which exact ring a scalar type models.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingTag {
    Integers,
    Rationals,
}

impl Display for RingTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RingTag::Integers => write!(f, "Z"),
            RingTag::Rationals => write!(f, "Q"),
        }
    }
}

/// Exact scalar usable as a matrix entry. No floating point model implements this.
pub trait Scalar:
    Clone + Eq + Ord + Debug + Display + Zero + One + Signed + Neg<Output = Self>
{
    const RING: RingTag;

    fn from_i64(v: i64) -> Self;

    /// `self / d` when the quotient exists in the ring, else `None`.
    /// `d` must be nonzero.
    fn div_exact(&self, d: &Self) -> Option<Self>;

    /// Truncated division `(q, r)` with `self = q*d + r` and `|r| < |d|`;
    /// over Q the remainder is always zero. `d` must be nonzero.
    fn div_rem_trunc(&self, d: &Self) -> (Self, Self);

    /// `true` for multiplicative units (±1 over Z, any nonzero rational).
    fn is_unit(&self) -> bool;

    /// Parse a decimal literal; rationals also accept `"p/q"`.
    fn parse_decimal(s: &str) -> Option<Self>;
}

impl Scalar for BigInt {
    const RING: RingTag = RingTag::Integers;

    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = num_integer::Integer::div_rem(self, d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    fn div_rem_trunc(&self, d: &Self) -> (Self, Self) {
        let q = self / d;
        let r = self - &q * d;
        (q, r)
    }

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl Scalar for BigRational {
    const RING: RingTag = RingTag::Rationals;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            None
        } else {
            Some(self / d)
        }
    }

    fn div_rem_trunc(&self, d: &Self) -> (Self, Self) {
        (self / d, Self::zero())
    }

    fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

/// `(-1)^k` in the scalar ring.
pub fn sign_pow<S: Scalar>(k: i64) -> S {
    if k.rem_euclid(2) == 0 {
        S::one()
    } else {
        -S::one()
    }
}
