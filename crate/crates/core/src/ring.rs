//! The scalar `Ring` abstraction and exact rational scalars.
//!
//! Everything downstream (tensors, the exterior algebra, linear solving) is
//! generic over this small trait rather than over `num_traits`, for two
//! reasons: we need exact equality semantics everywhere, and one of our
//! scalar rings (the exterior algebra itself, when it plays the role of a
//! tensor entry) is noncommutative.  The trait therefore promises neither
//! commutativity nor divisibility; code that needs either says so at the use
//! site.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Exact rational scalar used as the ground field almost everywhere.
pub type Rat = BigRational;

/// An associative unital ring.  `mul` is *not* assumed commutative.
pub trait Ring: Clone + PartialEq + std::fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn neg(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Canonical image of a small integer.
    fn from_int(n: i64) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn add_assign(&mut self, rhs: &Self) {
        *self = self.add(rhs);
    }
    fn sub_assign(&mut self, rhs: &Self) {
        *self = self.sub(rhs);
    }
    /// Sum of a slice; avoids quadratic cloning in hot spots.
    fn sum<'a, I: IntoIterator<Item = &'a Self>>(items: I) -> Self
    where
        Self: 'a,
    {
        let mut acc = Self::zero();
        for x in items {
            acc.add_assign(x);
        }
        acc
    }
}

/// Conversion from the rationals; every coefficient ring we use has one
/// (for prime fields it is reduction mod `P`).
pub trait FromRat: Ring {
    fn from_rat(r: &Rat) -> Self;
}

impl FromRat for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

impl Ring for Rat {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
}

/// `n` as an exact rational.
pub fn rint(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// `n/d` as an exact rational.  Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact square root of a rational, if it is a perfect square.
///
/// Used to turn a caller-supplied evaluation point for `q` into one for
/// `s = q^(1/2)` when odd half-powers are present (odd orthogonal groups).
pub fn rat_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_ring_basics() {
        let a = rat(3, 4);
        let b = rat(-1, 6);
        assert_eq!(a.add(&b), rat(7, 12));
        assert_eq!(a.mul(&b), rat(-1, 8));
        assert_eq!(Rat::from_int(-5), rint(-5));
        assert!(Ring::is_zero(&<Rat as Ring>::zero()));
        assert!(Ring::is_one(&<Rat as Ring>::one()));
    }

    #[test]
    fn sqrt_of_perfect_squares_only() {
        assert_eq!(rat_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rat_sqrt(&rint(49)), Some(rint(7)));
        assert_eq!(rat_sqrt(&rat(2, 1)), None);
        assert_eq!(rat_sqrt(&rat(-4, 1)), None);
        assert_eq!(rat_sqrt(&rint(0)), Some(rint(0)));
    }
}
