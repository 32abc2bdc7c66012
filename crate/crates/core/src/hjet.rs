//! First-order jets in the deformation parameter `h` (where `q = 1 + h`).
//!
//! A jet keeps a value and its first derivative at the classical point and
//! nothing else: `(a0 + a1 h)(b0 + b1 h) = a0 b0 + (a0 b1 + a1 b0) h`.  This
//! is all the semiclassical limit ever needs, and truncating in the scalar
//! type is far cheaper and less error-prone than expanding full q-expressions
//! and differentiating at the end.

use crate::ring::{FromRat, Rat, Ring};

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct HJet {
    /// value at `h = 0`
    pub c0: Rat,
    /// first derivative at `h = 0`
    pub c1: Rat,
}

impl HJet {
    pub fn new(c0: Rat, c1: Rat) -> Self {
        HJet { c0, c1 }
    }

    pub fn constant(c0: Rat) -> Self {
        HJet { c0, c1: Rat::zero() }
    }

    /// The jet of `h` itself.
    pub fn h() -> Self {
        HJet { c0: Rat::zero(), c1: Rat::one() }
    }

    /// Multiplicative inverse; requires an invertible value part.
    pub fn inv(&self) -> Option<HJet> {
        if self.c0.is_zero() {
            return None;
        }
        let i = Rat::one() / &self.c0;
        Some(HJet {
            c0: i.clone(),
            c1: -(&self.c1 * &i * &i),
        })
    }
}

impl FromRat for HJet {
    fn from_rat(r: &Rat) -> Self {
        HJet::constant(r.clone())
    }
}

impl Ring for HJet {
    fn zero() -> Self {
        HJet::constant(Rat::zero())
    }
    fn one() -> Self {
        HJet::constant(Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }
    fn neg(&self) -> Self {
        HJet { c0: -&self.c0, c1: -&self.c1 }
    }
    fn add(&self, rhs: &Self) -> Self {
        HJet { c0: &self.c0 + &rhs.c0, c1: &self.c1 + &rhs.c1 }
    }
    fn mul(&self, rhs: &Self) -> Self {
        HJet {
            c0: &self.c0 * &rhs.c0,
            c1: &self.c0 * &rhs.c1 + &self.c1 * &rhs.c0,
        }
    }
    fn from_int(n: i64) -> Self {
        HJet::constant(Rat::from_int(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, rint};

    #[test]
    fn leibniz_rule() {
        let a = HJet::new(rint(2), rat(1, 3));
        let b = HJet::new(rat(-1, 2), rint(5));
        let ab = a.mul(&b);
        assert_eq!(ab.c0, rint(-1));
        assert_eq!(ab.c1, rint(2) * rint(5) + rat(1, 3) * rat(-1, 2));
        // h^2 truncates to zero
        assert!(HJet::h().mul(&HJet::h()).is_zero());
    }

    #[test]
    fn inverse() {
        let a = HJet::new(rint(2), rint(6));
        let inv = a.inv().unwrap();
        assert_eq!(a.mul(&inv), HJet::one());
        assert_eq!(inv, HJet::new(rat(1, 2), rat(-3, 2)));
        assert!(HJet::h().inv().is_none());
    }
}
