//! Prime fields with fixed 62-bit moduli, for randomized identity checking.
//!
//! Symbolic checks are the ground truth in this crate; the prime fields exist
//! for the Schwartz–Zippel side: evaluate a polynomial identity at random
//! points over two large prime fields and two rational sample points, and
//! treat agreement as overwhelming evidence.  The moduli are compile-time
//! constants so the element type stays a bare `u64` with monomorphized
//! arithmetic; the primality of both constants is *checked* (deterministic
//! Miller–Rabin) in the test suite rather than trusted.

use crate::ring::{FromRat, Rat, Ring};
use num::bigint::BigInt;
use num::ToPrimitive;

/// First modulus: the Mersenne prime `2^61 - 1`.
pub const P1: u64 = 2_305_843_009_213_693_951;
/// Second modulus: `2^62 - 57`.
pub const P2: u64 = 4_611_686_018_427_387_847;

/// Element of the prime field `Z/P`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Fp<const P: u64>(pub u64);

impl<const P: u64> Fp<P> {
    pub fn new(x: u64) -> Self {
        Fp(x % P)
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat; panics on zero.
    pub fn inv(self) -> Self {
        assert!(self.0 != 0, "division by zero in F_{}", P);
        self.pow(P - 2)
    }

    pub fn div(self, rhs: Self) -> Self {
        self.mul(&rhs.inv())
    }
}

impl<const P: u64> FromRat for Fp<P> {
    fn from_rat(r: &Rat) -> Self {
        rat_to_fp::<P>(r)
    }
}

impl<const P: u64> Ring for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn neg(&self) -> Self {
        if self.0 == 0 {
            Fp(0)
        } else {
            Fp(P - self.0)
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        let s = self.0 + rhs.0; // < 2^63, no overflow at 62-bit moduli
        Fp(if s >= P { s - P } else { s })
    }
    fn mul(&self, rhs: &Self) -> Self {
        Fp((self.0 as u128 * rhs.0 as u128 % P as u128) as u64)
    }
    fn from_int(n: i64) -> Self {
        let m = n.rem_euclid(P as i64) as u64;
        Fp(m)
    }
}

/// Image of a rational in `F_P`.  Panics if the denominator vanishes mod `P`
/// (astronomically unlikely for our fixed formulas; a panic is a bug signal,
/// not a recoverable condition).
pub fn rat_to_fp<const P: u64>(x: &Rat) -> Fp<P> {
    let p = BigInt::from(P);
    let n = ((x.numer() % &p) + &p) % &p;
    let d = ((x.denom() % &p) + &p) % &p;
    let n = Fp::<P>(n.to_u64().unwrap());
    let d = Fp::<P>(d.to_u64().unwrap());
    assert!(d.0 != 0, "denominator vanishes mod {P}");
    n.mul(&d.inv())
}

/// Deterministic Miller–Rabin for `u64`.
///
/// The base set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to be
/// exact for all 64-bit integers, so this is a proof, not a probability.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc: u128 = 1;
        let m = n as u128;
        let mut bb = b as u128 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % m;
            }
            bb = bb * bb % m;
            e >>= 1;
        }
        b = acc as u64;
        b
    };
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn moduli_are_prime() {
        assert_eq!(P1, (1u64 << 61) - 1);
        assert_eq!(P2, (1u64 << 62) - 57);
        assert!(is_prime_u64(P1));
        assert!(is_prime_u64(P2));
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division_below_2000() {
        let trial = |n: u64| -> bool {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        };
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "disagree at {n}");
        }
    }

    #[test]
    fn field_arithmetic() {
        type F = Fp<P1>;
        let a = F::new(P1 - 3); // = -3
        assert_eq!(a.add(&F::new(5)), F::new(2));
        assert_eq!(a.neg(), F::new(3));
        let x = F::new(123_456_789);
        assert_eq!(x.mul(&x.inv()), F::new(1));
        assert_eq!(F::from_int(-3), a);
        // 2/3 as a field element times 3 gives 2
        let r = rat_to_fp::<P1>(&rat(2, 3));
        assert_eq!(r.mul(&F::new(3)), F::new(2));
    }

    #[test]
    fn fermat_pow_matches_naive() {
        type F = Fp<P2>;
        let x = F::new(987_654_321);
        let mut naive = F::new(1);
        for _ in 0..13 {
            naive = naive.mul(&x);
        }
        assert_eq!(x.pow(13), naive);
    }
}
