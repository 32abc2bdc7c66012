//! Laurent polynomials in the deformation parameter.
//!
//! Exponents are stored in units of `q^(1/2)`: the key `k` stands for
//! `q^(k/2)`, equivalently `s^k` with `s = q^(1/2)`.  Even-key polynomials
//! are ordinary Laurent polynomials in `q`; odd keys appear only for odd
//! orthogonal groups, whose R-matrix exponents are half-integral.  Keeping a
//! single representation avoids a second scalar type and makes specialization
//! uniform: rational evaluation always receives a value for `s` (so `q = s^2`
//! stays rational), and the first-order jet around the classical point treats
//! `q = 1 + h`, under which `q^(k/2)` has jet `(1, k/2)`.
//!
//! There is deliberately no field of fractions here.  Identities that would
//! need division (projector idempotents, spectral coefficients) are stated in
//! denominator-cleared form by the callers; the only division this module
//! offers is exact division, used when a quotient is known on structural
//! grounds to be again a Laurent polynomial.

use crate::hjet::HJet;
use crate::modp::{rat_to_fp, Fp};
use crate::ring::{rat, FromRat, Rat, Ring};
use std::collections::BTreeMap;
use std::fmt;

/// Laurent polynomial in `s = q^(1/2)` with rational coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Default)]
pub struct LaurentQ {
    /// key `k` ↦ coefficient of `s^k`
    c: BTreeMap<i64, Rat>,
}

impl LaurentQ {
    /// `q^k`
    pub fn q_pow(k: i64) -> LaurentQ {
        LaurentQ::s_pow(2 * k)
    }

    /// `s^k = q^(k/2)`
    pub fn s_pow(k: i64) -> LaurentQ {
        let mut c = BTreeMap::new();
        c.insert(k, Rat::one());
        LaurentQ { c }
    }

    pub fn q() -> LaurentQ {
        LaurentQ::q_pow(1)
    }

    pub fn s() -> LaurentQ {
        LaurentQ::s_pow(1)
    }

    pub fn constant(r: Rat) -> LaurentQ {
        let mut c = BTreeMap::new();
        if !r.is_zero() {
            c.insert(0, r);
        }
        LaurentQ { c }
    }

    /// `c * s^k`
    pub fn term(r: Rat, k: i64) -> LaurentQ {
        let mut c = BTreeMap::new();
        if !r.is_zero() {
            c.insert(k, r);
        }
        LaurentQ { c }
    }

    /// The symmetric q-integer `[n] = (q^n - q^-n)/(q - q^-1)`, expanded
    /// without division as `q^(n-1) + q^(n-3) + ... + q^(1-n)`.
    pub fn q_int(n: i64) -> LaurentQ {
        if n == 0 {
            return LaurentQ::zero();
        }
        if n < 0 {
            return LaurentQ::q_int(-n).neg();
        }
        let mut out = LaurentQ::zero();
        let mut k = n - 1;
        while k >= 1 - n {
            out.add_term(2 * k, Rat::one());
            k -= 2;
        }
        out
    }

    /// `lambda = q - q^-1`
    pub fn lambda() -> LaurentQ {
        LaurentQ::q_pow(1).sub(&LaurentQ::q_pow(-1))
    }

    fn add_term(&mut self, k: i64, r: Rat) {
        if r.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.c.entry(k) {
            Entry::Vacant(e) => {
                e.insert(r);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &r;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, r: &Rat) -> LaurentQ {
        if r.is_zero() {
            return LaurentQ::zero();
        }
        LaurentQ {
            c: self.c.iter().map(|(k, v)| (*k, v * r)).collect(),
        }
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: i64) -> LaurentQ {
        LaurentQ {
            c: self.c.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// The involution `q -> q^-1` (equivalently `s -> s^-1`).
    pub fn invert_q(&self) -> LaurentQ {
        LaurentQ {
            c: self.c.iter().map(|(k, v)| (-k, v.clone())).collect(),
        }
    }

    /// True if only integral powers of `q` occur.
    pub fn integral_in_q(&self) -> bool {
        self.c.keys().all(|k| k % 2 == 0)
    }

    pub fn min_key(&self) -> Option<i64> {
        self.c.keys().next().copied()
    }

    /// Value at `s = s0` (so `q = s0^2`).
    pub fn eval_s(&self, s0: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (k, v) in &self.c {
            acc += v * &rat_pow(s0, *k);
        }
        acc
    }

    /// Value at `q = q0`.  Works directly when only integral powers of `q`
    /// occur; otherwise requires `q0` to be a perfect rational square (the
    /// caller asked for half-integral powers at a point with no rational
    /// square root — surface that instead of silently approximating).
    pub fn eval_q(&self, q0: &Rat) -> Option<Rat> {
        if self.integral_in_q() {
            let mut acc = Rat::zero();
            for (k, v) in &self.c {
                acc += v * &rat_pow(q0, k / 2);
            }
            Some(acc)
        } else {
            crate::ring::rat_sqrt(q0).map(|s0| self.eval_s(&s0))
        }
    }

    /// Value at `s = s0` in a prime field.
    pub fn eval_s_fp<const P: u64>(&self, s0: Fp<P>) -> Fp<P> {
        let mut acc = Fp::<P>::zero();
        let inv = if self.c.keys().any(|k| *k < 0) {
            s0.inv()
        } else {
            s0
        };
        for (k, v) in &self.c {
            let base = if *k >= 0 { s0 } else { inv };
            let p = base.pow(k.unsigned_abs());
            acc = acc.add(&rat_to_fp::<P>(v).mul(&p));
        }
        acc
    }

    /// First-order jet at the classical point `q = 1 + h`:
    /// `q^(k/2)` contributes `(1, k/2)`.
    pub fn jet(&self) -> HJet {
        let mut c0 = Rat::zero();
        let mut c1 = Rat::zero();
        for (k, v) in &self.c {
            c0 += v;
            c1 += v * &rat(*k, 2);
        }
        HJet { c0, c1 }
    }

    /// Exact division; `None` if the remainder is nonzero.
    pub fn div_exact(&self, d: &LaurentQ) -> Option<LaurentQ> {
        if self.is_zero() {
            return Some(LaurentQ::zero());
        }
        let d_min = d.min_key()?;
        let d_lead = d.c.get(&d_min).unwrap().clone();
        let mut rem = self.clone();
        let mut quot = LaurentQ::zero();
        // Peel off the lowest term of the remainder at each step; the
        // exponent drops strictly, and on exact division it terminates when
        // the remainder empties out.
        while let Some(r_min) = rem.min_key() {
            let r_lead = rem.c.get(&r_min).unwrap().clone();
            let k = r_min - d_min;
            let coef = &r_lead / &d_lead;
            let t = LaurentQ::term(coef, k);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(d));
            if let Some(new_min) = rem.min_key() {
                if new_min <= r_min {
                    return None; // no progress: not divisible
                }
            }
            // Guard against runaway growth when not divisible.
            if let (Some(r_hi), Some(s_hi)) = (rem.c.keys().next_back(), self.c.keys().next_back()) {
                if *r_hi > s_hi + 2 * (d.c.keys().next_back().unwrap() - d_min).abs() {
                    return None;
                }
            }
        }
        Some(quot)
    }
}

fn rat_pow(x: &Rat, k: i64) -> Rat {
    let mut acc = Rat::one();
    let inv;
    let base = if k >= 0 {
        x
    } else {
        inv = Rat::one() / x;
        &inv
    };
    for _ in 0..k.unsigned_abs() {
        acc *= base;
    }
    acc
}

impl FromRat for LaurentQ {
    fn from_rat(r: &Rat) -> Self {
        LaurentQ::constant(r.clone())
    }
}

impl Ring for LaurentQ {
    fn zero() -> Self {
        LaurentQ::default()
    }
    fn one() -> Self {
        LaurentQ::constant(Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn neg(&self) -> Self {
        LaurentQ {
            c: self.c.iter().map(|(k, v)| (*k, -v)).collect(),
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &rhs.c {
            out.add_term(*k, v.clone());
        }
        out
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = LaurentQ::zero();
        for (k1, v1) in &self.c {
            for (k2, v2) in &rhs.c {
                out.add_term(k1 + k2, v1 * v2);
            }
        }
        out
    }
    fn from_int(n: i64) -> Self {
        LaurentQ::constant(Rat::from_int(n))
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let in_q = self.integral_in_q();
        let mut first = true;
        // Highest power first, conventional for q-expansions.
        for (k, v) in self.c.iter().rev() {
            let (sign, mag) = if v < &Rat::zero() {
                ("-", -v.clone())
            } else {
                ("+", v.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let body = if *k == 0 {
                String::new()
            } else if in_q {
                let e = k / 2;
                if e == 1 {
                    "q".into()
                } else {
                    format!("q^{}", e)
                }
            } else if *k == 1 {
                "s".into()
            } else {
                format!("s^{}", k)
            };
            if body.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", body)?;
            } else {
                write!(f, "{}*{}", mag, body)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rint;

    #[test]
    fn q_integers_against_geometric_sum() {
        // Independent oracle: [n] * (q - q^-1) = q^n - q^-n.
        for n in -6..=6i64 {
            let lhs = LaurentQ::q_int(n).mul(&LaurentQ::lambda());
            let rhs = LaurentQ::q_pow(n).sub(&LaurentQ::q_pow(-n));
            assert_eq!(lhs, rhs, "failed at n = {n}");
        }
        assert!(LaurentQ::q_int(0).is_zero());
        assert_eq!(LaurentQ::q_int(1), LaurentQ::one());
    }

    #[test]
    fn q_integer_value_at_two() {
        // Oracle by hand: [4] at q = 2 is 2^3 + 2^1 + 2^-1 + 2^-3
        //                             = 8 + 2 + 1/2 + 1/8 = 85/8,
        // so 1 + [4] at q = 2 is 93/8.
        let hand = rint(8) + rint(2) + rat(1, 2) + rat(1, 8);
        assert_eq!(hand, rat(85, 8));
        let p = LaurentQ::q_int(4);
        assert!(p.integral_in_q());
        assert_eq!(p.eval_q(&rint(2)), Some(rat(85, 8)));
        assert_eq!(LaurentQ::one().add(&p).eval_q(&rint(2)), Some(rat(93, 8)));
        // eval_q and eval_s agree where both apply (q = 4, s = 2)
        assert_eq!(p.eval_q(&rint(4)).unwrap(), p.eval_s(&rint(2)));
        // half-integral powers at a non-square q are refused
        assert_eq!(LaurentQ::s().eval_q(&rint(2)), None);
        assert_eq!(LaurentQ::s().eval_q(&rint(9)), Some(rint(3)));
    }

    #[test]
    fn eval_s_consistency_rational_vs_prime_field() {
        use crate::modp::{rat_to_fp, P1};
        let p = LaurentQ::q_int(3)
            .mul(&LaurentQ::lambda())
            .add(&LaurentQ::s_pow(-5).scale(&rat(7, 3)));
        let s0 = rat(5, 7);
        let direct = rat_to_fp::<P1>(&p.eval_s(&s0));
        let field = p.eval_s_fp::<P1>(rat_to_fp::<P1>(&s0));
        assert_eq!(direct, field);
    }

    #[test]
    fn jets_at_the_classical_point() {
        // lambda = q - q^-1 has jet (0, 2); q^k has jet (1, k).
        assert_eq!(LaurentQ::lambda().jet(), HJet { c0: rint(0), c1: rint(2) });
        assert_eq!(LaurentQ::q_pow(5).jet(), HJet { c0: rint(1), c1: rint(5) });
        assert_eq!(LaurentQ::s_pow(3).jet(), HJet { c0: rint(1), c1: rat(3, 2) });
        // [n] at q = 1 is n, with zero first derivative (symmetric form).
        for n in 1..=5i64 {
            assert_eq!(LaurentQ::q_int(n).jet(), HJet { c0: rint(n), c1: rint(0) });
        }
    }

    #[test]
    fn exact_division() {
        let lam = LaurentQ::lambda();
        let prod = lam.mul(&LaurentQ::q_int(5)).mul(&LaurentQ::s_pow(-3).scale(&rat(2, 9)));
        let q = prod.div_exact(&lam).unwrap();
        assert_eq!(q, LaurentQ::q_int(5).mul(&LaurentQ::s_pow(-3).scale(&rat(2, 9))));
        // q^5 - q^-5 is divisible by lambda, quotient [5]
        let num = LaurentQ::q_pow(5).sub(&LaurentQ::q_pow(-5));
        assert_eq!(num.div_exact(&lam).unwrap(), LaurentQ::q_int(5));
        // and 1 + lambda is not divisible by lambda
        assert!(LaurentQ::one().add(&lam).div_exact(&lam).is_none());
    }

    #[test]
    fn involution_and_display() {
        let p = LaurentQ::q_pow(2).sub(&LaurentQ::q_pow(-1).scale(&rint(3)));
        assert_eq!(p.invert_q(), LaurentQ::q_pow(-2).sub(&LaurentQ::q_pow(1).scale(&rint(3))));
        assert_eq!(p.to_string(), "q^2 - 3*q^-1");
        let odd = LaurentQ::s_pow(3).add(&LaurentQ::one());
        assert_eq!(odd.to_string(), "s^3 + 1");
    }
}
