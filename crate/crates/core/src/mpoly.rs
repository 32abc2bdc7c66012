//! Sparse multivariate polynomials over the rationals in the fixed bracket
//! parameter universe.
//!
//! The bracket ansatz carries 21 structure constants `a1..a7`, `b1..b7`,
//! `c1..c7`, plus the derived trace-coupling symbols `mu`, `nu` and the
//! normalization `kappa` of the exterior differential.  That universe never
//! changes, so rather than a general CAS polynomial we fix the 24 names once
//! and store exponent vectors inline.  Degrees stay tiny (quadratic in
//! practice — parameter times parameter from nested brackets), so a
//! `BTreeMap` keyed by exponent vector is plenty and keeps iteration order
//! canonical for display and hashing.

use crate::modp::{rat_to_fp, Fp};
use crate::ring::{FromRat, Rat, Ring};
use std::collections::BTreeMap;
use std::fmt;

/// Number of symbols in the fixed universe.
pub const NVARS: usize = 24;

/// One of the 24 fixed parameter symbols.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Var(pub u8);

impl Var {
    /// `a1..a7`
    pub fn a(i: usize) -> Var {
        assert!((1..=7).contains(&i));
        Var((i - 1) as u8)
    }
    /// `b1..b7`
    pub fn b(i: usize) -> Var {
        assert!((1..=7).contains(&i));
        Var((7 + i - 1) as u8)
    }
    /// `c1..c7`
    pub fn c(i: usize) -> Var {
        assert!((1..=7).contains(&i));
        Var((14 + i - 1) as u8)
    }
    pub const MU: Var = Var(21);
    pub const NU: Var = Var(22);
    pub const KAPPA: Var = Var(23);

    pub fn all() -> impl Iterator<Item = Var> {
        (0..NVARS as u8).map(Var)
    }

    pub fn name(self) -> String {
        let i = self.0 as usize;
        match i {
            0..=6 => format!("a{}", i + 1),
            7..=13 => format!("b{}", i - 7 + 1),
            14..=20 => format!("c{}", i - 14 + 1),
            21 => "mu".into(),
            22 => "nu".into(),
            23 => "kappa".into(),
            _ => unreachable!(),
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        match s {
            "mu" => return Some(Var::MU),
            "nu" => return Some(Var::NU),
            "kappa" => return Some(Var::KAPPA),
            _ => {}
        }
        let (head, idx) = s.split_at(1);
        let i: usize = idx.parse().ok()?;
        if !(1..=7).contains(&i) {
            return None;
        }
        match head {
            "a" => Some(Var::a(i)),
            "b" => Some(Var::b(i)),
            "c" => Some(Var::c(i)),
            _ => None,
        }
    }
}

/// Exponent vector over the fixed universe.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Mono([u8; NVARS]);

impl Mono {
    pub const ONE: Mono = Mono([0; NVARS]);

    pub fn var(v: Var) -> Mono {
        let mut e = [0u8; NVARS];
        e[v.0 as usize] = 1;
        Mono(e)
    }

    pub fn mul(&self, rhs: &Mono) -> Mono {
        let mut e = [0u8; NVARS];
        for i in 0..NVARS {
            e[i] = self.0[i]
                .checked_add(rhs.0[i])
                .expect("exponent overflow: degree past 255 is certainly a bug");
        }
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn exp(&self, v: Var) -> u8 {
        self.0[v.0 as usize]
    }

    fn without(&self, v: Var) -> Mono {
        let mut e = self.0;
        e[v.0 as usize] = 0;
        Mono(e)
    }
}

/// Sparse polynomial with rational coefficients in the fixed universe.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct MPoly {
    terms: BTreeMap<Mono, Rat>,
}

impl MPoly {
    pub fn constant(c: Rat) -> MPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::ONE, c);
        }
        MPoly { terms }
    }

    pub fn var(v: Var) -> MPoly {
        let mut terms = BTreeMap::new();
        terms.insert(Mono::var(v), Rat::one());
        MPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coeff(&self, m: &Mono) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rat {
        self.coeff(&Mono::ONE)
    }

    /// As a rational, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Mono::ONE).cloned(),
            _ => None,
        }
    }

    fn insert_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> MPoly {
        if c.is_zero() {
            return MPoly::zero();
        }
        MPoly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Substitute exact rationals for every variable.
    pub fn eval(&self, vals: &[Rat; NVARS]) -> Rat {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..NVARS {
                for _ in 0..m.0[i] {
                    t *= &vals[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitute prime-field values for every variable.
    pub fn eval_fp<const P: u64>(&self, vals: &[Fp<P>; NVARS]) -> Fp<P> {
        let mut acc = Fp::<P>::zero();
        for (m, c) in &self.terms {
            let mut t = rat_to_fp::<P>(c);
            for i in 0..NVARS {
                for _ in 0..m.0[i] {
                    t = t.mul(&vals[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Replace one variable by a polynomial.
    pub fn subst(&self, v: Var, by: &MPoly) -> MPoly {
        let mut acc = MPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            let mut t = MPoly {
                terms: BTreeMap::from([(m.without(v), c.clone())]),
            };
            for _ in 0..e {
                t = t.mul(by);
            }
            acc.add_assign(&t);
        }
        acc
    }

    /// The set of variables that actually occur.
    pub fn support(&self) -> Vec<Var> {
        let mut seen = [false; NVARS];
        for m in self.terms.keys() {
            for i in 0..NVARS {
                if m.0[i] > 0 {
                    seen[i] = true;
                }
            }
        }
        (0..NVARS).filter(|&i| seen[i]).map(|i| Var(i as u8)).collect()
    }

    /// Split `self` as `c0 + sum_i x_i * c_i` over the given unknowns, where
    /// no `c_i` may contain any unknown.  Returns `None` if the polynomial is
    /// not affine-linear in the unknowns (degree >= 2 or mixed products).
    pub fn linearize(&self, unknowns: &[Var]) -> Option<(MPoly, Vec<(Var, MPoly)>)> {
        let mut c0 = MPoly::zero();
        let mut lin: BTreeMap<Var, MPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let present: Vec<Var> = unknowns.iter().copied().filter(|v| m.exp(*v) > 0).collect();
            match present.as_slice() {
                [] => c0.insert_term(*m, c.clone()),
                [v] if m.exp(*v) == 1 => {
                    lin.entry(*v)
                        .or_insert_with(MPoly::zero)
                        .insert_term(m.without(*v), c.clone());
                }
                _ => return None,
            }
        }
        Some((c0, lin.into_iter().collect()))
    }
}

impl FromRat for MPoly {
    fn from_rat(r: &Rat) -> Self {
        MPoly::constant(r.clone())
    }
}

impl Ring for MPoly {
    fn zero() -> Self {
        MPoly {
            terms: BTreeMap::new(),
        }
    }
    fn one() -> Self {
        MPoly::constant(Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn neg(&self) -> Self {
        MPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(*m, c.clone());
        }
        out
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = MPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.insert_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
    fn from_int(n: i64) -> Self {
        MPoly::constant(Rat::from_int(n))
    }
}

impl crate::linalg::QMod for MPoly {
    fn m_zero() -> Self {
        Ring::zero()
    }
    fn m_is_zero(&self) -> bool {
        Ring::is_zero(self)
    }
    fn m_add(&self, rhs: &Self) -> Self {
        Ring::add(self, rhs)
    }
    fn m_scale(&self, c: &Rat) -> Self {
        self.scale(c)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            for i in 0..NVARS {
                match m.0[i] {
                    0 => {}
                    1 => factors.push(Var(i as u8).name()),
                    e => factors.push(format!("{}^{}", Var(i as u8).name(), e)),
                }
            }
            let body = factors.join("*");
            let (sign, mag) = if c < &Rat::zero() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
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
    use crate::ring::{rat, rint};

    fn p(v: Var) -> MPoly {
        MPoly::var(v)
    }

    #[test]
    fn arithmetic_and_display() {
        let a1 = p(Var::a(1));
        let b2 = p(Var::b(2));
        let x = a1.mul(&b2).scale(&rint(3)).sub(&MPoly::one());
        assert_eq!(x.to_string(), "-1 + 3*a1*b2");
        assert_eq!(x.degree(), 2);
        let y = x.sub(&x);
        assert!(y.is_zero());
    }

    #[test]
    fn eval_matches_hand_computation() {
        // 3*a1*b2 - 1 at a1 = 2, b2 = 1/2  ->  3 - 1 = 2
        let x = p(Var::a(1)).mul(&p(Var::b(2))).scale(&rint(3)).sub(&MPoly::one());
        let mut vals: [Rat; NVARS] = std::array::from_fn(|_| Rat::zero());
        vals[Var::a(1).0 as usize] = rint(2);
        vals[Var::b(2).0 as usize] = rat(1, 2);
        assert_eq!(x.eval(&vals), rint(2));
    }

    #[test]
    fn subst_is_ring_hom() {
        // (mu + nu)^2 with nu -> 1 - mu collapses to 1
        let s = p(Var::MU).add(&p(Var::NU));
        let sq = s.mul(&s);
        let res = sq.subst(Var::NU, &MPoly::one().sub(&p(Var::MU)));
        assert_eq!(res, MPoly::one());
    }

    #[test]
    fn parse_round_trips() {
        for v in Var::all() {
            assert_eq!(Var::parse(&v.name()), Some(v));
        }
        assert_eq!(Var::parse("a8"), None);
        assert_eq!(Var::parse("q"), None);
    }

    #[test]
    fn linearize_splits_affine_parts() {
        // mu*a1 + 2*a2 + 3, unknowns {a1, a2}
        let x = p(Var::MU)
            .mul(&p(Var::a(1)))
            .add(&p(Var::a(2)).scale(&rint(2)))
            .add(&MPoly::constant(rint(3)));
        let (c0, lin) = x.linearize(&[Var::a(1), Var::a(2)]).unwrap();
        assert_eq!(c0, MPoly::constant(rint(3)));
        assert_eq!(lin.len(), 2);
        assert_eq!(lin[0], (Var::a(1), p(Var::MU)));
        assert_eq!(lin[1], (Var::a(2), MPoly::constant(rint(2))));
        // quadratic in an unknown -> None
        let q = p(Var::a(1)).mul(&p(Var::a(1)));
        assert!(q.linearize(&[Var::a(1)]).is_none());
    }
}
