//! The exterior (Grassmann) algebra on the matrix of one-form generators,
//! and matrices over it.
//!
//! Generators are indexed by flat position `g = i*N + j` for the form sitting
//! at row `i`, column `j` of the generator matrix; a monomial is a strictly
//! increasing index list and carries the sign of the permutation that sorts a
//! product (the usual merge-inversion count).  Coefficients live in any
//! commutative `Ring` (rationals, parameter polynomials, Laurent
//! polynomials, jets) and commute with the generators; all the grading
//! lives in the generators themselves.
//!
//! Nothing in the algebra layer knows the matrix dimension `N`; it only
//! shuffles generator indices.  `N` enters through [`FormMat`], the `N x N`
//! matrix with values in this algebra, which is where transposed-conjugates,
//! traces and embeddings into labeled tensor spaces are defined.

use crate::ring::{FromRat, Rat, Ring};
use crate::tensor::{Space, SpaceTensor};
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;

impl<C: FromRat> FromRat for GrassPoly<C> {
    fn from_rat(r: &Rat) -> Self {
        GrassPoly::constant(C::from_rat(r))
    }
}

impl<C: FromRat> crate::linalg::QMod for GrassPoly<C> {
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
        self.scale(&C::from_rat(c))
    }
}

/// Exterior monomial: strictly increasing generator indices.
pub type GMono = SmallVec<[u16; 4]>;

/// Merge two strictly increasing monomials; `None` on a repeated generator,
/// otherwise the merged monomial and the parity sign of the interleaving.
pub fn wedge_mono(a: &GMono, b: &GMono) -> Option<(GMono, i8)> {
    let mut out: GMono = SmallVec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut crossings = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // b[j] moves past the remaining a-elements
                crossings += a.len() - i;
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, if crossings % 2 == 0 { 1 } else { -1 }))
}

/// Element of the exterior algebra with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct GrassPoly<C: Ring> {
    terms: BTreeMap<GMono, C>,
}

impl<C: Ring> GrassPoly<C> {
    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(GMono::new(), c);
        }
        GrassPoly { terms }
    }

    /// The generator with flat index `g`.
    pub fn gen(g: u16) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(GMono::from_slice(&[g]), C::one());
        GrassPoly { terms }
    }

    pub fn term(m: GMono, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        GrassPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GMono, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &GMono) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: GMono, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// True if every monomial has the same degree `d`.
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms.keys().all(|m| m.len() == d)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    /// The degree-`d` part.
    pub fn part(&self, d: usize) -> Self {
        GrassPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.len() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return GrassPoly::zero();
        }
        let mut out = GrassPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.mul(c));
        }
        out
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> GrassPoly<D> {
        let mut out = GrassPoly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), f(v));
        }
        out
    }

    /// Interior product with a linear functional on generators:
    /// `i_f(g) = f(g)`, extended as an odd derivation.
    pub fn contract(&self, f: &dyn Fn(u16) -> C) -> Self {
        let mut out = GrassPoly::zero();
        for (m, c) in &self.terms {
            for (pos, &g) in m.iter().enumerate() {
                let fg = f(g);
                if !fg.is_zero() {
                    let mut rest = m.clone();
                    rest.remove(pos);
                    let v = fg.mul(c);
                    out.add_term(rest, if pos % 2 == 0 { v } else { v.neg() });
                }
            }
        }
        out
    }
}

impl<C: Ring> Ring for GrassPoly<C> {
    fn zero() -> Self {
        GrassPoly { terms: BTreeMap::new() }
    }
    fn one() -> Self {
        GrassPoly::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn neg(&self) -> Self {
        GrassPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = GrassPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                if let Some((m, s)) = wedge_mono(m1, m2) {
                    let c = c1.mul(c2);
                    out.add_term(m, if s < 0 { c.neg() } else { c });
                }
            }
        }
        out
    }
    fn from_int(n: i64) -> Self {
        GrassPoly::constant(C::from_int(n))
    }
}

impl<C: Ring + fmt::Display> fmt::Display for GrassPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let gens = m.iter().map(|g| format!("w{}", g)).collect::<Vec<_>>().join("^");
                if m.is_empty() {
                    format!("({})", c)
                } else {
                    format!("({})*{}", c, gens)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `N x N` matrix over the exterior algebra.
#[derive(Clone, PartialEq, Debug)]
pub struct FormMat<C: Ring> {
    n: usize,
    e: Vec<GrassPoly<C>>, // row-major
}

impl<C: Ring> FormMat<C> {
    pub fn zero(n: usize) -> Self {
        FormMat { n, e: vec![GrassPoly::zero(); n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> GrassPoly<C>) -> Self {
        FormMat {
            n,
            e: (0..n * n).map(|k| f(k / n, k % n)).collect(),
        }
    }

    /// The matrix of generators: entry `(i, j)` is generator `i*N + j`.
    pub fn generators(n: usize) -> Self {
        FormMat::from_fn(n, |i, j| GrassPoly::gen((i * n + j) as u16))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &GrassPoly<C> {
        &self.e[i * self.n + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut GrassPoly<C> {
        &mut self.e[i * self.n + j]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        FormMat {
            n: self.n,
            e: self.e.iter().zip(&rhs.e).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        FormMat { n: self.n, e: self.e.iter().map(|x| x.neg()).collect() }
    }

    pub fn scale(&self, c: &GrassPoly<C>) -> Self {
        FormMat { n: self.n, e: self.e.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn scale_left(&self, c: &GrassPoly<C>) -> Self {
        FormMat { n: self.n, e: self.e.iter().map(|x| c.mul(x)).collect() }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        FormMat::from_fn(n, |i, j| {
            let mut acc = GrassPoly::zero();
            for k in 0..n {
                acc.add_assign(&self.at(i, k).mul(rhs.at(k, j)));
            }
            acc
        })
    }

    pub fn trace(&self) -> GrassPoly<C> {
        let mut acc = GrassPoly::zero();
        for i in 0..self.n {
            acc.add_assign(self.at(i, i));
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        FormMat::from_fn(self.n, |i, j| self.at(j, i).clone())
    }

    /// Commutator `[self, rhs]`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub(&rhs.matmul(self))
    }

    /// Anticommutator `{self, rhs}`.
    pub fn anticommutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).add(&rhs.matmul(self))
    }

    /// Multiply by a rational matrix on the left.
    pub fn lmul_q(&self, m: &[Vec<Rat>]) -> Self
    where
        C: FromRat,
    {
        let n = self.n;
        assert_eq!(m.len(), n);
        FormMat::from_fn(n, |i, j| {
            let mut acc = GrassPoly::zero();
            for k in 0..n {
                if !m[i][k].is_zero() {
                    acc.add_assign(&self.at(k, j).scale(&C::from_rat(&m[i][k])));
                }
            }
            acc
        })
    }

    /// Multiply by a rational matrix on the right.
    pub fn rmul_q(&self, m: &[Vec<Rat>]) -> Self
    where
        C: FromRat,
    {
        let n = self.n;
        assert_eq!(m.len(), n);
        FormMat::from_fn(n, |i, j| {
            let mut acc = GrassPoly::zero();
            for k in 0..n {
                if !m[k][j].is_zero() {
                    acc.add_assign(&self.at(i, k).scale(&C::from_rat(&m[k][j])));
                }
            }
            acc
        })
    }

    /// Place the matrix into a labeled tensor space.
    pub fn embed(&self, space: Space) -> SpaceTensor<GrassPoly<C>> {
        let mut t = SpaceTensor::zero(self.n, &[space]);
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.at(i, j);
                if !v.is_zero() {
                    t.add_at(&[(space, (i as u8, j as u8))], v.clone());
                }
            }
        }
        t
    }

    pub fn map_entries(&self, f: impl Fn(&GrassPoly<C>) -> GrassPoly<C>) -> Self {
        FormMat { n: self.n, e: self.e.iter().map(&f).collect() }
    }
}

/// Linear functionals vanishing on the span of the given degree-one
/// elements, as coefficient vectors over `0..ngens`.
pub fn annihilator(span: &[GrassPoly<Rat>], ngens: usize) -> Vec<Vec<Rat>> {
    use crate::linalg::{solve_affine, SparseVec};
    let rows: Vec<SparseVec<Rat>> = span
        .iter()
        .map(|p| {
            let mut entries = Vec::new();
            for (m, c) in p.terms() {
                assert_eq!(m.len(), 1, "annihilator expects degree-one spanners");
                entries.push((m[0] as u32, c.clone()));
            }
            entries.sort_by_key(|e| e.0);
            SparseVec { entries }
        })
        .collect();
    let rhs = vec![Rat::zero(); rows.len()];
    solve_affine(&rows, &rhs, ngens)
        .expect("homogeneous system is always consistent")
        .nullspace
}

/// Does a homogeneous element lie in the exterior subalgebra generated by the
/// given degree-one elements?  Equivalent to every annihilating functional of
/// the span contracting it to zero.
pub fn subalgebra_membership<C: FromRat>(
    x: &GrassPoly<C>,
    span: &[GrassPoly<Rat>],
    ngens: usize,
) -> bool {
    for f in annihilator(span, ngens) {
        let fx = x.contract(&|g| C::from_rat(&f[g as usize]));
        if !fx.is_zero() {
            return false;
        }
    }
    true
}

/// Row space of homogeneous degree-`deg` elements, for exact membership
/// queries.  Columns are the `C(ngens, deg)` monomials in lexicographic
/// order.
pub struct HomSpan {
    deg: usize,
    echelon: crate::linalg::Echelon<Rat>,
    index: BTreeMap<GMono, u32>,
}

impl HomSpan {
    pub fn new(deg: usize, ngens: usize) -> Self {
        let mut index = BTreeMap::new();
        let mut stack: Vec<GMono> = vec![GMono::new()];
        // lexicographic enumeration of increasing index tuples
        let mut next = 0u32;
        while let Some(m) = stack.pop() {
            if m.len() == deg {
                index.insert(m, next);
                next += 1;
                continue;
            }
            let lo = m.last().map(|&g| g + 1).unwrap_or(0);
            // push in reverse so the stack pops in increasing order
            for g in (lo..ngens as u16).rev() {
                let mut ext = m.clone();
                ext.push(g);
                stack.push(ext);
            }
        }
        HomSpan {
            deg,
            echelon: crate::linalg::Echelon::new(),
            index,
        }
    }

    fn flatten(&self, p: &GrassPoly<Rat>) -> crate::linalg::SparseVec<Rat> {
        let mut entries = Vec::new();
        for (m, c) in p.terms() {
            assert_eq!(m.len(), self.deg, "inhomogeneous element in HomSpan");
            entries.push((*self.index.get(m).expect("monomial in range"), c.clone()));
        }
        entries.sort_by_key(|e| e.0);
        crate::linalg::SparseVec { entries }
    }

    pub fn insert(&mut self, p: &GrassPoly<Rat>) {
        if !p.is_zero() {
            self.echelon.insert(&self.flatten(p));
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn contains(&self, p: &GrassPoly<Rat>) -> bool {
        p.is_zero() || self.echelon.contains(&self.flatten(p))
    }
}

/// Degree-3 part of the two-sided ideal generated by homogeneous degree-2
/// elements: the span of `g ∧ θ_t` over all generators `θ_t` (degree-2
/// elements are central, so one-sided products suffice).
pub fn quad_ideal_deg3(gens: &[GrassPoly<Rat>], ngens: usize) -> HomSpan {
    let mut span = HomSpan::new(3, ngens);
    for g in gens {
        for t in 0..ngens as u16 {
            span.insert(&g.mul(&GrassPoly::gen(t)));
        }
    }
    span
}

/// Recover an `N x N` matrix of algebra elements from a one-space tensor.
pub fn formmat_from_tensor<C: Ring>(t: &SpaceTensor<GrassPoly<C>>) -> FormMat<C> {
    assert_eq!(t.spaces().len(), 1, "expected a single-space tensor");
    let s = t.spaces()[0];
    let n = t.dim();
    let mut m = FormMat::zero(n);
    for i in 0..n {
        for j in 0..n {
            *m.at_mut(i, j) = t.get(&[(s, (i as u8, j as u8))]);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rint;

    type G = GrassPoly<Rat>;

    #[test]
    fn generators_anticommute_and_square_to_zero() {
        let a = G::gen(3);
        let b = G::gen(7);
        assert_eq!(a.mul(&b), b.mul(&a).neg());
        assert!(a.mul(&a).is_zero());
        // degree-2 elements commute with everything
        let ab = a.mul(&b);
        let c = G::gen(1);
        assert_eq!(ab.mul(&c), c.mul(&ab));
    }

    #[test]
    fn wedge_sign_matches_sorting_parity() {
        // w5 w2 w9 w0 -> sign of the permutation sorting [5,2,9,0] = ?
        // hand count: sorting [5,2,9,0] to [0,2,5,9] needs inversion count of
        // pairs out of order: (5,2),(5,0),(2,0),(9,0) = 4 inversions -> +1
        let prod = G::gen(5).mul(&G::gen(2)).mul(&G::gen(9)).mul(&G::gen(0));
        let m: GMono = GMono::from_slice(&[0, 2, 5, 9]);
        assert_eq!(prod.coeff(&m), rint(1));
        // swapping two adjacent factors flips the sign
        let prod2 = G::gen(2).mul(&G::gen(5)).mul(&G::gen(9)).mul(&G::gen(0));
        assert_eq!(prod2.coeff(&m), rint(-1));
    }

    #[test]
    fn associativity_spot_checks() {
        let x = G::gen(0).add(&G::gen(1).scale(&rint(2)));
        let y = G::gen(1).add(&G::gen(2));
        let z = G::gen(0).add(&G::gen(3).scale(&rint(-1)));
        assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn contraction_is_an_odd_derivation() {
        // f dual to generator 1
        let f = |g: u16| if g == 1 { Rat::one() } else { Rat::zero() };
        let x = G::gen(0).mul(&G::gen(1)); // w0^w1
        // i_f(w0^w1) = f(w0) w1 - w0 f(w1) = -w0
        assert_eq!(x.contract(&f), G::gen(0).neg());
        let y = G::gen(1).mul(&G::gen(2));
        assert_eq!(y.contract(&f), G::gen(2));
        // Leibniz: i_f(x*y) = i_f(x)*y + (-1)^|x| x*i_f(y) for homogeneous x
        let big = x.mul(&y);
        assert!(big.is_zero()); // shares w1 -> zero, trivially consistent
        let x2 = G::gen(0).mul(&G::gen(3));
        let big2 = x2.mul(&y);
        let lhs = big2.contract(&f);
        let rhs = x2.contract(&f).mul(&y).add(&x2.mul(&y.contract(&f))); // |x2| even
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn matrix_square_picks_up_wedge_products() {
        // For the 2x2 generator matrix W, (W^2)_{00} = w00^w00? no:
        // (W^2)_{00} = W00 W00 + W01 W10 = w0 w0 + w1 w2 = w1^w2.
        let w = FormMat::<Rat>::generators(2);
        let sq = w.matmul(&w);
        assert_eq!(*sq.at(0, 0), G::gen(1).mul(&G::gen(2)));
        // trace of W is w0 + w3
        assert_eq!(w.trace(), G::gen(0).add(&G::gen(3)));
        // tr(W^2) = w1w2 + w2w1 = 0? no: (W^2)_{11} = W10 W01 + W11 W11 = w2 w1.
        // So tr W^2 = w1w2 + w2w1 = 0.
        assert!(sq.trace().is_zero());
    }

    #[test]
    fn odd_matrix_trace_identities() {
        // For matrices of odd forms, tr(AB) = -tr(BA).
        let n = 3;
        let w = FormMat::<Rat>::generators(n);
        // Build a second odd matrix from different generators by transposing
        // and shifting coefficients: entries remain degree 1.
        let v = w.transpose().scale(&G::constant(rint(2)));
        let ab = w.matmul(&v).trace();
        let ba = v.matmul(&w).trace();
        assert_eq!(ab, ba.neg());
    }

    #[test]
    fn embed_round_trips() {
        let w = FormMat::<Rat>::generators(3);
        let t = w.embed(2);
        assert_eq!(formmat_from_tensor(&t), w);
    }

    #[test]
    fn numeric_conjugation() {
        // lmul/rmul by rational matrices: D W D^-1 with D = diag(1, 2)
        let w = FormMat::<Rat>::generators(2);
        let d = vec![vec![rint(1), rint(0)], vec![rint(0), rint(2)]];
        let dinv = vec![vec![rint(1), rint(0)], vec![Rat::zero(), crate::ring::rat(1, 2)]];
        let conj = w.lmul_q(&d).rmul_q(&dinv);
        assert_eq!(*conj.at(0, 0), G::gen(0));
        assert_eq!(*conj.at(0, 1), G::gen(1).scale(&crate::ring::rat(1, 2)));
        assert_eq!(*conj.at(1, 0), G::gen(2).scale(&rint(2)));
    }
}
