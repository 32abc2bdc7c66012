//! Exact linear algebra: sparse echelon forms over a field, dense inversion
//! over the rationals, and affine solving with module-valued right-hand
//! sides.
//!
//! Nothing here is numerically clever — pivoting is by column order, not
//! magnitude, because the scalars are exact and the matrices are either small
//! (parameter systems, Gram matrices) or handled over prime fields where
//! growth is a non-issue.  The one structural twist is `solve_affine`: the
//! unknowns of the first-order deformation systems take values in the
//! exterior algebra, not in Q, so the solver is generic over a Q-module for
//! the right-hand side while the coefficient matrix stays rational.

use crate::ring::{Rat, Ring};
use std::collections::BTreeMap;

/// A ring whose nonzero elements are invertible, as far as elimination cares.
pub trait Field: Ring {
    fn inv(&self) -> Self;
}

impl Field for Rat {
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Rat::one() / self
    }
}

impl<const P: u64> Field for crate::modp::Fp<P> {
    fn inv(&self) -> Self {
        crate::modp::Fp::inv(*self)
    }
}

/// Sparse vector: strictly increasing indices, nonzero values.
#[derive(Clone, PartialEq, Debug)]
pub struct SparseVec<F> {
    pub entries: Vec<(u32, F)>,
}

impl<F: Field> SparseVec<F> {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn from_entries(mut entries: Vec<(u32, F)>) -> Self {
        entries.retain(|(_, v)| !v.is_zero());
        entries.sort_by_key(|(i, _)| *i);
        for w in entries.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate index {}", w[0].0);
        }
        SparseVec { entries }
    }

    pub fn from_dense(row: &[F]) -> Self {
        SparseVec {
            entries: row
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i as u32, v.clone()))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &F)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn leading(&self) -> Option<(u32, &F)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, idx: u32) -> Option<&F> {
        self.entries
            .binary_search_by_key(&idx, |(i, _)| *i)
            .ok()
            .map(|p| &self.entries[p].1)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v.mul(c))).collect(),
        }
    }

    /// `self + c * other`, merged in one pass.
    pub fn add_scaled(&self, other: &Self, c: &F) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let pick_left = match (self.entries.get(i), other.entries.get(j)) {
                (Some((a, _)), Some((b, _))) => {
                    if a == b {
                        let v = self.entries[i].1.add(&other.entries[j].1.mul(c));
                        if !v.is_zero() {
                            out.push((*a, v));
                        }
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a < b
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if pick_left {
                out.push(self.entries[i].clone());
                i += 1;
            } else {
                let (b, v) = &other.entries[j];
                let v = v.mul(c);
                if !v.is_zero() {
                    out.push((*b, v));
                }
                j += 1;
            }
        }
        SparseVec { entries: out }
    }
}

impl<F: Field> Default for SparseVec<F> {
    fn default() -> Self {
        SparseVec::new()
    }
}

/// Incrementally built reduced echelon basis of a row space.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    /// pivot column -> row with leading 1 at that column
    rows: BTreeMap<u32, SparseVec<F>>,
}

impl<F: Field> Echelon<F> {
    pub fn new() -> Self {
        Echelon { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_cols(&self) -> impl Iterator<Item = u32> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<F>> {
        self.rows.values()
    }

    /// Residual of `v` against the current basis.
    pub fn reduce(&self, v: &SparseVec<F>) -> SparseVec<F> {
        let mut cur = v.clone();
        loop {
            let Some((lead, coef)) = cur.leading().map(|(i, c)| (i, c.clone())) else {
                return cur;
            };
            let Some(pivot) = self.rows.get(&lead) else {
                return cur;
            };
            cur = cur.add_scaled(pivot, &coef.neg());
        }
    }

    /// True iff `v` lies in the current row space.
    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Reduce and insert; returns whether the rank grew.
    pub fn insert(&mut self, v: &SparseVec<F>) -> bool {
        let mut red = self.reduce(v);
        let Some((lead, coef)) = red.leading().map(|(i, c)| (i, c.clone())) else {
            return false;
        };
        // Clear interior entries sitting at existing pivot columns, so the
        // stored basis is in fully reduced form (keeps rows short).
        let cols: Vec<u32> = self.rows.keys().copied().collect();
        for col in &cols {
            if let Some(c) = red.get(*col).cloned() {
                let pivot = self.rows.get(col).unwrap();
                red = red.add_scaled(pivot, &c.neg());
            }
        }
        let normalized = red.scale(&coef.inv());
        // Back-substitute into existing rows so the basis stays fully reduced
        // (keeps later reductions short).
        let cols: Vec<u32> = self.rows.keys().copied().collect();
        for col in cols {
            let row = self.rows.get(&col).unwrap();
            if let Some(c) = row.get(lead).cloned() {
                let updated = row.add_scaled(&normalized, &c.neg());
                self.rows.insert(col, updated);
            }
        }
        self.rows.insert(lead, normalized);
        true
    }

    pub fn insert_all<'a, I: IntoIterator<Item = &'a SparseVec<F>>>(&mut self, rows: I)
    where
        F: 'a,
    {
        for r in rows {
            self.insert(r);
        }
    }
}

impl<F: Field> Default for Echelon<F> {
    fn default() -> Self {
        Echelon::new()
    }
}

/// Rank of a set of rows.
pub fn rank_of<F: Field>(rows: &[SparseVec<F>]) -> usize {
    let mut e = Echelon::new();
    e.insert_all(rows);
    e.rank()
}

/// Row-space comparison: `sub` is contained in `sup`.
pub fn rowspace_contained<F: Field>(sub: &[SparseVec<F>], sup: &[SparseVec<F>]) -> bool {
    let mut e = Echelon::new();
    e.insert_all(sup);
    sub.iter().all(|r| e.contains(r))
}

/// Row-space equality.
pub fn rowspace_equal<F: Field>(a: &[SparseVec<F>], b: &[SparseVec<F>]) -> bool {
    rowspace_contained(a, b) && rowspace_contained(b, a)
}

/// Dense inverse over the rationals; `None` when singular.
pub fn invert_dense(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n), "inverse of non-square matrix");
    // Augmented [A | I], forward + backward elimination.
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = Field::inv(&m[col][col]);
        for x in m[col].iter_mut() {
            *x = x.mul(&inv);
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let delta = m[col][c].mul(&f);
                    m[r][c] = m[r][c].sub(&delta);
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// A module over the rationals; the value type of affine-system unknowns.
/// Method names carry an `m_` prefix to avoid colliding with `Ring` when a
/// type implements both.
pub trait QMod: Clone + PartialEq + std::fmt::Debug {
    fn m_zero() -> Self;
    fn m_is_zero(&self) -> bool;
    fn m_add(&self, rhs: &Self) -> Self;
    fn m_scale(&self, c: &Rat) -> Self;

    fn m_neg(&self) -> Self {
        self.m_scale(&-Rat::one())
    }
    fn m_sub(&self, rhs: &Self) -> Self {
        self.m_add(&rhs.m_neg())
    }
}

impl QMod for Rat {
    fn m_zero() -> Self {
        Ring::zero()
    }
    fn m_is_zero(&self) -> bool {
        Ring::is_zero(self)
    }
    fn m_add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn m_scale(&self, c: &Rat) -> Self {
        self * c
    }
}

impl<M: QMod> QMod for Vec<M> {
    fn m_zero() -> Self {
        Vec::new()
    }
    fn m_is_zero(&self) -> bool {
        self.iter().all(|x| x.m_is_zero())
    }
    fn m_add(&self, rhs: &Self) -> Self {
        let n = self.len().max(rhs.len());
        (0..n)
            .map(|i| {
                let a = self.get(i).cloned().unwrap_or_else(M::m_zero);
                let b = rhs.get(i).cloned().unwrap_or_else(M::m_zero);
                a.m_add(&b)
            })
            .collect()
    }
    fn m_scale(&self, c: &Rat) -> Self {
        self.iter().map(|x| x.m_scale(c)).collect()
    }
}

/// Outcome of solving `A x = rhs` with rational `A` and module-valued `rhs`.
#[derive(Clone, Debug)]
pub struct AffineSolution<M> {
    /// One solution (free unknowns set to zero).
    pub particular: Vec<M>,
    /// Rational basis of the homogeneous solution space.
    pub nullspace: Vec<Vec<Rat>>,
    /// Rank of the coefficient matrix.
    pub rank: usize,
}

/// Solve `A x = rhs` for `x` in `M^ncols`.  Returns `None` when inconsistent.
pub fn solve_affine<M: QMod>(
    rows: &[SparseVec<Rat>],
    rhs: &[M],
    ncols: usize,
) -> Option<AffineSolution<M>> {
    assert_eq!(rows.len(), rhs.len());
    // Forward elimination on (A | rhs), fully reduced as we go.
    // pivot col -> (row, rhs)
    let mut ech: BTreeMap<u32, (SparseVec<Rat>, M)> = BTreeMap::new();
    for (row, r) in rows.iter().zip(rhs.iter()) {
        let mut cur = row.clone();
        let mut cur_rhs = r.clone();
        loop {
            let Some((lead, coef)) = cur.leading().map(|(i, c)| (i, c.clone())) else {
                break;
            };
            let Some((prow, prhs)) = ech.get(&lead) else {
                break;
            };
            cur = cur.add_scaled(prow, &Ring::neg(&coef));
            cur_rhs = cur_rhs.m_sub(&prhs.m_scale(&coef));
        }
        match cur.leading().map(|(i, c)| (i, c.clone())) {
            None => {
                if !cur_rhs.m_is_zero() {
                    return None; // 0 = nonzero: inconsistent
                }
            }
            Some((lead, coef)) => {
                // The leading-based loop above only clears pivot columns up
                // to this row's final lead; entries at *later* pivot columns
                // survive it and must go too, or the read-off below is wrong.
                let cols: Vec<u32> = ech.keys().copied().collect();
                for col in &cols {
                    if let Some(c) = cur.get(*col).cloned() {
                        let (prow, prhs) = ech.get(col).unwrap();
                        cur = cur.add_scaled(prow, &Ring::neg(&c));
                        cur_rhs = cur_rhs.m_sub(&prhs.m_scale(&c));
                    }
                }
                let inv = Field::inv(&coef);
                let nrow = cur.scale(&inv);
                let nrhs = cur_rhs.m_scale(&inv);
                // Back-substitute into earlier pivots.
                for col in cols {
                    let (erow, erhs) = ech.get(&col).unwrap();
                    if let Some(c) = erow.get(lead).cloned() {
                        let urow = erow.add_scaled(&nrow, &Ring::neg(&c));
                        let urhs = erhs.m_sub(&nrhs.m_scale(&c));
                        ech.insert(col, (urow, urhs));
                    }
                }
                ech.insert(lead, (nrow, nrhs));
            }
        }
    }
    let rank = ech.len();
    let pivot_cols: Vec<u32> = ech.keys().copied().collect();
    let is_pivot = |c: u32| pivot_cols.binary_search(&c).is_ok();

    // Particular solution: free unknowns zero, pivot unknowns read off rhs.
    let mut particular = vec![M::m_zero(); ncols];
    for (col, (_, r)) in &ech {
        particular[*col as usize] = r.clone();
    }
    // Nullspace: one basis vector per free column.
    let mut nullspace = Vec::new();
    for free in 0..ncols as u32 {
        if is_pivot(free) {
            continue;
        }
        let mut v = vec![Rat::zero(); ncols];
        v[free as usize] = Rat::one();
        for (col, (row, _)) in &ech {
            if let Some(c) = row.get(free) {
                v[*col as usize] = -c.clone();
            }
        }
        nullspace.push(v);
    }
    Some(AffineSolution { particular, nullspace, rank })
}

/// Evaluate `A x - rhs` for a candidate module-valued solution.
pub fn residual<M: QMod>(rows: &[SparseVec<Rat>], rhs: &[M], x: &[M]) -> Vec<M> {
    rows.iter()
        .zip(rhs.iter())
        .map(|(row, r)| {
            let mut acc = M::m_zero();
            for (i, c) in &row.entries {
                acc = acc.m_add(&x[*i as usize].m_scale(c));
            }
            acc.m_sub(r)
        })
        .collect()
}
