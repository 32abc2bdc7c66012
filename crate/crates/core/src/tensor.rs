//! Sparse exact tensors over labeled copies of `Mat(N)`.
//!
//! Multi-space operator identities ("leg" or "space" notation: `R12`, `K23`,
//! …) are the bread and butter of everything downstream, so this module gives
//! them a direct shape: a `SpaceTensor` is an operator on a tensor product of
//! named `N x N` matrix spaces, stored sparsely as `(row, col)` index pairs
//! per space.  Composition aligns the two operands on the union of their
//! space labels (absent spaces act as identity), so `a.dot(&b)` is literally
//! "`a` after `b`" in whatever common product space they generate.
//!
//! Scalars are any `Ring`, including noncommutative ones: `dot` multiplies
//! entry scalars strictly in left-to-right operand order, which is what makes
//! the same machinery serve both numeric tensors and tensors with exterior-
//! algebra entries.

use crate::ring::Ring;
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::fmt;

/// Space label.  Small integers; display is `s<label>`.
pub type Space = u8;

/// Per-space `(row, col)` index pair, 0-based.
pub type IdxPair = (u8, u8);

/// Index key aligned with the sorted space list of the owning tensor.
pub type Key = SmallVec<[IdxPair; 3]>;

#[derive(Clone, PartialEq, Debug)]
pub struct SpaceTensor<S: Ring> {
    n: usize,
    spaces: Vec<Space>,
    entries: BTreeMap<Key, S>,
}

impl<S: Ring> SpaceTensor<S> {
    pub fn zero(n: usize, spaces: &[Space]) -> Self {
        let mut spaces = spaces.to_vec();
        spaces.sort_unstable();
        spaces.dedup();
        SpaceTensor { n, spaces, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize, spaces: &[Space]) -> Self {
        let mut t = SpaceTensor::zero(n, spaces);
        let k = t.spaces.len();
        let mut idx = vec![0u8; k];
        loop {
            let key: Key = idx.iter().map(|&i| (i, i)).collect();
            t.entries.insert(key, S::one());
            // odometer over diagonal indices
            let mut pos = 0;
            loop {
                if pos == k {
                    return t;
                }
                idx[pos] += 1;
                if (idx[pos] as usize) < t.n {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Matrix dimension of each space.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn spaces(&self) -> &[Space] {
        &self.spaces
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    fn pos_of(&self, s: Space) -> usize {
        self.spaces
            .iter()
            .position(|&x| x == s)
            .unwrap_or_else(|| panic!("space s{} not among {:?}", s, self.spaces))
    }

    /// Add `v` at the key given as `(space, (row, col))` pairs in any order.
    /// Every space of the tensor must be mentioned exactly once.
    pub fn add_at(&mut self, key: &[(Space, IdxPair)], v: S) {
        assert_eq!(key.len(), self.spaces.len(), "key must cover all spaces");
        let mut aligned: Key = SmallVec::from_elem((u8::MAX, u8::MAX), self.spaces.len());
        for &(s, ij) in key {
            assert!((ij.0 as usize) < self.n && (ij.1 as usize) < self.n);
            let p = self.pos_of(s);
            assert!(aligned[p] == (u8::MAX, u8::MAX), "space s{s} repeated");
            aligned[p] = ij;
        }
        self.add_aligned(aligned, v);
    }

    fn add_aligned(&mut self, key: Key, v: S) {
        if v.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.entries.entry(key) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&v);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn get(&self, key: &[(Space, IdxPair)]) -> S {
        let mut aligned: Key = SmallVec::from_elem((0, 0), self.spaces.len());
        assert_eq!(key.len(), self.spaces.len());
        for &(s, ij) in key {
            aligned[self.pos_of(s)] = ij;
        }
        self.entries.get(&aligned).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &S)> {
        self.entries.iter()
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> SpaceTensor<T> {
        let mut out = SpaceTensor::zero(self.n, &self.spaces);
        for (k, v) in &self.entries {
            out.add_aligned(k.clone(), f(v));
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.mul(c))
    }

    pub fn scale_left(&self, c: &S) -> Self {
        self.map(|v| c.mul(v))
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.neg())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.align_to(&union(&self.spaces, &rhs.spaces));
        let rhs = rhs.align_to(&out.spaces.clone());
        for (k, v) in rhs.entries {
            out.add_aligned(k, v);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Extend by identity factors to a superset of spaces.
    pub fn align_to(&self, target: &[Space]) -> Self {
        let mut tgt = target.to_vec();
        tgt.sort_unstable();
        tgt.dedup();
        if tgt == self.spaces {
            return self.clone();
        }
        for s in &self.spaces {
            assert!(tgt.contains(s), "alignment must not drop space s{s}");
        }
        let extra: Vec<usize> = tgt
            .iter()
            .enumerate()
            .filter(|(_, s)| !self.spaces.contains(s))
            .map(|(p, _)| p)
            .collect();
        let old_pos: Vec<usize> = tgt
            .iter()
            .enumerate()
            .filter(|(_, s)| self.spaces.contains(s))
            .map(|(p, _)| p)
            .collect();
        // all diagonal index combinations for the added identity factors
        let mut diags: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..extra.len() {
            diags = diags
                .into_iter()
                .flat_map(|d| {
                    (0..self.n as u8).map(move |i| {
                        let mut d2 = d.clone();
                        d2.push(i);
                        d2
                    })
                })
                .collect();
        }
        let mut out = SpaceTensor::zero(self.n, &tgt);
        for (k, v) in &self.entries {
            let mut base: Key = SmallVec::from_elem((0, 0), tgt.len());
            for (i, &p) in old_pos.iter().enumerate() {
                base[p] = k[i];
            }
            for d in &diags {
                let mut key = base.clone();
                for (i, &p) in extra.iter().enumerate() {
                    key[p] = (d[i], d[i]);
                }
                out.add_aligned(key, v.clone());
            }
        }
        out
    }

    /// Operator composition `self ∘ rhs` on the union of spaces, with entry
    /// scalars multiplied in this exact order.
    pub fn dot(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let u = union(&self.spaces, &rhs.spaces);
        let a = self.align_to(&u);
        let b = rhs.align_to(&u);
        // group b by row key
        let mut by_row: BTreeMap<Key, Vec<(Key, &S)>> = BTreeMap::new();
        for (k, v) in &b.entries {
            let row: Key = k.iter().map(|&(r, _)| (r, r)).collect(); // row part, col ignored
            by_row.entry(row).or_default().push((k.clone(), v));
        }
        let mut out = SpaceTensor::zero(self.n, &u);
        for (ka, va) in &a.entries {
            let mid: Key = ka.iter().map(|&(_, c)| (c, c)).collect();
            if let Some(cands) = by_row.get(&mid) {
                for (kb, vb) in cands {
                    let key: Key = ka
                        .iter()
                        .zip(kb.iter())
                        .map(|(&(r, _), &(_, c))| (r, c))
                        .collect();
                    out.add_aligned(key, va.mul(vb));
                }
            }
        }
        out
    }

    /// Trace out one space.
    pub fn partial_trace(&self, s: Space) -> Self {
        let p = self.pos_of(s);
        let rest: Vec<Space> = self.spaces.iter().copied().filter(|&x| x != s).collect();
        let mut out = SpaceTensor::zero(self.n, &rest);
        for (k, v) in &self.entries {
            if k[p].0 == k[p].1 {
                let mut key: Key = k.clone();
                key.remove(p);
                out.add_aligned(key, v.clone());
            }
        }
        out
    }

    /// Full trace over all spaces.
    pub fn trace_all(&self) -> S {
        let mut acc = S::zero();
        for (k, v) in &self.entries {
            if k.iter().all(|&(r, c)| r == c) {
                acc.add_assign(v);
            }
        }
        acc
    }

    /// Transpose within one space.
    pub fn transpose(&self, s: Space) -> Self {
        let p = self.pos_of(s);
        let mut out = SpaceTensor::zero(self.n, &self.spaces);
        for (k, v) in &self.entries {
            let mut key = k.clone();
            key[p] = (key[p].1, key[p].0);
            out.add_aligned(key, v.clone());
        }
        out
    }

    /// Relabel spaces; `perm` maps old label to new label and must be a
    /// bijection on the tensor's labels.
    pub fn relabel(&self, perm: &[(Space, Space)]) -> Self {
        let lookup = |s: Space| -> Space {
            perm.iter()
                .find(|(from, _)| *from == s)
                .map(|(_, to)| *to)
                .unwrap_or(s)
        };
        let new_labels: Vec<Space> = self.spaces.iter().map(|&s| lookup(s)).collect();
        {
            let mut chk = new_labels.clone();
            chk.sort_unstable();
            chk.dedup();
            assert_eq!(chk.len(), self.spaces.len(), "relabel collides labels");
        }
        let mut out = SpaceTensor::zero(self.n, &new_labels);
        // position of old slot i in the new sorted order
        let order: Vec<usize> = {
            let sorted = out.spaces.clone();
            new_labels
                .iter()
                .map(|l| sorted.iter().position(|x| x == l).unwrap())
                .collect()
        };
        for (k, v) in &self.entries {
            let mut key: Key = SmallVec::from_elem((0, 0), k.len());
            for (i, &ij) in k.iter().enumerate() {
                key[order[i]] = ij;
            }
            out.add_aligned(key, v.clone());
        }
        out
    }

    /// Multi-line canonical dump, for golden tests and debugging.
    pub fn dump(&self) -> String
    where
        S: fmt::Display,
    {
        let mut lines: Vec<String> = Vec::new();
        for (k, v) in &self.entries {
            let idx = self
                .spaces
                .iter()
                .zip(k.iter())
                .map(|(s, (r, c))| format!("s{}:({},{})", s, r + 1, c + 1))
                .collect::<Vec<_>>()
                .join(" ");
            lines.push(format!("{idx} = {v}"));
        }
        lines.join("\n")
    }
}

fn union(a: &[Space], b: &[Space]) -> Vec<Space> {
    let mut u = a.to_vec();
    u.extend_from_slice(b);
    u.sort_unstable();
    u.dedup();
    u
}

/// Embed a dense rational matrix as an operator on one labeled space.
pub fn matrix_in_space<S: crate::ring::FromRat>(
    n: usize,
    s: Space,
    m: &[Vec<crate::ring::Rat>],
) -> SpaceTensor<S> {
    assert_eq!(m.len(), n);
    let mut t = SpaceTensor::zero(n, &[s]);
    for (i, row) in m.iter().enumerate() {
        assert_eq!(row.len(), n);
        for (j, v) in row.iter().enumerate() {
            if !num::Zero::is_zero(v) {
                t.add_at(&[(s, (i as u8, j as u8))], S::from_rat(v));
            }
        }
    }
    t
}

/// The flip operator `P` on two spaces: `P (x ⊗ y) = y ⊗ x`.
pub fn perm_p<S: Ring>(n: usize, s1: Space, s2: Space) -> SpaceTensor<S> {
    assert_ne!(s1, s2);
    let mut t = SpaceTensor::zero(n, &[s1, s2]);
    for i in 0..n as u8 {
        for j in 0..n as u8 {
            t.add_at(&[(s1, (i, j)), (s2, (j, i))], S::one());
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rint, Rat};

    fn e(n: usize, s: Space, i: u8, j: u8) -> SpaceTensor<Rat> {
        let mut t = SpaceTensor::zero(n, &[s]);
        t.add_at(&[(s, (i, j))], Rat::one());
        t
    }

    #[test]
    fn unit_matrices_compose() {
        // e12 e23 = e13, e23 e12 = 0
        let a = e(3, 1, 0, 1);
        let b = e(3, 1, 1, 2);
        assert_eq!(a.dot(&b), e(3, 1, 0, 2));
        assert!(b.dot(&a).is_zero());
    }

    #[test]
    fn identity_is_neutral() {
        let id = SpaceTensor::<Rat>::identity(3, &[1, 2]);
        let x = e(3, 1, 0, 2);
        assert_eq!(id.dot(&x), x.align_to(&[1, 2]));
        assert_eq!(x.dot(&id), x.align_to(&[1, 2]));
        assert_eq!(id.num_entries(), 9);
        assert_eq!(id.trace_all(), rint(9));
    }

    #[test]
    fn flip_squares_to_identity_and_traces() {
        let p = perm_p::<Rat>(4, 1, 2);
        let id = SpaceTensor::<Rat>::identity(4, &[1, 2]);
        assert_eq!(p.dot(&p), id);
        assert_eq!(p.trace_all(), rint(4)); // tr P = N
        // partial trace of P over either space is the identity on the other
        let t2 = p.partial_trace(2);
        assert_eq!(t2, SpaceTensor::identity(4, &[1]));
        let t1 = p.partial_trace(1);
        assert_eq!(t1, SpaceTensor::identity(4, &[2]));
    }

    #[test]
    fn flip_conjugation_swaps_legs() {
        // P (A ⊗ B) P = B ⊗ A for unit matrices on distinct spaces
        let n = 3;
        let p = perm_p::<Rat>(n, 1, 2);
        let a = e(n, 1, 0, 2);
        let b = e(n, 2, 1, 1);
        let ab = a.dot(&b);
        let swapped = p.dot(&ab).dot(&p);
        let ba = e(n, 1, 1, 1).dot(&e(n, 2, 0, 2));
        assert_eq!(swapped, ba);
    }

    #[test]
    fn alignment_and_cross_space_product() {
        // operators on disjoint spaces commute
        let a = e(3, 1, 0, 1);
        let b = e(3, 2, 2, 2);
        assert_eq!(a.dot(&b), b.dot(&a));
        assert_eq!(a.dot(&b).num_entries(), 1);
        // and composing with an overlapping third operator contracts correctly
        let c = e(3, 1, 1, 0);
        assert_eq!(a.dot(&c).get(&[(1, (0, 0))]), rint(1));
    }

    #[test]
    fn transpose_and_relabel() {
        let a = e(3, 1, 0, 2);
        assert_eq!(a.transpose(1), e(3, 1, 2, 0));
        let p12 = perm_p::<Rat>(3, 1, 2);
        let p21 = p12.relabel(&[(1, 2), (2, 1)]);
        assert_eq!(p12, p21); // flip is symmetric
        let moved = a.relabel(&[(1, 5)]);
        assert_eq!(moved.spaces(), &[5]);
        assert_eq!(moved.get(&[(5, (0, 2))]), rint(1));
    }

    #[test]
    fn relabel_reorders_keys_correctly() {
        // asymmetric two-space tensor: e(1:0,1) ⊗ e(2:2,0)
        let t = e(3, 1, 0, 1).dot(&e(3, 2, 2, 0));
        let r = t.relabel(&[(1, 2), (2, 1)]);
        assert_eq!(r.get(&[(2, (0, 1)), (1, (2, 0))]), rint(1));
        assert_eq!(r.get(&[(1, (0, 1)), (2, (2, 0))]), rint(0));
    }

    #[test]
    fn dump_format_is_stable() {
        let mut t = SpaceTensor::<Rat>::zero(2, &[2, 1]);
        t.add_at(&[(2, (0, 1)), (1, (1, 1))], rint(3));
        t.add_at(&[(1, (0, 0)), (2, (1, 0))], rint(-1));
        assert_eq!(
            t.dump(),
            "s1:(1,1) s2:(2,1) = -1\ns1:(2,2) s2:(1,2) = 3"
        );
    }

    #[test]
    fn noncommutative_scalar_order_is_preserved() {
        // Scalars in a tiny noncommutative ring: 2x2 rational matrices.
        #[derive(Clone, PartialEq, Debug)]
        struct M2([Rat; 4]);
        impl Ring for M2 {
            fn zero() -> Self {
                M2(std::array::from_fn(|_| Rat::zero()))
            }
            fn one() -> Self {
                M2([rint(1), rint(0), rint(0), rint(1)])
            }
            fn is_zero(&self) -> bool {
                self.0.iter().all(|x| Ring::is_zero(x))
            }
            fn neg(&self) -> Self {
                M2(std::array::from_fn(|i| -self.0[i].clone()))
            }
            fn add(&self, r: &Self) -> Self {
                M2(std::array::from_fn(|i| &self.0[i] + &r.0[i]))
            }
            fn mul(&self, r: &Self) -> Self {
                let a = &self.0;
                let b = &r.0;
                M2([
                    &a[0] * &b[0] + &a[1] * &b[2],
                    &a[0] * &b[1] + &a[1] * &b[3],
                    &a[2] * &b[0] + &a[3] * &b[2],
                    &a[2] * &b[1] + &a[3] * &b[3],
                ])
            }
            fn from_int(n: i64) -> Self {
                M2([rint(n), rint(0), rint(0), rint(n)])
            }
        }
        let x = M2([rint(0), rint(1), rint(0), rint(0)]);
        let y = M2([rint(0), rint(0), rint(1), rint(0)]);
        // xy = e11, yx = e22: order matters
        let mut a = SpaceTensor::<M2>::zero(2, &[1]);
        a.add_at(&[(1, (0, 0))], x.clone());
        let mut b = SpaceTensor::<M2>::zero(2, &[1]);
        b.add_at(&[(1, (0, 0))], y.clone());
        assert_eq!(a.dot(&b).get(&[(1, (0, 0))]), x.mul(&y));
        assert_eq!(b.dot(&a).get(&[(1, (0, 0))]), y.mul(&x));
        assert_ne!(x.mul(&y), y.mul(&x));
    }
}
