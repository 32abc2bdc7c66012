//! Orthogonal and symplectic data: invariant metric, Lie algebra basis with
//! its triangular decomposition, Casimir and r-matrices, and the metric
//! tensors (`P`, `K0`) acting on two matrix spaces.
//!
//! Index conventions (0-based internally): the primed index is
//! `i' = N-1-i`; for the symplectic family `eps_i = +1` on the first half and
//! `-1` on the second, and the family sign is `eps = +1` (orthogonal) or
//! `-1` (symplectic).  The metric is `C^{ij} = eps_i δ_{i,j'}` (with all
//! `eps_i = 1` in the orthogonal case), its inverse-with-a-twist satisfies
//! the index contraction `C^{at} C_{bt} = eps δ^a_b`, and the Lie algebra is
//! cut out by `C X^t C^{-1} = -X`, spanned by
//! `M_ij = e_ij - eps_i eps_j e_{j'i'}`.

use crate::linalg::{invert_dense, Echelon, SparseVec};
use crate::ring::{rint, FromRat, Rat, Ring};
use crate::tensor::{matrix_in_space, perm_p, Space, SpaceTensor};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    SO,
    Sp,
}

impl Family {
    pub fn eps(self) -> i64 {
        match self {
            Family::SO => 1,
            Family::Sp => -1,
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GroupError {
    #[error("matrix dimension must be at least 4, got {0}")]
    TooSmall(usize),
    #[error("symplectic groups need even matrix dimension, got {0}")]
    OddSymplectic(usize),
}

/// Dense rational matrix, row-major.
pub type QMat = Vec<Vec<Rat>>;

pub fn qmat_zero(n: usize) -> QMat {
    vec![vec![Rat::zero(); n]; n]
}

pub fn qmat_unit(n: usize, i: usize, j: usize) -> QMat {
    let mut m = qmat_zero(n);
    m[i][j] = Rat::one();
    m
}

pub fn qmat_add(a: &QMat, b: &QMat) -> QMat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn qmat_scale(a: &QMat, c: &Rat) -> QMat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

pub fn qmat_mul(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let mut out = qmat_zero(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn qmat_commutator(a: &QMat, b: &QMat) -> QMat {
    qmat_add(&qmat_mul(a, b), &qmat_scale(&qmat_mul(b, a), &rint(-1)))
}

pub fn qmat_transpose(a: &QMat) -> QMat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].clone()).collect()).collect()
}

pub fn qmat_trace(a: &QMat) -> Rat {
    let mut t = Rat::zero();
    for (i, row) in a.iter().enumerate() {
        t += &row[i];
    }
    t
}

pub fn qmat_is_zero(a: &QMat) -> bool {
    a.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

/// `tr(A B)` without forming the product.
pub fn trace_pair(a: &QMat, b: &QMat) -> Rat {
    let n = a.len();
    let mut t = Rat::zero();
    for i in 0..n {
        for k in 0..n {
            t += &a[i][k] * &b[k][i];
        }
    }
    t
}

fn flatten(a: &QMat) -> SparseVec<Rat> {
    let n = a.len();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !a[i][j].is_zero() {
                entries.push(((i * n + j) as u32, a[i][j].clone()));
            }
        }
    }
    SparseVec::from_entries(entries)
}

/// One classical group in its defining representation.
#[derive(Clone, Debug)]
pub struct Group {
    pub family: Family,
    pub n: usize,
    /// `C^{ij}` with upper indices.
    pub metric: QMat,
    /// `C_{ij}` with lower indices (satisfies `C^{at} C_{bt} = eps δ^a_b`).
    pub metric_lower: QMat,
    /// Cartan generators `h_i = e_ii - e_{i'i'}`, `i = 0..rank`.
    pub cartan: Vec<QMat>,
    /// Positive root vectors (independent `M_ij` from the upper triangle).
    pub positive: Vec<QMat>,
    /// Negative root vectors, in the order matching `positive` transposed
    /// pairs (`negative[k]` spans the root space opposite `positive[k]`'s).
    pub negative: Vec<QMat>,
}

impl Group {
    pub fn new(family: Family, n: usize) -> Result<Group, GroupError> {
        if n < 4 {
            return Err(GroupError::TooSmall(n));
        }
        if family == Family::Sp && n % 2 != 0 {
            return Err(GroupError::OddSymplectic(n));
        }
        let epsv: Vec<i64> = (0..n)
            .map(|i| match family {
                Family::SO => 1,
                Family::Sp => {
                    if i < n / 2 {
                        1
                    } else {
                        -1
                    }
                }
            })
            .collect();
        let prime = |i: usize| n - 1 - i;
        let mut metric = qmat_zero(n);
        let mut metric_lower = qmat_zero(n);
        for i in 0..n {
            metric[i][prime(i)] = rint(epsv[i]);
            // C_{ij} = eps_j δ_{i,j'}
            for j in 0..n {
                if i == prime(j) {
                    metric_lower[i][j] = rint(epsv[j]);
                }
            }
        }
        let m_elem = |i: usize, j: usize| -> QMat {
            // M_ij = e_ij - eps_i eps_j e_{j'i'}
            let mut m = qmat_unit(n, i, j);
            m[prime(j)][prime(i)] -= rint(epsv[i] * epsv[j]);
            m
        };
        let rank = n / 2;
        let cartan: Vec<QMat> = (0..rank).map(|i| m_elem(i, i)).collect();
        // Upper-triangular M_ij, deduplicated by rank growth.
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        let mut ech = Echelon::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let m = m_elem(i, j);
                if qmat_is_zero(&m) {
                    continue;
                }
                if ech.insert(&flatten(&m)) {
                    positive.push(m);
                    negative.push(m_elem(j, i));
                }
            }
        }
        let g = Group {
            family,
            n,
            metric,
            metric_lower,
            cartan,
            positive,
            negative,
        };
        debug_assert_eq!(g.dim_lie(), g.expected_dim());
        Ok(g)
    }

    pub fn eps(&self) -> i64 {
        self.family.eps()
    }

    pub fn rank(&self) -> usize {
        self.n / 2
    }

    /// Count of basis elements actually constructed.
    pub fn dim_lie(&self) -> usize {
        self.cartan.len() + self.positive.len() + self.negative.len()
    }

    /// Closed-form dimension: `N(N-eps)/2`.
    pub fn expected_dim(&self) -> usize {
        let n = self.n as i64;
        (n * (n - self.eps()) / 2) as usize
    }

    /// Full basis: Cartan, then positive, then negative root vectors.
    pub fn basis(&self) -> Vec<QMat> {
        let mut b = self.cartan.clone();
        b.extend(self.positive.iter().cloned());
        b.extend(self.negative.iter().cloned());
        b
    }

    /// Membership in the Lie algebra: `C X^t C^{-1} = -X`.
    pub fn in_lie_algebra(&self, x: &QMat) -> bool {
        let cx = qmat_mul(&self.metric, &qmat_mul(&qmat_transpose(x), &self.metric_lower_inverse()));
        qmat_is_zero(&qmat_add(&cx, x))
    }

    /// The matrix inverse of `metric` (differs from `metric_lower` by the
    /// family sign in the contraction convention).
    pub fn metric_lower_inverse(&self) -> QMat {
        invert_dense(&self.metric).expect("metric is invertible")
    }

    /// Trace-form dual basis of the full basis: `d_k` with
    /// `tr(basis[i] d_j) = δ_ij`.
    pub fn dual_basis(&self) -> Vec<QMat> {
        let b = self.basis();
        let d = b.len();
        let gram: Vec<Vec<Rat>> = (0..d)
            .map(|i| (0..d).map(|j| trace_pair(&b[i], &b[j])).collect())
            .collect();
        let ginv = invert_dense(&gram).expect("trace form is nondegenerate");
        (0..d)
            .map(|j| {
                let mut acc = qmat_zero(self.n);
                for (i, bi) in b.iter().enumerate() {
                    if !ginv[i][j].is_zero() {
                        acc = qmat_add(&acc, &qmat_scale(bi, &ginv[i][j]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Split Casimir `t = Σ_k basis[k] ⊗ dual[k]` on spaces `(s1, s2)`.
    pub fn casimir(&self, s1: Space, s2: Space) -> SpaceTensor<Rat> {
        let b = self.basis();
        let d = self.dual_basis();
        let mut t = SpaceTensor::zero(self.n, &[s1, s2]);
        for (x, y) in b.iter().zip(d.iter()) {
            t = t.add(&two_leg(self.n, s1, s2, x, y));
        }
        t
    }

    /// The standard (Drinfeld–Jimbo) classical r-matrix,
    /// `r = (1/2) Σ_α (e_α ⊗ f^α - f^α ⊗ e_α)`,
    /// where `f^α` is trace-dual to `e_α` inside the opposite triangle.
    pub fn standard_r(&self, s1: Space, s2: Space) -> SpaceTensor<Rat> {
        let p = &self.positive;
        let m = &self.negative;
        let k = p.len();
        let gram: Vec<Vec<Rat>> = (0..k)
            .map(|i| (0..k).map(|j| trace_pair(&p[i], &m[j])).collect())
            .collect();
        let ginv = invert_dense(&gram).expect("triangular pairing is nondegenerate");
        let duals: Vec<QMat> = (0..k)
            .map(|i| {
                let mut acc = qmat_zero(self.n);
                for (j, mj) in m.iter().enumerate() {
                    if !ginv[j][i].is_zero() {
                        acc = qmat_add(&acc, &qmat_scale(mj, &ginv[j][i]));
                    }
                }
                acc
            })
            .collect();
        let mut t = SpaceTensor::zero(self.n, &[s1, s2]);
        let half = crate::ring::rat(1, 2);
        for (e, f) in p.iter().zip(duals.iter()) {
            let fwd = two_leg(self.n, s1, s2, e, f);
            let bwd = two_leg(self.n, s1, s2, f, e);
            t = t.add(&fwd.sub(&bwd));
        }
        t.map(|v| v * &half)
    }

    /// A rank-two abelian r-matrix `r = x ⊗ y - y ⊗ x` from two commuting
    /// Cartan elements; satisfies the classical Yang–Baxter equation with
    /// zero defect.
    pub fn abelian_r(&self, s1: Space, s2: Space) -> SpaceTensor<Rat> {
        assert!(self.rank() >= 2, "need two Cartan directions");
        let x = &self.cartan[0];
        let y = &self.cartan[1];
        two_leg(self.n, s1, s2, x, y).sub(&two_leg(self.n, s1, s2, y, x))
    }

    /// Metric tensor `K0` on `(s1, s2)`: `(K0)^{ij}_{kl} = C^{ij} C_{kl}`.
    pub fn k0<S: FromRat>(&self, s1: Space, s2: Space) -> SpaceTensor<S> {
        let n = self.n;
        let mut t = SpaceTensor::zero(n, &[s1, s2]);
        for i in 0..n {
            for j in 0..n {
                if self.metric[i][j].is_zero() {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        let v = &self.metric[i][j] * &self.metric_lower[k][l];
                        if !v.is_zero() {
                            t.add_at(
                                &[(s1, (i as u8, k as u8)), (s2, (j as u8, l as u8))],
                                S::from_rat(&v),
                            );
                        }
                    }
                }
            }
        }
        t
    }

    /// Flip operator on `(s1, s2)`.
    pub fn p_flip<S: Ring>(&self, s1: Space, s2: Space) -> SpaceTensor<S> {
        perm_p(self.n, s1, s2)
    }

    /// Transpose-in-one-space conjugated by the metric:
    /// `tilde_s(T) = C_s T^{t_s} C^{-1}_s`.
    pub fn tilde_space<S: FromRat>(&self, t: &SpaceTensor<S>, s: Space) -> SpaceTensor<S> {
        let c = matrix_in_space::<S>(self.n, s, &self.metric);
        let cinv = matrix_in_space::<S>(self.n, s, &self.metric_lower_inverse());
        c.dot(&t.transpose(s)).dot(&cinv)
    }

    /// Same conjugation on a plain matrix: `X~ = C X^t C^{-1}`.
    pub fn tilde_mat(&self, x: &QMat) -> QMat {
        qmat_mul(
            &self.metric,
            &qmat_mul(&qmat_transpose(x), &self.metric_lower_inverse()),
        )
    }
}

/// `a ⊗ b` as an operator on `(s1, s2)`.
pub fn two_leg(n: usize, s1: Space, s2: Space, a: &QMat, b: &QMat) -> SpaceTensor<Rat> {
    let mut t = SpaceTensor::zero(n, &[s1, s2]);
    for i in 0..n {
        for j in 0..n {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    let v = &a[i][j] * &b[k][l];
                    if !v.is_zero() {
                        t.add_at(&[(s1, (i as u8, j as u8)), (s2, (k as u8, l as u8))], v);
                    }
                }
            }
        }
    }
    t
}

/// Classical Yang–Baxter defect
/// `C(r) = [r12, r13] + [r12, r23] + [r13, r23]` on spaces `(1, 2, 3)`.
pub fn cybe_defect(r12: &SpaceTensor<Rat>) -> SpaceTensor<Rat> {
    let spaces = r12.spaces();
    assert_eq!(spaces, &[1, 2], "defect expects r on spaces (1,2)");
    let r13 = r12.relabel(&[(2, 3)]);
    let r23 = r12.relabel(&[(1, 2), (2, 3)]);
    let comm = |a: &SpaceTensor<Rat>, b: &SpaceTensor<Rat>| a.dot(b).sub(&b.dot(a));
    comm(r12, &r13).add(&comm(r12, &r23)).add(&comm(&r13, &r23))
}

/// Is `t` invariant under the diagonal action of the Lie algebra?
/// Checks `[x_(s1) + ... + x_(sk), t] = 0` for every basis element `x`.
pub fn is_ad_invariant(g: &Group, t: &SpaceTensor<Rat>) -> bool {
    let spaces = t.spaces().to_vec();
    for x in g.basis() {
        let mut delta = SpaceTensor::zero(g.n, &spaces);
        for &s in &spaces {
            let xs = matrix_in_space::<Rat>(g.n, s, &x);
            delta = delta.add(&xs.dot(t).sub(&t.dot(&xs)));
        }
        if !delta.is_zero() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups() -> Vec<Group> {
        vec![
            Group::new(Family::Sp, 4).unwrap(),
            Group::new(Family::SO, 5).unwrap(),
            Group::new(Family::Sp, 6).unwrap(),
            Group::new(Family::SO, 6).unwrap(),
            Group::new(Family::SO, 7).unwrap(),
        ]
    }

    #[test]
    fn preconditions() {
        assert!(matches!(Group::new(Family::SO, 3), Err(GroupError::TooSmall(3))));
        assert!(matches!(Group::new(Family::Sp, 2), Err(GroupError::TooSmall(2))));
        assert!(matches!(Group::new(Family::Sp, 5), Err(GroupError::OddSymplectic(5))));
    }

    #[test]
    fn dimensions_match_closed_forms() {
        for g in groups() {
            assert_eq!(g.dim_lie(), g.expected_dim(), "{:?}({})", g.family, g.n);
            assert_eq!(g.positive.len(), g.negative.len());
            assert_eq!(
                g.cartan.len() + 2 * g.positive.len(),
                g.expected_dim()
            );
        }
    }

    #[test]
    fn metric_contraction_and_symmetry() {
        for g in groups() {
            let n = g.n;
            let eps = rint(g.eps());
            // C^{at} C_{bt} = eps δ^a_b  (sum over the *second* index of both)
            for a in 0..n {
                for b in 0..n {
                    let mut s = Rat::zero();
                    for t in 0..n {
                        s += &g.metric[a][t] * &g.metric_lower[b][t];
                    }
                    let expect = if a == b { eps.clone() } else { Rat::zero() };
                    assert_eq!(s, expect, "{:?}({}) at ({},{})", g.family, g.n, a, b);
                }
            }
            // C_{ij} = eps C_{ji}
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(g.metric_lower[i][j], &eps * &g.metric_lower[j][i]);
                }
            }
        }
    }

    #[test]
    fn basis_lies_in_algebra_and_closes() {
        for g in groups() {
            let basis = g.basis();
            for x in &basis {
                assert!(g.in_lie_algebra(x));
                assert!(qmat_trace(x).is_zero());
            }
            // closure of the bracket, spot-checked on all pairs
            let mut ech = Echelon::new();
            for x in &basis {
                ech.insert(&flatten(x));
            }
            for x in &basis {
                for y in &basis {
                    let c = qmat_commutator(x, y);
                    assert!(ech.contains(&flatten(&c)), "bracket escapes the span");
                    assert!(g.in_lie_algebra(&c));
                }
            }
            // Cartan commutes
            for h1 in &g.cartan {
                for h2 in &g.cartan {
                    assert!(qmat_is_zero(&qmat_commutator(h1, h2)));
                }
            }
        }
    }

    #[test]
    fn dual_basis_is_dual() {
        for g in groups() {
            let b = g.basis();
            let d = g.dual_basis();
            for (i, x) in b.iter().enumerate() {
                for (j, y) in d.iter().enumerate() {
                    let expect = if i == j { Rat::one() } else { Rat::zero() };
                    assert_eq!(trace_pair(x, y), expect);
                }
            }
        }
    }

    #[test]
    fn casimir_is_ad_invariant() {
        for g in groups() {
            let t = g.casimir(1, 2);
            assert!(is_ad_invariant(&g, &t), "{:?}({})", g.family, g.n);
        }
    }

    #[test]
    fn standard_r_is_skew_with_ad_invariant_defect() {
        for g in groups() {
            let r = g.standard_r(1, 2);
            let r21 = r.relabel(&[(1, 2), (2, 1)]);
            assert!(r.add(&r21).is_zero(), "not skew for {:?}({})", g.family, g.n);
            let defect = cybe_defect(&r);
            assert!(!defect.is_zero(), "defect should not vanish");
            assert!(is_ad_invariant(&g, &defect), "{:?}({})", g.family, g.n);
        }
    }

    #[test]
    fn abelian_r_satisfies_cybe() {
        for g in groups() {
            let r = g.abelian_r(1, 2);
            let r21 = r.relabel(&[(1, 2), (2, 1)]);
            assert!(r.add(&r21).is_zero());
            assert!(cybe_defect(&r).is_zero(), "{:?}({})", g.family, g.n);
        }
    }

    #[test]
    fn metric_tensor_identities() {
        for g in groups() {
            let n = g.n;
            let eps = rint(g.eps());
            let k0 = g.k0::<Rat>(1, 2);
            let p = g.p_flip::<Rat>(1, 2);
            // K0 P = P K0 = eps K0
            assert_eq!(k0.dot(&p), k0.scale(&eps));
            assert_eq!(p.dot(&k0), k0.scale(&eps));
            // K0 K0 = eps N K0
            assert_eq!(k0.dot(&k0), k0.scale(&(eps.clone() * rint(n as i64))));
            // Tr_2 K0 = eps I
            let tr2 = k0.partial_trace(2);
            assert_eq!(tr2, SpaceTensor::<Rat>::identity(n, &[1]).scale(&eps));
            // tilde in one space exchanges P and K0 up to eps
            assert_eq!(g.tilde_space(&p, 1), k0.scale(&eps));
            assert_eq!(g.tilde_space(&k0, 1), p.scale(&eps));
            // tilde is an involution on these tensors
            assert_eq!(g.tilde_space(&g.tilde_space(&k0, 1), 1), k0);
        }
    }

    #[test]
    fn tilde_mat_is_antihomomorphism_on_products() {
        // (XY)~ = Y~ X~ for plain matrices
        for g in groups() {
            let x = &g.positive[0];
            let y = &g.negative[g.negative.len() - 1];
            let lhs = g.tilde_mat(&qmat_mul(x, y));
            let rhs = qmat_mul(&g.tilde_mat(y), &g.tilde_mat(x));
            assert_eq!(lhs, rhs);
            // and on the Lie algebra it is minus the identity
            assert_eq!(g.tilde_mat(x), qmat_scale(x, &rint(-1)));
        }
    }
}
