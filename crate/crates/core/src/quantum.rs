//! Braid-form R-matrices for the orthogonal and symplectic quantum groups,
//! their spectral projectors, and the quadratic exchange-relation candidates
//! on the matrix of one-form generators.
//!
//! All matrix entries live in [`LaurentQ`] (Laurent polynomials in
//! `s = q^(1/2)`), so every structural identity is checked symbolically, not
//! at samples.  Standard references disagree on a handful of sign and
//! ordering conventions in the explicit R-matrix (the weight-vector sign in
//! the lowering correction, the weight sign in the quantum metric, the leg
//! order of the rank-one correction).  Rather than trusting any one
//! transcription, [`build_rmatrix`] enumerates the candidate conventions in a
//! fixed order and accepts exactly the first assembly that passes the full
//! validation suite — braid relation, quadratic/cubic characteristic
//! identities, singlet eigenvalue equations, classical limit, and the
//! projector algebra.  Every downstream computation uses only those verified
//! identities, so any surviving convention choice is equivalent for our
//! purposes; the accepted choice is recorded on the result.
//!
//! The second half of the module turns quadratic exchange relations such as
//! `Q⁺ Ω₂ R̂ Ω₂ Q⁺ = 0` into explicit coefficient rows over the `N⁴` ordered
//! two-letter words `Ω^a_b Ω^c_d`, and compares the row spans of competing
//! relation families at nondegenerate evaluation points, both over `Q` and
//! over two fixed 62-bit prime fields.

use crate::group::{Family, Group, GroupError};
use crate::laurent::LaurentQ;
use crate::linalg::{rank_of, Field, SparseVec};
use crate::modp::{rat_to_fp, Fp};
use crate::ring::{rint, Rat, Ring};
use crate::tensor::{perm_p, Space, SpaceTensor};
use std::collections::BTreeMap;

/// Twice the half-sum-of-roots weight vector in the defining representation,
/// as integers (`rho2[i] = 2 ρ_i`, so `q^{ρ_i} = s^{rho2[i]}`).
///
/// Orthogonal series: `ρ = (N/2−1, …, 1/2, 0, −1/2, …, 1−N/2)` (middle zero
/// for odd `N`).  Symplectic series: `ρ = (N/2, …, 1, −1, …, −N/2)`.
/// Both are antisymmetric under `i -> N−1−i`.
pub fn rho_numerators(family: Family, n: usize) -> Vec<i64> {
    let nn = n as i64;
    (1..=nn)
        .map(|i| match family {
            Family::SO => {
                use std::cmp::Ordering::*;
                match (2 * i).cmp(&(nn + 1)) {
                    Less => nn - 2 * i,
                    Equal => 0,
                    Greater => nn - 2 * i + 2,
                }
            }
            Family::Sp => {
                if i <= nn / 2 {
                    nn - 2 * i + 2
                } else {
                    nn - 2 * i
                }
            }
        })
        .collect()
}

/// Signature vector of the invariant metric (`+1` throughout for the
/// orthogonal series, `(+1…+1, −1…−1)` for the symplectic one), matching the
/// classical metric stored on [`Group`].
fn eps_vec(g: &Group) -> Vec<i64> {
    (0..g.n)
        .map(|i| match g.family {
            Family::SO => 1,
            Family::Sp => {
                if i < g.n / 2 {
                    1
                } else {
                    -1
                }
            }
        })
        .collect()
}

/// One convention choice for assembling the R-matrix and quantum metric.
///
/// The explicit entries of the R-matrix appear in the literature with
/// inconsistent sign/ordering conventions; these three switches cover the
/// variants.  The identities verified by [`build_rmatrix`] pin the physical
/// content, so whichever variant validates first is "the" R-matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Calibration {
    /// Sign on the weight vector inside the lowering correction of R.
    pub weight_sign_r: i8,
    /// Sign on the weight vector inside the quantum metric.
    pub weight_sign_metric: i8,
    /// Leg order of the rank-one correction term: `false` pairs `e_ij` with
    /// `e_{i'j'}`, `true` pairs it with `e_{j'i'}`.
    pub correction_transposed: bool,
}

/// All candidate conventions, in the deterministic order in which
/// [`build_rmatrix`] tries them.
pub const CALIBRATIONS: [Calibration; 8] = {
    let mut out = [Calibration {
        weight_sign_r: 1,
        weight_sign_metric: 1,
        correction_transposed: false,
    }; 8];
    let mut i = 0;
    while i < 8 {
        out[i] = Calibration {
            weight_sign_r: if i & 4 == 0 { 1 } else { -1 },
            weight_sign_metric: if i & 2 == 0 { 1 } else { -1 },
            correction_transposed: i & 1 != 0,
        };
        i += 1;
    }
    out
};

/// A validated braid-form R-matrix with its metric projector data, all on
/// the fixed space pair `(1, 2)`.
#[derive(Clone, Debug)]
pub struct RMatrixData {
    pub group: Group,
    /// Braid form `R̂ = P·R`: symmetric-group action composed with the
    /// exchange matrix.
    pub rhat: SpaceTensor<LaurentQ>,
    /// Rank-one metric tensor `K^{ab}_{cd} = Cq^{ab} (Cq^{-1})_{cd}`, which
    /// obeys `K² = μK` and spans the image of the singlet projector.
    pub k: SpaceTensor<LaurentQ>,
    /// Upper quantum metric (anti-diagonal `ε_i q^{±ρ_i}`).
    pub cq: Vec<Vec<LaurentQ>>,
    /// Matrix inverse of `cq`.
    pub cq_inv: Vec<Vec<LaurentQ>>,
    /// Eigenvalue of `R̂` on the metric singlet: `ν = ε q^{ε−N}`.
    pub nu: LaurentQ,
    /// Singlet normalization: `K² = μK`, `μ = 1 + ε[N−ε]_q`.
    pub mu: LaurentQ,
    /// `λ = q − q^{-1}`.
    pub lambda: LaurentQ,
    /// Cleared singlet weights `μ̄± = μ·μ± = −(q^{∓1} ± ν)`.
    pub mu_bar_plus: LaurentQ,
    pub mu_bar_minus: LaurentQ,
    /// Denominator-free spectral projectors `Q± = (q+q^{-1})·μ·P±`, i.e.
    /// `Q± = μ(±R̂ + q^{∓1}I) − (q^{∓1} ± ν)K`.  They satisfy
    /// `Q±² = (q+q^{-1})μ·Q±`, annihilate each other and `K`, and
    /// `Q⁺ + Q⁻ + (q+q^{-1})K = (q+q^{-1})μ·I`.
    pub q_plus: SpaceTensor<LaurentQ>,
    pub q_minus: SpaceTensor<LaurentQ>,
    /// The accepted assembly convention.
    pub calibration: Calibration,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RMatrixError {
    Group(GroupError),
    /// No assembly convention passed validation; one rejection reason per
    /// attempted calibration.
    Calibration(Vec<String>),
}

impl std::fmt::Display for RMatrixError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RMatrixError::Group(e) => write!(f, "{e:?}"),
            RMatrixError::Calibration(rs) => {
                write!(f, "no R-matrix convention validated: {}", rs.join("; "))
            }
        }
    }
}

/// Assemble the R-matrix for one convention choice (no validation).
fn assemble(group: &Group, cal: Calibration) -> RMatrixData {
    let n = group.n;
    let eps = group.eps();
    let epsv = eps_vec(group);
    let rho2 = rho_numerators(group.family, n);
    let prime = |i: usize| n - 1 - i;
    let lambda = LaurentQ::lambda();

    // Exchange matrix R on spaces (1,2):
    //   R = Σ_{i,j} q^{δ_ij − δ_{i,j'}} e_ii⊗e_jj
    //     + λ Σ_{i>j} e_ij⊗e_ji
    //     − λ Σ_{i>j} q^{±(ρ_i−ρ_j)} ε_i ε_j e_ij⊗e_{i'j'}   (leg order per cal)
    let mut r = SpaceTensor::zero(n, &[1, 2]);
    for i in 0..n {
        for j in 0..n {
            let mut e = 0i64;
            if i == j {
                e += 2; // q^{+1} in s-units
            }
            if j == prime(i) {
                e -= 2;
            }
            r.add_at(
                &[(1, (i as u8, i as u8)), (2, (j as u8, j as u8))],
                LaurentQ::s_pow(e),
            );
        }
    }
    for i in 0..n {
        for j in 0..i {
            r.add_at(
                &[(1, (i as u8, j as u8)), (2, (j as u8, i as u8))],
                lambda.clone(),
            );
            let w = cal.weight_sign_r as i64 * (rho2[i] - rho2[j]);
            let c = lambda.scale(&rint(-epsv[i] * epsv[j])).shift(w);
            let legs = if cal.correction_transposed {
                (prime(j) as u8, prime(i) as u8)
            } else {
                (prime(i) as u8, prime(j) as u8)
            };
            r.add_at(&[(1, (i as u8, j as u8)), (2, legs)], c);
        }
    }
    let rhat = perm_p::<LaurentQ>(n, 1, 2).dot(&r);

    // Quantum metric: anti-diagonal, entries ε_i q^{±ρ_i}; the inverse is
    // again anti-diagonal with the conjugate weights.
    let sgn = cal.weight_sign_metric as i64;
    let mut cq = vec![vec![LaurentQ::zero(); n]; n];
    let mut cq_inv = vec![vec![LaurentQ::zero(); n]; n];
    for i in 0..n {
        cq[i][prime(i)] = LaurentQ::term(rint(epsv[i]), sgn * rho2[i]);
        cq_inv[i][prime(i)] = LaurentQ::term(rint(epsv[prime(i)]), sgn * rho2[i]);
    }
    debug_assert!({
        let mut ok = true;
        for a in 0..n {
            for b in 0..n {
                let mut acc = LaurentQ::zero();
                for t in 0..n {
                    acc = acc.add(&cq[a][t].mul(&cq_inv[t][b]));
                }
                let want = if a == b { LaurentQ::one() } else { LaurentQ::zero() };
                ok &= acc == want;
            }
        }
        ok
    });

    let mut k = SpaceTensor::zero(n, &[1, 2]);
    for i in 0..n {
        for j in 0..n {
            if cq[i][j].is_zero() {
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    if cq_inv[a][b].is_zero() {
                        continue;
                    }
                    // K^{ij}_{ab}: row pair (i,j), column pair (a,b).
                    k.add_at(
                        &[(1, (i as u8, a as u8)), (2, (j as u8, b as u8))],
                        cq[i][j].mul(&cq_inv[a][b]),
                    );
                }
            }
        }
    }

    let nn = n as i64;
    let nu = LaurentQ::term(rint(eps), 2 * (eps - nn));
    let mu = LaurentQ::one().add(&LaurentQ::q_int(nn - eps).scale(&rint(eps)));
    let q1 = LaurentQ::q_pow(1);
    let qm1 = LaurentQ::q_pow(-1);
    let mu_bar_plus = qm1.add(&nu).neg();
    let mu_bar_minus = q1.sub(&nu).neg();
    let ident = SpaceTensor::<LaurentQ>::identity(n, &[1, 2]);
    let q_plus = rhat
        .scale(&mu)
        .add(&ident.scale(&mu.mul(&qm1)))
        .add(&k.scale(&mu_bar_plus));
    let q_minus = rhat
        .scale(&mu)
        .neg()
        .add(&ident.scale(&mu.mul(&q1)))
        .add(&k.scale(&mu_bar_minus));

    RMatrixData {
        group: group.clone(),
        rhat,
        k,
        cq,
        cq_inv,
        nu,
        mu,
        lambda,
        mu_bar_plus,
        mu_bar_minus,
        q_plus,
        q_minus,
        calibration: cal,
    }
}

impl RMatrixData {
    pub fn n(&self) -> usize {
        self.group.n
    }

    fn ident(&self) -> SpaceTensor<LaurentQ> {
        SpaceTensor::identity(self.group.n, &[1, 2])
    }

    /// `q + q^{-1}`, the common projector denominator.
    pub fn qq(&self) -> LaurentQ {
        LaurentQ::q_pow(1).add(&LaurentQ::q_pow(-1))
    }

    /// The scalar `(q+q^{-1})·μ` relating the cleared projectors to the
    /// genuine idempotents: `P± = Q± / norm`.
    pub fn norm(&self) -> LaurentQ {
        self.qq().mul(&self.mu)
    }

    /// Specialize every tensor entry at `s = s0` (so `q = s0²`).
    pub fn eval_tensor(t: &SpaceTensor<LaurentQ>, s0: &Rat) -> SpaceTensor<Rat> {
        t.map(|c| c.eval_s(s0))
    }

    /// A sample is admissible when the spectral decomposition stays
    /// nondegenerate there: `s ≠ 0` and none of `λ`, `q+q^{-1}`, `μ`
    /// vanish (collapsing eigenvalues or a vanishing singlet norm).
    pub fn admissible_sample(&self, s0: &Rat) -> bool {
        !s0.is_zero()
            && !self.lambda.eval_s(s0).is_zero()
            && !self.qq().eval_s(s0).is_zero()
            && !self.mu.eval_s(s0).is_zero()
    }

    fn admissible_sample_fp<const P: u64>(&self, s0: Fp<P>) -> bool {
        !s0.is_zero()
            && !self.lambda.eval_s_fp(s0).is_zero()
            && !self.qq().eval_s_fp(s0).is_zero()
            && !self.mu.eval_s_fp(s0).is_zero()
    }
}

/// Run the full identity suite against an assembled candidate; `Err` names
/// the first failing identity.
fn validate(d: &RMatrixData) -> Result<(), String> {
    let n = d.group.n;
    let ident = d.ident();
    let fail = |what: &str| Err(what.to_string());

    // Singlet algebra.
    if d.k.dot(&d.k) != d.k.scale(&d.mu) {
        return fail("K^2 = mu K");
    }
    if d.rhat.dot(&d.k) != d.k.scale(&d.nu) {
        return fail("Rhat K = nu K");
    }
    if d.k.dot(&d.rhat) != d.k.scale(&d.nu) {
        return fail("K Rhat = nu K");
    }

    // Quadratic characteristic identity and the explicit inverse.
    let quad = d
        .rhat
        .dot(&d.rhat)
        .sub(&d.rhat.scale(&d.lambda))
        .sub(&ident)
        .add(&d.k.scale(&d.lambda.mul(&d.nu)));
    if !quad.is_zero() {
        return fail("Rhat^2 - lambda Rhat - I + lambda nu K = 0");
    }
    let rinv = d.rhat.sub(&ident.sub(&d.k).scale(&d.lambda));
    if d.rhat.dot(&rinv) != ident || rinv.dot(&d.rhat) != ident {
        return fail("Rhat (Rhat - lambda(I-K)) = I");
    }

    // Cubic characteristic identity: eigenvalues q, -q^{-1}, nu.
    let m1 = d.rhat.sub(&ident.scale(&LaurentQ::q_pow(1)));
    let m2 = d.rhat.add(&ident.scale(&LaurentQ::q_pow(-1)));
    let m3 = d.rhat.sub(&ident.scale(&d.nu));
    if !m1.dot(&m2).dot(&m3).is_zero() {
        return fail("(Rhat - q)(Rhat + 1/q)(Rhat - nu) = 0");
    }

    // Classical limit.
    let one = Rat::one();
    if RMatrixData::eval_tensor(&d.rhat, &one) != perm_p::<Rat>(n, 1, 2) {
        return fail("Rhat|q=1 = P");
    }
    if RMatrixData::eval_tensor(&d.k, &one) != d.group.k0::<Rat>(1, 2) {
        return fail("K|q=1 = classical K");
    }

    // Projector algebra in cleared form.
    let norm = d.norm();
    if d.q_plus.dot(&d.q_plus) != d.q_plus.scale(&norm) {
        return fail("Q+^2 = (q+1/q) mu Q+");
    }
    if d.q_minus.dot(&d.q_minus) != d.q_minus.scale(&norm) {
        return fail("Q-^2 = (q+1/q) mu Q-");
    }
    if !d.q_plus.dot(&d.q_minus).is_zero() || !d.q_minus.dot(&d.q_plus).is_zero() {
        return fail("Q+ Q- = Q- Q+ = 0");
    }
    if !d.q_plus.dot(&d.k).is_zero()
        || !d.k.dot(&d.q_plus).is_zero()
        || !d.q_minus.dot(&d.k).is_zero()
        || !d.k.dot(&d.q_minus).is_zero()
    {
        return fail("Q± K = K Q± = 0");
    }
    let complete = d
        .q_plus
        .add(&d.q_minus)
        .add(&d.k.scale(&d.qq()))
        .sub(&ident.scale(&norm));
    if !complete.is_zero() {
        return fail("Q+ + Q- + (q+1/q)K = (q+1/q) mu I");
    }
    let spectral = d
        .q_plus
        .scale(&LaurentQ::q_pow(1))
        .sub(&d.q_minus.scale(&LaurentQ::q_pow(-1)))
        .add(&d.k.scale(&d.qq().mul(&d.nu)))
        .sub(&d.rhat.scale(&norm));
    if !spectral.is_zero() {
        return fail("(q+1/q) mu Rhat = q Q+ - 1/q Q- + (q+1/q) nu K");
    }

    // Braid relation on three spaces.
    let r12 = &d.rhat;
    let r23 = d.rhat.relabel(&[(1, 2), (2, 3)]);
    if r12.dot(&r23).dot(r12) != r23.dot(r12).dot(&r23) {
        return fail("braid relation");
    }

    Ok(())
}

/// Assemble and validate the R-matrix for the given series, trying the
/// candidate conventions in the fixed [`CALIBRATIONS`] order and returning
/// the first one that passes every identity.
pub fn build_rmatrix(family: Family, n: usize) -> Result<RMatrixData, RMatrixError> {
    let group = Group::new(family, n).map_err(RMatrixError::Group)?;
    let mut rejections = Vec::new();
    for cal in CALIBRATIONS {
        let data = assemble(&group, cal);
        match validate(&data) {
            Ok(()) => return Ok(data),
            Err(e) => rejections.push(format!("{cal:?}: failed {e}")),
        }
    }
    Err(RMatrixError::Calibration(rejections))
}

/// Projector-suite report: re-verifies the spectral algebra and computes the
/// exact ranks of the three projectors from their traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectorReport {
    pub idempotent: bool,
    pub orthogonal: bool,
    pub complete: bool,
    /// Cleared weight identities: `μ̄₊ + μ̄₋ = −(q+q^{-1})` and
    /// `qμ̄₊ − q^{-1}μ̄₋ = −ν(q+q^{-1})`.
    pub weight_sum: bool,
    pub weight_difference: bool,
    /// Exact ranks `(sym, asym, singlet)` read off the projector traces.
    pub ranks: (i64, i64, i64),
}

impl ProjectorReport {
    pub fn pass(&self) -> bool {
        self.idempotent && self.orthogonal && self.complete && self.weight_sum && self.weight_difference
    }
}

/// Expected projector ranks from classical representation theory of the
/// defining tensor square: the traceless symmetric / antisymmetric parts and
/// the metric singlet.
pub fn classical_ranks(family: Family, n: usize) -> (i64, i64, i64) {
    let nn = n as i64;
    match family {
        Family::SO => (nn * (nn + 1) / 2 - 1, nn * (nn - 1) / 2, 1),
        Family::Sp => (nn * (nn + 1) / 2, nn * (nn - 1) / 2 - 1, 1),
    }
}

/// Trace of a projector given in cleared form `Q = norm·P`: the trace of an
/// idempotent equals its rank, so `tr Q / norm` must be a constant integer.
fn cleared_rank(q: &SpaceTensor<LaurentQ>, norm: &LaurentQ) -> Option<i64> {
    let t = q.trace_all().div_exact(norm)?;
    let c = t.eval_s(&Rat::one());
    if t != LaurentQ::constant(c.clone()) || !c.is_integer() {
        return None;
    }
    use num_traits::ToPrimitive;
    c.to_integer().to_i64()
}

pub fn projector_suite(d: &RMatrixData) -> ProjectorReport {
    let norm = d.norm();
    let idempotent = d.q_plus.dot(&d.q_plus) == d.q_plus.scale(&norm)
        && d.q_minus.dot(&d.q_minus) == d.q_minus.scale(&norm)
        && d.k.dot(&d.k) == d.k.scale(&d.mu);
    let orthogonal = d.q_plus.dot(&d.q_minus).is_zero()
        && d.q_minus.dot(&d.q_plus).is_zero()
        && d.q_plus.dot(&d.k).is_zero()
        && d.k.dot(&d.q_plus).is_zero()
        && d.q_minus.dot(&d.k).is_zero()
        && d.k.dot(&d.q_minus).is_zero();
    let complete = d
        .q_plus
        .add(&d.q_minus)
        .add(&d.k.scale(&d.qq()))
        .sub(&d.ident().scale(&norm))
        .is_zero();
    let weight_sum = d.mu_bar_plus.add(&d.mu_bar_minus) == d.qq().neg();
    let weight_difference = d
        .mu_bar_plus
        .mul(&LaurentQ::q_pow(1))
        .sub(&d.mu_bar_minus.mul(&LaurentQ::q_pow(-1)))
        == d.qq().mul(&d.nu).neg();
    let rank_plus = cleared_rank(&d.q_plus, &norm).expect("sym projector trace must be integral");
    let rank_minus = cleared_rank(&d.q_minus, &norm).expect("asym projector trace must be integral");
    let rank_singlet = cleared_rank(&d.k, &d.mu).expect("singlet trace must be integral");
    ProjectorReport {
        idempotent,
        orthogonal,
        complete,
        weight_sum,
        weight_difference,
        ranks: (rank_plus, rank_minus, rank_singlet),
    }
}

// ---------------------------------------------------------------------------
// Word calculus: quadratic relations as rows over ordered two-letter words.
// ---------------------------------------------------------------------------

/// Copies the row/column pair of matrix space `s` onto bookkeeping space
/// `tag`: entries `[(s,(a,b)),(tag,(a,b))] = 1`.
///
/// Multiplying a two-space operator chain by this tensor at the position of
/// a generator-matrix factor records that factor's (row, column) label on
/// the `tag` space while composing matrix indices exactly as the factor
/// `I ⊗ Ω` would: the contracted index `a` is the generator's row, the free
/// column `b` is passed on to the next factor.
pub fn tag_copy<S: Ring>(n: usize, s: Space, tag: Space) -> SpaceTensor<S> {
    let mut t = SpaceTensor::zero(n, &[s, tag]);
    for a in 0..n as u8 {
        for b in 0..n as u8 {
            t.add_at(&[(s, (a, b)), (tag, (a, b))], S::one());
        }
    }
    t
}

/// Column index of the ordered word `Ω^a_b Ω^c_d` in the `N⁴`-dimensional
/// degree-2 word space.
pub fn word_column(n: usize, first: (u8, u8), second: (u8, u8)) -> u32 {
    let n = n as u32;
    let w1 = first.0 as u32 * n + first.1 as u32;
    let w2 = second.0 as u32 * n + second.1 as u32;
    w1 * n * n + w2
}

/// One scalar relation: the coefficient row of `Σ c_w · word_w = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationRow {
    /// Which sandwich produced the row.
    pub source: &'static str,
    /// Matrix slot `((i1,j1),(i2,j2))` of the tensor equation the row is the
    /// component of.
    pub slot: ((u8, u8), (u8, u8)),
    /// Sparse word coefficients, sorted by column.
    pub terms: Vec<(u32, LaurentQ)>,
}

/// A family of quadratic relations over the degree-2 word space.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationSet {
    pub label: &'static str,
    pub n: usize,
    pub rows: Vec<RelationRow>,
}

impl RelationSet {
    pub fn word_dim(&self) -> usize {
        self.n.pow(4)
    }

    /// Rows evaluated at `s = s0` as sparse rational vectors (zero rows are
    /// dropped; they carry no span information).
    pub fn eval_rat(&self, s0: &Rat) -> Vec<SparseVec<Rat>> {
        self.rows
            .iter()
            .filter_map(|row| {
                let ent: Vec<(u32, Rat)> = row
                    .terms
                    .iter()
                    .filter_map(|(c, v)| {
                        let x = v.eval_s(s0);
                        (!x.is_zero()).then_some((*c, x))
                    })
                    .collect();
                (!ent.is_empty()).then(|| SparseVec::from_entries(ent))
            })
            .collect()
    }

    /// Rows evaluated at `s = s0` over the prime field `F_P`.
    pub fn eval_fp<const P: u64>(&self, s0: Fp<P>) -> Vec<SparseVec<Fp<P>>> {
        self.rows
            .iter()
            .filter_map(|row| {
                let ent: Vec<(u32, Fp<P>)> = row
                    .terms
                    .iter()
                    .filter_map(|(c, v)| {
                        let x = v.eval_s_fp(s0);
                        (!x.is_zero()).then_some((*c, x))
                    })
                    .collect();
                (!ent.is_empty()).then(|| SparseVec::from_entries(ent))
            })
            .collect()
    }

    /// Plain-text export, one relation per line:
    /// `label[source]((i1,j1),(i2,j2)): ((a,b),(c,d)) -> coeff; ...`.
    pub fn export(&self) -> String {
        use std::fmt::Write;
        let n = self.n as u32;
        let mut out = String::new();
        for row in &self.rows {
            let ((a, b), (c, d)) = row.slot;
            write!(out, "{}[{}](({a},{b}),({c},{d})):", self.label, row.source).unwrap();
            let mut first = true;
            for (col, v) in &row.terms {
                let w2 = col % (n * n);
                let w1 = col / (n * n);
                write!(
                    out,
                    "{} (({},{}),({},{})) -> {v}",
                    if first { "" } else { ";" },
                    w1 / n,
                    w1 % n,
                    w2 / n,
                    w2 % n
                )
                .unwrap();
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

/// Extract per-slot coefficient rows from a four-space word tensor
/// (matrix spaces 1,2; word label spaces 3,4).
fn rows_from_tensor(source: &'static str, n: usize, t: &SpaceTensor<LaurentQ>) -> Vec<RelationRow> {
    assert_eq!(t.spaces(), &[1, 2, 3, 4]);
    let mut bucket: BTreeMap<((u8, u8), (u8, u8)), Vec<(u32, LaurentQ)>> = BTreeMap::new();
    for (key, v) in t.iter() {
        if v.is_zero() {
            continue;
        }
        let slot = (key[0], key[1]);
        let col = word_column(n, key[2], key[3]);
        bucket.entry(slot).or_default().push((col, v.clone()));
    }
    bucket
        .into_iter()
        .map(|(slot, terms)| RelationRow { source, slot, terms })
        .collect()
}

impl RMatrixData {
    /// Middle block of the word pattern `L·Ω₂·R̂·Ω₂·R`: spaces 3 and 4
    /// record the generator labels of the first and second letter.
    fn word_core(&self) -> SpaceTensor<LaurentQ> {
        let n = self.group.n;
        tag_copy::<LaurentQ>(n, 2, 3)
            .dot(&self.rhat)
            .dot(&tag_copy::<LaurentQ>(n, 2, 4))
    }

    /// The diagonal projector relations: each spectral projector sandwiched
    /// on both sides of the exchange pattern (`Q⁺…Q⁺`, `Q⁻…Q⁻`, `K…K`).
    pub fn relations_diagonal(&self) -> RelationSet {
        let core = self.word_core();
        let n = self.group.n;
        let mut rows = Vec::new();
        rows.extend(rows_from_tensor(
            "sym-sym",
            n,
            &self.q_plus.dot(&core).dot(&self.q_plus),
        ));
        rows.extend(rows_from_tensor(
            "asym-asym",
            n,
            &self.q_minus.dot(&core).dot(&self.q_minus),
        ));
        rows.extend(rows_from_tensor(
            "singlet-singlet",
            n,
            &self.k.dot(&core).dot(&self.k),
        ));
        RelationSet { label: "diagonal", n, rows }
    }

    /// The mixed singlet/symmetric sandwiches (`K…Q⁺` and `Q⁺…K`), imposed
    /// in addition to the diagonal family by the alternative calculus.
    pub fn relations_cross(&self) -> RelationSet {
        let core = self.word_core();
        let n = self.group.n;
        let mut rows = Vec::new();
        rows.extend(rows_from_tensor(
            "singlet-sym",
            n,
            &self.k.dot(&core).dot(&self.q_plus),
        ));
        rows.extend(rows_from_tensor(
            "sym-singlet",
            n,
            &self.q_plus.dot(&core).dot(&self.k),
        ));
        RelationSet { label: "cross", n, rows }
    }

    /// The single tensor relation equivalent to the diagonal family:
    /// `μ(R̂ W R̂ + W) − (K W + W K) − ν(K W R̂ + R̂ W K) = 0`
    /// where `W = Ω₂ R̂ Ω₂` (cleared of the `1/μ` denominators).
    pub fn relations_combined(&self) -> RelationSet {
        let core = self.word_core();
        let n = self.group.n;
        let ident = self.ident();
        let u = self
            .rhat
            .dot(&core)
            .dot(&self.rhat)
            .add(&ident.dot(&core).dot(&ident))
            .scale(&self.mu)
            .sub(&self.k.dot(&core).dot(&ident))
            .sub(&ident.dot(&core).dot(&self.k))
            .sub(
                &self
                    .k
                    .dot(&core)
                    .dot(&self.rhat)
                    .add(&self.rhat.dot(&core).dot(&self.k))
                    .scale(&self.nu),
            );
        RelationSet {
            label: "combined",
            n,
            rows: rows_from_tensor("combined", n, &u),
        }
    }

    /// The alternative single relation (equivalent to combined ∪ cross):
    /// `μ(R̂ W R̂ + W) + (νq^{-1} − 1)(K W + W K) = 0`.
    pub fn relations_alternative(&self) -> RelationSet {
        let core = self.word_core();
        let n = self.group.n;
        let ident = self.ident();
        let coef = self.nu.mul(&LaurentQ::q_pow(-1)).sub(&LaurentQ::one());
        let v = self
            .rhat
            .dot(&core)
            .dot(&self.rhat)
            .add(&ident.dot(&core).dot(&ident))
            .scale(&self.mu)
            .add(
                &self
                    .k
                    .dot(&core)
                    .dot(&ident)
                    .add(&ident.dot(&core).dot(&self.k))
                    .scale(&coef),
            );
        RelationSet {
            label: "alternative",
            n,
            rows: rows_from_tensor("alternative", n, &v),
        }
    }

    /// Symbolic check that the weighted combination of the three diagonal
    /// sandwiches reproduces the combined relation tensor:
    /// `q·Q⁺WQ⁺ + q^{-1}·Q⁻WQ⁻ − (qμ̄₊² + q^{-1}μ̄₋²)·KWK = (q+q^{-1})μ·U`.
    ///
    /// Note the singlet sandwich enters in its rank-one form `KWK`; written
    /// with the idempotent normalization `P⁰WP⁰` instead, its weight picks
    /// up an extra factor `μ²` (since `KWK = μ²·P⁰WP⁰`), which is easy to
    /// drop when quoting the identity.  The form checked here is the one
    /// that holds exactly, as one sees by expanding both sides over the
    /// spectral blocks `P^A W P^B`.
    pub fn combination_reproduces_combined(&self) -> Result<(), String> {
        let core = self.word_core();
        let ident = self.ident();
        let q1 = LaurentQ::q_pow(1);
        let qm1 = LaurentQ::q_pow(-1);
        let lhs = self
            .q_plus
            .dot(&core)
            .dot(&self.q_plus)
            .scale(&q1)
            .add(&self.q_minus.dot(&core).dot(&self.q_minus).scale(&qm1))
            .sub(&self.k.dot(&core).dot(&self.k).scale(
                &self
                    .mu_bar_plus
                    .mul(&self.mu_bar_plus)
                    .mul(&q1)
                    .add(&self.mu_bar_minus.mul(&self.mu_bar_minus).mul(&qm1)),
            ));
        let u = self
            .rhat
            .dot(&core)
            .dot(&self.rhat)
            .add(&ident.dot(&core).dot(&ident))
            .scale(&self.mu)
            .sub(&self.k.dot(&core).dot(&ident))
            .sub(&ident.dot(&core).dot(&self.k))
            .sub(
                &self
                    .k
                    .dot(&core)
                    .dot(&self.rhat)
                    .add(&self.rhat.dot(&core).dot(&self.k))
                    .scale(&self.nu),
            );
        let scale = self.qq().mul(&self.mu);
        let diff = lhs.sub(&u.scale(&scale));
        if diff.is_zero() {
            Ok(())
        } else {
            Err(format!(
                "combination differs from the combined relation in {} entries",
                diff.num_entries()
            ))
        }
    }
}

// ---------------------------------------------------------------------------
// Span comparison at evaluation samples.
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanCheck {
    /// Human-readable evaluation context (sample and field).
    pub context: String,
    pub rank_a: usize,
    pub rank_b: usize,
    pub rank_union: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanReport {
    pub checks: Vec<SpanCheck>,
    /// Row spans agree (`rank A = rank B = rank(A∪B)`) at every probe.
    pub equal: bool,
    /// All probes produced the same rank triple.
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleError {
    /// Fewer than two distinct admissible samples were supplied.
    TooFew,
    /// The sample degenerates the spectral decomposition.
    Degenerate(Rat),
}

impl std::fmt::Display for SampleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SampleError::TooFew => write!(f, "need at least two distinct admissible samples"),
            SampleError::Degenerate(s) => write!(f, "degenerate sample s = {s}"),
        }
    }
}

fn ranks_of<F: Field>(a: &[SparseVec<F>], b: &[SparseVec<F>]) -> (usize, usize, usize) {
    let union: Vec<SparseVec<F>> = a.iter().chain(b.iter()).cloned().collect();
    (rank_of(a), rank_of(b), rank_of(&union))
}

/// Compare the row spans of two relation families at each admissible sample,
/// over `Q` and over the two fixed prime fields.
pub fn compare_spans(
    d: &RMatrixData,
    a: &RelationSet,
    b: &RelationSet,
    s_samples: &[Rat],
) -> Result<SpanReport, SampleError> {
    let mut distinct = s_samples.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(SampleError::TooFew);
    }
    let mut checks = Vec::new();
    for s0 in &distinct {
        if !d.admissible_sample(s0) {
            return Err(SampleError::Degenerate(s0.clone()));
        }
        let (ra, rb, ru) = ranks_of(&a.eval_rat(s0), &b.eval_rat(s0));
        checks.push(SpanCheck {
            context: format!("s={s0} over Q"),
            rank_a: ra,
            rank_b: rb,
            rank_union: ru,
        });
        macro_rules! fp_check {
            ($p:expr) => {{
                let sp = rat_to_fp::<$p>(s0);
                if !d.admissible_sample_fp::<$p>(sp) {
                    return Err(SampleError::Degenerate(s0.clone()));
                }
                let (ra, rb, ru) = ranks_of(&a.eval_fp::<$p>(sp), &b.eval_fp::<$p>(sp));
                checks.push(SpanCheck {
                    context: format!("s={s0} mod {}", $p),
                    rank_a: ra,
                    rank_b: rb,
                    rank_union: ru,
                });
            }};
        }
        fp_check!({ crate::modp::P1 });
        fp_check!({ crate::modp::P2 });
    }
    let equal = checks
        .iter()
        .all(|c| c.rank_a == c.rank_b && c.rank_b == c.rank_union);
    let stable = checks
        .windows(2)
        .all(|w| (w[0].rank_a, w[0].rank_b, w[0].rank_union) == (w[1].rank_a, w[1].rank_b, w[1].rank_union));
    Ok(SpanReport { checks, equal, stable })
}

/// Row-span equality at every admissible sample and prime, with rank
/// stability across probes.
pub fn span_equal(
    d: &RMatrixData,
    a: &RelationSet,
    b: &RelationSet,
    s_samples: &[Rat],
) -> Result<bool, SampleError> {
    compare_spans(d, a, b, s_samples).map(|r| r.equal && r.stable)
}

/// True when span(small) ⊊ span(big) at every admissible probe:
/// the union adds nothing to `big` while `small` has strictly lower rank.
pub fn span_strictly_contains(
    d: &RMatrixData,
    big: &RelationSet,
    small: &RelationSet,
    s_samples: &[Rat],
) -> Result<bool, SampleError> {
    compare_spans(d, big, small, s_samples).map(|r| {
        r.stable
            && r.checks
                .iter()
                .all(|c| c.rank_union == c.rank_a && c.rank_b < c.rank_a)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modp::{P1, P2};
    use crate::ring::rat;

    #[test]
    fn weight_vectors_match_hand_values() {
        assert_eq!(rho_numerators(Family::Sp, 4), vec![4, 2, -2, -4]);
        assert_eq!(rho_numerators(Family::SO, 5), vec![3, 1, 0, -1, -3]);
        assert_eq!(rho_numerators(Family::Sp, 6), vec![6, 4, 2, -2, -4, -6]);
        assert_eq!(rho_numerators(Family::SO, 7), vec![5, 3, 1, 0, -1, -3, -5]);
        // Antisymmetry under i -> N-1-i.
        for (fam, n) in [(Family::Sp, 8), (Family::SO, 9), (Family::SO, 4)] {
            let r = rho_numerators(fam, n);
            for i in 0..n {
                assert_eq!(r[i], -r[n - 1 - i]);
            }
        }
    }

    #[test]
    fn rmatrix_validates_for_all_shipped_groups() {
        // All four shipped groups accept the same convention: plain weight
        // sign in the lowering correction, conjugated weight sign in the
        // quantum metric, straight leg order.  Freezing the value makes an
        // accidental change in the assembly or the enumeration order show
        // up as a test failure.
        let accepted = Calibration {
            weight_sign_r: 1,
            weight_sign_metric: -1,
            correction_transposed: false,
        };
        for (fam, n) in [(Family::Sp, 4), (Family::SO, 5), (Family::Sp, 6), (Family::SO, 7)] {
            let d = build_rmatrix(fam, n).unwrap();
            assert_eq!(
                d.calibration, accepted,
                "accepted calibration changed for {fam:?}({n})"
            );
        }
    }

    #[test]
    fn singlet_eigenvalue_and_normalization() {
        let so5 = build_rmatrix(Family::SO, 5).unwrap();
        // Orthogonal N=5: the singlet eigenvalue is q^{-4}.
        assert_eq!(so5.nu, LaurentQ::q_pow(-4));
        assert_eq!(
            so5.mu,
            LaurentQ::one().add(&LaurentQ::q_int(4)),
            "so5 singlet norm is 1 + [4]_q"
        );
        let sp4 = build_rmatrix(Family::Sp, 4).unwrap();
        assert_eq!(sp4.nu, LaurentQ::q_pow(-5).neg());
        assert_eq!(sp4.mu, LaurentQ::one().sub(&LaurentQ::q_int(5)));
    }

    #[test]
    fn rational_sample_invariants_sp4() {
        // The symplectic R-matrix is integral in q, so rational q samples
        // evaluate directly; check the quadratic identity and the singlet
        // equations at q in {2, 3/2, 5/7}.
        let d = build_rmatrix(Family::Sp, 4).unwrap();
        let ident = SpaceTensor::<Rat>::identity(4, &[1, 2]);
        for q0 in [rat(2, 1), rat(3, 2), rat(5, 7)] {
            let ev = |t: &SpaceTensor<LaurentQ>| t.map(|c| c.eval_q(&q0).unwrap());
            let r = ev(&d.rhat);
            let k = ev(&d.k);
            let lam = d.lambda.eval_q(&q0).unwrap();
            let nu = d.nu.eval_q(&q0).unwrap();
            let mu = d.mu.eval_q(&q0).unwrap();
            assert!(r
                .dot(&r)
                .sub(&r.scale(&lam))
                .sub(&ident)
                .add(&k.scale(&(&lam * &nu)))
                .is_zero());
            assert_eq!(r.dot(&k), k.scale(&nu));
            assert_eq!(k.dot(&k), k.scale(&mu));
        }
    }

    #[test]
    fn projector_ranks_match_classical_representation_theory() {
        let sp4 = projector_suite(&build_rmatrix(Family::Sp, 4).unwrap());
        assert!(sp4.pass());
        assert_eq!(sp4.ranks, (10, 5, 1));
        assert_eq!(sp4.ranks, classical_ranks(Family::Sp, 4));
        let so5 = projector_suite(&build_rmatrix(Family::SO, 5).unwrap());
        assert!(so5.pass());
        assert_eq!(so5.ranks, (14, 10, 1));
        assert_eq!(so5.ranks, classical_ranks(Family::SO, 5));
    }

    #[test]
    fn word_tagging_records_generator_labels() {
        // Sandwich I·Ω₂·I·Ω₂·I for N=2-like small case on sp4: the word
        // tensor of the bare pattern must put coefficient 1 on the word
        // ((a,b),(b,d)) at matrix slot ((i,i),( a,d)) pattern; spot-check a
        // couple of entries directly against the dense contraction.
        let d = build_rmatrix(Family::Sp, 4).unwrap();
        let n = d.n();
        let ident = d.ident();
        let bare = tag_copy::<LaurentQ>(n, 2, 3)
            .dot(&ident)
            .dot(&tag_copy::<LaurentQ>(n, 2, 4));
        // Entry: (I⊗Ω)(I⊗Ω) = I ⊗ Ω², and Ω²'s (a,c) entry is
        // Σ_b Ω^a_b Ω^b_c: slot ((i,i),(a,c)) carries word ((a,b),(b,c)).
        for (key, v) in bare.iter() {
            assert_eq!(key[0].0, key[0].1, "space 1 must stay diagonal");
            let (a, c) = key[1];
            let (w1a, w1b) = key[2];
            let (w2a, w2b) = key[3];
            assert_eq!(v, &LaurentQ::one());
            assert_eq!((w1a, w2b), (a, c));
            assert_eq!(w1b, w2a, "inner generator indices must be contracted");
        }
        assert_eq!(bare.num_entries(), n * n * n * n);
    }

    #[test]
    fn combination_reproduces_combined_relation() {
        let d = build_rmatrix(Family::Sp, 4).unwrap();
        d.combination_reproduces_combined().unwrap();
    }

    #[test]
    fn relation_spans_sp4() {
        let d = build_rmatrix(Family::Sp, 4).unwrap();
        let diag = d.relations_diagonal();
        let combined = d.relations_combined();
        let cross = d.relations_cross();
        let alt = d.relations_alternative();
        let samples = [rat(2, 1), rat(3, 2)];
        assert_eq!(span_equal(&d, &diag, &combined, &samples), Ok(true));
        let mut diag_cross = diag.clone();
        diag_cross.rows.extend(cross.rows.iter().cloned());
        assert_eq!(span_equal(&d, &diag_cross, &alt, &samples), Ok(true));
        assert_eq!(span_strictly_contains(&d, &alt, &combined, &samples), Ok(true));
    }

    #[test]
    fn degenerate_samples_are_rejected() {
        let d = build_rmatrix(Family::Sp, 4).unwrap();
        let a = d.relations_combined();
        assert_eq!(
            compare_spans(&d, &a, &a, &[rat(0, 1), rat(2, 1)]),
            Err(SampleError::Degenerate(rat(0, 1)))
        );
        assert_eq!(
            compare_spans(&d, &a, &a, &[rat(2, 1)]),
            Err(SampleError::TooFew)
        );
        // s = 1 collapses the symmetric/antisymmetric eigenvalues.
        assert!(!d.admissible_sample(&Rat::one()));
    }

    #[test]
    fn classical_limit_spans_match_classical_assembly() {
        // Evaluating the diagonal relation rows at s=1 must give the same
        // row span as assembling the same sandwiches from the classical
        // flip and metric tensors directly.
        let d = build_rmatrix(Family::Sp, 4).unwrap();
        let n = d.n();
        let g = &d.group;
        let eps = g.eps();
        let p = g.p_flip::<Rat>(1, 2);
        let k0 = g.k0::<Rat>(1, 2);
        let ident = SpaceTensor::<Rat>::identity(n, &[1, 2]);
        let nn = rint(eps * n as i64); // μ(1)
        let qp1 = p
            .add(&ident)
            .scale(&nn)
            .sub(&k0.scale(&rint(1 + eps)));
        let qm1 = p
            .neg()
            .add(&ident)
            .scale(&nn)
            .sub(&k0.scale(&rint(1 - eps)));
        let core = tag_copy::<Rat>(n, 2, 3).dot(&p).dot(&tag_copy::<Rat>(n, 2, 4));
        let mut classical_rows: Vec<SparseVec<Rat>> = Vec::new();
        for t in [
            qp1.dot(&core).dot(&qp1),
            qm1.dot(&core).dot(&qm1),
            k0.dot(&core).dot(&k0),
        ] {
            // Reuse the row extraction by converting to LaurentQ constants.
            let tq = t.map(|c| LaurentQ::constant(c.clone()));
            for row in rows_from_tensor("classical", n, &tq) {
                let ent: Vec<(u32, Rat)> = row
                    .terms
                    .iter()
                    .map(|(c, v)| (*c, v.eval_s(&Rat::one())))
                    .filter(|(_, v)| !v.is_zero())
                    .collect();
                if !ent.is_empty() {
                    classical_rows.push(SparseVec::from_entries(ent));
                }
            }
        }
        let quantum_at_1 = d.relations_diagonal().eval_rat(&Rat::one());
        let (ra, rb, ru) = ranks_of(&quantum_at_1, &classical_rows);
        assert_eq!(ra, rb);
        assert_eq!(ra, ru);
    }

    #[test]
    fn relation_export_is_parseable() {
        let d = build_rmatrix(Family::Sp, 4).unwrap();
        let set = d.relations_cross();
        let text = set.export();
        assert_eq!(text.lines().count(), set.rows.len());
        assert!(text.starts_with("cross["));
        assert!(text.contains("->"));
    }

    #[test]
    fn prime_field_evaluation_matches_rational_reduction() {
        let d = build_rmatrix(Family::SO, 5).unwrap();
        let set = d.relations_combined();
        let s0 = rat(3, 2);
        let rat_rows = set.eval_rat(&s0);
        let fp_rows = set.eval_fp::<P1>(rat_to_fp::<P1>(&s0));
        assert_eq!(rat_rows.len(), fp_rows.len());
        assert_eq!(rank_of(&rat_rows), rank_of(&fp_rows));
        let fp2_rows = set.eval_fp::<P2>(rat_to_fp::<P2>(&s0));
        assert_eq!(rank_of(&rat_rows), rank_of(&fp2_rows));
    }
}
