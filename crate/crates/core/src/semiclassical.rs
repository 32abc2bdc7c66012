//! Classical limit of the exchange algebra.
//!
//! Writing `q = 1 + h`, the braid operator expands as `R̂ = P + h·P·r̃ +
//! O(h²)` and the singlet tensor as `K = K⁰ + h·K¹ + O(h²)`.  This module
//! extracts the first-order data `(r̃, K¹)` exactly from the Laurent
//! coefficients, proves the identities they satisfy (classical Yang–Baxter
//! for `r̃`, the mixed `K¹`/`r̃` exchange identities, skew-symmetry of the
//! shifted combination `r = r̃ − P + εK⁰`), and then asks the structural
//! question: *which graded bracket on the one-form generators do the
//! quadratic exchange relations induce at first order?*
//!
//! The answer is computed, not assumed.  Every quadratic relation
//! `Σ c_w(q)·Ω_u Ω_v = 0` is expanded to first order; the order-`h`
//! component is an affine equation in the unknown symmetric brackets
//! `B_{uv} = {ω_u, ω_v}`.  Solving the resulting systems shows:
//!
//! * the equivalent of the full relation ideal leaves a specific mixed
//!   singlet block of the bracket undetermined (the nullspace is exactly
//!   the pair of blocks coupling the metric singlet to its complement),
//!   and the same affine solution set is produced by a one-line
//!   projector-compatibility equation ([`singlet_block_system`]);
//! * the *larger* relation set obtained by also imposing the mixed
//!   singlet–symmetric relations pins the bracket uniquely, and the unique
//!   solution is the seven-slot bracket with `X⁽¹⁾ = −P`, `X⁽³⁾ = K`
//!   ([`induced_bracket`]);
//! * that uniquely induced bracket is *not* a differential graded bracket:
//!   nilpotency and Jacobi both fail, while its trace identity and its
//!   Jacobi identity modulo the singlet-pairing constraint still hold
//!   ([`induced_bracket_no_go`]).

use crate::bracket::{tilde_form, BicovBracket, BracketParams};
use crate::grass::{FormMat, GMono, GrassPoly};
use crate::group::{cybe_defect, is_ad_invariant, Group};
use crate::laurent::LaurentQ;
use crate::linalg::{solve_affine, AffineSolution, Echelon, SparseVec};
use crate::quantum::{RMatrixData, RelationSet};
use crate::ring::{rat, rint, Rat, Ring};
use crate::tensor::SpaceTensor;
use rayon::prelude::*;
use thiserror::Error;

/// First-order data extracted from a validated R-matrix.
#[derive(Clone, Debug)]
pub struct SemiclassicalData {
    pub group: Group,
    /// `r̃` on `(1,2)`: the order-`h` coefficient of the exchange operator
    /// `P·R̂ = I + h·r̃ + O(h²)`.  Satisfies the classical Yang–Baxter
    /// equation on the nose.
    pub r_tilde: SpaceTensor<Rat>,
    /// The skew-symmetrized combination `r = r̃ − P + εK⁰`; satisfies
    /// `r₂₁ = −r₁₂` and the modified Yang–Baxter equation (nonzero but
    /// ad-invariant defect).
    pub r_skew: SpaceTensor<Rat>,
    /// Order-`h` coefficient of the singlet tensor `K`.
    pub k1: SpaceTensor<Rat>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SemiclassicalError {
    /// The constant term of an expanded tensor was not the expected
    /// classical operator.
    #[error("classical limit of {0} is not the expected operator")]
    WrongConstantTerm(&'static str),
    /// A first-order identity that should hold exactly did not.
    #[error("first-order identity failed: {0}")]
    Identity(&'static str),
}

fn jet_c0(t: &SpaceTensor<LaurentQ>) -> SpaceTensor<Rat> {
    t.map(|v| v.jet().c0)
}

fn jet_c1(t: &SpaceTensor<LaurentQ>) -> SpaceTensor<Rat> {
    t.map(|v| v.jet().c1)
}

/// Expand a validated R-matrix to first order around `q = 1` and verify
/// every identity the first-order data must satisfy:
///
/// * `P·R̂|₀ = I` and `K|₀ = K⁰` (the classical limits are the flip and the
///   metric singlet);
/// * `r̃` satisfies the classical Yang–Baxter equation exactly — the
///   order-`h²` part of the braid relation closes on the first-order
///   coefficient alone;
/// * the singlet corrections couple to `r̃` through
///   `K¹ − εK¹P = K⁰r̃ − ε(1−εN)K⁰` and
///   `K¹ − εPK¹ = r̃₂₁K⁰ − ε(1−εN)K⁰`;
/// * the symmetric part of `r̃` is `P − εK⁰`, so `r = r̃ − P + εK⁰` is
///   skew (`r₂₁ = −r`) and its Yang–Baxter defect is ad-invariant.
pub fn semiclassical_expand(rm: &RMatrixData) -> Result<SemiclassicalData, SemiclassicalError> {
    let group = rm.group.clone();
    let n = group.n;
    let eps = rint(group.eps());
    let flip = group.p_flip::<Rat>(1, 2);
    let k0 = group.k0::<Rat>(1, 2);

    // The braid operator in exchange form: P·R̂ = I + h·r̃ + O(h²).
    let exchange = flip.map(|v| LaurentQ::constant(v.clone())).dot(&rm.rhat);
    if jet_c0(&exchange) != SpaceTensor::identity(n, &[1, 2]) {
        return Err(SemiclassicalError::WrongConstantTerm("exchange operator"));
    }
    let r_tilde = jet_c1(&exchange);

    if jet_c0(&rm.k) != k0 {
        return Err(SemiclassicalError::WrongConstantTerm("singlet tensor"));
    }
    let k1 = jet_c1(&rm.k);

    if !cybe_defect(&r_tilde).is_zero() {
        return Err(SemiclassicalError::Identity(
            "classical Yang-Baxter equation for r-tilde",
        ));
    }

    // Mixed first-order identities tying K¹ to r̃.  The scalar is the
    // order-h coefficient of the singlet eigenvalue ν = ε(1 + h(ε−N)):
    // ε(ε−N) = 1 − εN enters with a further factor ε from `PK⁰ = εK⁰`.
    let c = &eps * &(Rat::one() - &eps * &rint(n as i64));
    let lhs_a = k1.sub(&k1.dot(&flip).scale(&eps));
    let rhs_a = k0.dot(&r_tilde).sub(&k0.scale(&c));
    if lhs_a != rhs_a {
        return Err(SemiclassicalError::Identity("right singlet correction"));
    }
    let r_tilde_flipped = r_tilde.relabel(&[(1, 2), (2, 1)]);
    let lhs_b = k1.sub(&flip.dot(&k1).scale(&eps));
    let rhs_b = r_tilde_flipped.dot(&k0).sub(&k0.scale(&c));
    if lhs_b != rhs_b {
        return Err(SemiclassicalError::Identity("left singlet correction"));
    }

    // Symmetric part and the skew remainder.
    let sym_expected = flip.sub(&k0.scale(&eps)).scale(&rat(2, 1));
    if r_tilde.add(&r_tilde_flipped) != sym_expected {
        return Err(SemiclassicalError::Identity(
            "symmetric part of r-tilde is P - eps K0",
        ));
    }
    let r_skew = r_tilde.sub(&flip).add(&k0.scale(&eps));
    debug_assert!(r_skew
        .add(&r_skew.relabel(&[(1, 2), (2, 1)]))
        .is_zero());
    let defect = cybe_defect(&r_skew);
    if defect.is_zero() || !is_ad_invariant(&group, &defect) {
        return Err(SemiclassicalError::Identity(
            "modified Yang-Baxter defect of the skew r-matrix",
        ));
    }

    Ok(SemiclassicalData { group, r_tilde, r_skew, k1 })
}

// ---------------------------------------------------------------------------
// Unordered generator pairs: the unknowns of the induced-bracket systems.
// ---------------------------------------------------------------------------

/// Number of unordered generator pairs (diagonal included) for an `n×n`
/// generator matrix.
pub fn pair_count(n: usize) -> usize {
    let g = n * n;
    g * (g + 1) / 2
}

/// Column index of the unordered pair `{u, v}` (diagonal included) in the
/// triangular enumeration `{0,0}, {0,1}, …, {0,g−1}, {1,1}, …`.
pub fn pair_index(n: usize, u: u16, v: u16) -> u32 {
    let g = (n * n) as u32;
    let (u, v) = if u <= v { (u as u32, v as u32) } else { (v as u32, u as u32) };
    u * g - u * (u.wrapping_sub(1)) / 2 + (v - u)
}

/// Number of strict pairs `u < v` — the antisymmetric-correction columns.
pub fn skew_count(n: usize) -> usize {
    let g = n * n;
    g * (g - 1) / 2
}

/// Column index of the strict pair `u < v` in the triangular enumeration
/// `{0,1}, {0,2}, …, {0,g−1}, {1,2}, …` (matching [`WedgeCoords`] order).
pub fn skew_index(n: usize, u: u16, v: u16) -> u32 {
    debug_assert!(u < v);
    let g = (n * n) as u32;
    let (u, v) = (u as u32, v as u32);
    u * g - u * (u + 1) / 2 + (v - u - 1)
}

// ---------------------------------------------------------------------------
// Order-h extraction from quadratic relation sets.
// ---------------------------------------------------------------------------

/// An affine system `A·B + D·ψ = rhs` for the unknown brackets, one row per
/// scalar relation component.
///
/// The unknowns split into two blocks.  The first [`pair_count`] columns
/// are the symmetric generator brackets `B_{uv} ∈ Λ²`; the remaining
/// [`skew_count`] columns are the antisymmetric order-`h` corrections
/// `ψ_{uv} ∈ Λ²` of the word images (see [`order_h_system`]).  The ψ-block
/// is what makes the extraction well defined: rescaling every row of a
/// relation family by the same unit `f(q)` shifts each row's order-`h`
/// content by `f′(1)` times its own order-zero leftover, and the global
/// translation `ψ_{uv} ↦ ψ_{uv} − f′(1)·ω_u∧ω_v` absorbs exactly that
/// shift.  The bracket block of the solution set is therefore independent
/// of how the relation family was cleared of denominators.
#[derive(Clone, Debug)]
pub struct PairSystem {
    pub n: usize,
    /// Coefficient rows over the bracket columns followed by the
    /// correction columns.
    pub rows: Vec<SparseVec<Rat>>,
    /// Wedge-valued right-hand sides, parallel to `rows`.
    pub rhs: Vec<GrassPoly<Rat>>,
    /// Order-zero leftovers: the antisymmetric constant parts
    /// `Σ_{u<v}(c⁰_{uv} − c⁰_{vu})·ω_u∧ω_v` of those rows that do not
    /// vanish identically at `q = 1`.  Empty exactly when the classical
    /// limit of the relation family is the free wedge algebra; otherwise
    /// these span the constraint space the classical generators must
    /// satisfy before any bracket exists.
    pub constraints: Vec<GrassPoly<Rat>>,
}

/// Expand every relation `Σ c_w(q)·Ω_u Ω_v = 0` around `q = 1` and collect
/// the order-`h` components as one affine system for the brackets.
///
/// Under the correspondence `Ω_uΩ_v + Ω_vΩ_u = h·{ω_u, ω_v} + O(h²)` each
/// word expands as `Ω_uΩ_v = ω_u∧ω_v + h·(B_{uv}/2 + ψ_{uv}) + O(h²)`,
/// where `B_{uv} = {ω_u, ω_v}` is symmetric and the correspondence leaves
/// the antisymmetric part `ψ_{uv} = −ψ_{vu}` (with `ψ_{uu} = 0`) free.
/// The constant term of a row leaves the order-zero leftover recorded in
/// `constraints`, and the order-`h` component (scaled by 2) reads
///
/// ```text
/// Σ_{u≤v} (c⁰_{uv} + c⁰_{vu})·B_{uv} + 2·Σ_{u<v} (c⁰_{uv} − c⁰_{vu})·ψ_{uv}
///     = −2·Σ_{u<v} (c¹_{uv} − c¹_{vu})·ω_u∧ω_v .
/// ```
pub fn order_h_system(set: &RelationSet) -> PairSystem {
    let n = set.n;
    let g = (n * n) as u32;
    let bcols = pair_count(n) as u32;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut constraints = Vec::new();
    for row in &set.rows {
        // Jets of the word coefficients, keyed by the ordered pair.
        let mut c0 = std::collections::BTreeMap::new();
        let mut c1 = std::collections::BTreeMap::new();
        for (col, coef) in &row.terms {
            let u = (col / g) as u16;
            let v = (col % g) as u16;
            debug_assert!((u as u32) < g && (v as u32) < g);
            let j = coef.jet();
            if !j.c0.is_zero() {
                c0.insert((u, v), j.c0);
            }
            if !j.c1.is_zero() {
                c1.insert((u, v), j.c1);
            }
        }
        let zero = Rat::zero();
        let mut entries: Vec<(u32, Rat)> = Vec::new();
        let mut wedge = GrassPoly::<Rat>::zero();
        let mut leftover = GrassPoly::<Rat>::zero();
        for u in 0..g as u16 {
            for v in u..g as u16 {
                let fwd = c0.get(&(u, v)).unwrap_or(&zero);
                let coef = if u == v { fwd.clone() } else { fwd + c0.get(&(v, u)).unwrap_or(&zero) };
                if !coef.is_zero() {
                    entries.push((pair_index(n, u, v), coef));
                }
                if u != v {
                    let w = GrassPoly::gen(u).mul(&GrassPoly::gen(v));
                    let skew0 = fwd - c0.get(&(v, u)).unwrap_or(&zero);
                    if !skew0.is_zero() {
                        leftover.add_assign(&w.scale(&skew0));
                        entries.push((bcols + skew_index(n, u, v), rat(2, 1) * &skew0));
                    }
                    let skew = c1.get(&(u, v)).unwrap_or(&zero) - c1.get(&(v, u)).unwrap_or(&zero);
                    if !skew.is_zero() {
                        wedge.add_assign(&w.scale(&(-rat(2, 1) * &skew)));
                    }
                }
            }
        }
        if !leftover.is_zero() {
            constraints.push(leftover);
        }
        let sv = SparseVec::from_entries(entries);
        if sv.is_zero() && wedge.is_zero() {
            continue;
        }
        rows.push(sv);
        rhs.push(wedge);
    }
    PairSystem { n, rows, rhs, constraints }
}

impl PairSystem {
    /// Bracket columns only.
    pub fn bracket_cols(&self) -> usize {
        pair_count(self.n)
    }

    /// Total unknowns: bracket block plus correction block.
    pub fn ncols(&self) -> usize {
        pair_count(self.n) + skew_count(self.n)
    }

    /// Echelon basis of the order-zero constraint space in `Λ²`
    /// coordinates.
    pub fn constraint_echelon(&self) -> Echelon<Rat> {
        let coords = WedgeCoords::new(self.n);
        let mut ech = Echelon::new();
        for c in &self.constraints {
            ech.insert(&coords.vector(c));
        }
        ech
    }

    /// Reduce a wedge value modulo the constraint space.
    pub fn reduce(&self, p: &GrassPoly<Rat>) -> GrassPoly<Rat> {
        if self.constraints.is_empty() {
            return p.clone();
        }
        let coords = WedgeCoords::new(self.n);
        coords.poly(&self.constraint_echelon().reduce(&coords.vector(p)))
    }

    /// Solve the affine system for `(B, ψ)` jointly.  `None` means the
    /// order-`h` components are genuinely inconsistent.
    pub fn solve(&self) -> Option<AffineSolution<GrassPoly<Rat>>> {
        solve_affine(&self.rows, &self.rhs, self.ncols())
    }

    /// Solve with all values taken in the quotient `Λ²`/(constraint span).
    /// This is the natural value space for a constrained family: the
    /// classical algebra is the quotient by the constraint ideal, so word
    /// corrections and bracket values are only defined there.  Right-hand
    /// sides are reduced to their normal forms; since normal forms span a
    /// linear complement of the constraint space, elimination stays inside
    /// it and the solution components come out in normal form as well.
    pub fn solve_in_quotient(
        &self,
        ideal: &PairingIdeal,
    ) -> Option<AffineSolution<GrassPoly<Rat>>> {
        let rhs: Vec<GrassPoly<Rat>> = self.rhs.iter().map(|p| ideal.reduce_quadratic(p)).collect();
        solve_affine(&self.rows, &rhs, self.ncols())
    }

    /// The bracket block of a solution: `{ω_u, ω_v}` in pair order.
    pub fn bracket_values<'a>(
        &self,
        sol: &'a AffineSolution<GrassPoly<Rat>>,
    ) -> &'a [GrassPoly<Rat>] {
        &sol.particular[..self.bracket_cols()]
    }

    /// Echelon basis of the projection of the solution's nullspace onto
    /// the bracket columns: the bracket directions the system leaves free
    /// after the corrections `ψ` are eliminated.  Each vector has
    /// [`Self::bracket_cols`] dense coordinates.
    pub fn bracket_nullspace(&self, sol: &AffineSolution<GrassPoly<Rat>>) -> Vec<Vec<Rat>> {
        let bcols = self.bracket_cols();
        let mut ech = Echelon::new();
        for z in &sol.nullspace {
            let entries: Vec<(u32, Rat)> = z[..bcols]
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i as u32, v.clone()))
                .collect();
            ech.insert(&SparseVec::from_entries(entries));
        }
        ech.rows()
            .map(|r| {
                let mut dense = vec![Rat::zero(); bcols];
                for (i, c) in r.iter() {
                    dense[i as usize] = c.clone();
                }
                dense
            })
            .collect()
    }

    /// Each row as a single rational vector: the unknown coefficients
    /// followed by the wedge coordinates of its right-hand side.  Two
    /// consistent systems have the same affine solution set iff these
    /// augmented rows span the same space.
    pub fn augmented_rows(&self) -> Vec<SparseVec<Rat>> {
        let offset = self.ncols() as u32;
        let coords = WedgeCoords::new(self.n);
        let mut out = Vec::new();
        for (row, w) in self.rows.iter().zip(&self.rhs) {
            let mut entries: Vec<(u32, Rat)> = row.iter().map(|(i, c)| (i, c.clone())).collect();
            for (col, c) in coords.vector(w).iter() {
                entries.push((offset + col, c.clone()));
            }
            let sv = SparseVec::from_entries(entries);
            if !sv.is_zero() {
                out.push(sv);
            }
        }
        out
    }
}

/// Fixed coordinates on `Λ²`: the wedge monomial `ω_u∧ω_v` (`u < v`) in
/// triangular enumeration order.
pub struct WedgeCoords {
    map: std::collections::BTreeMap<GMono, u32>,
    monos: Vec<GMono>,
}

impl WedgeCoords {
    pub fn new(n: usize) -> Self {
        let g = (n * n) as u16;
        let mut map = std::collections::BTreeMap::new();
        let mut monos = Vec::new();
        for u in 0..g {
            for v in (u + 1)..g {
                let w = GrassPoly::<Rat>::gen(u).mul(&GrassPoly::gen(v));
                let (m, _) = w.terms().next().expect("distinct generators wedge to one term");
                map.insert(m.clone(), monos.len() as u32);
                monos.push(m.clone());
            }
        }
        WedgeCoords { map, monos }
    }

    pub fn dim(&self) -> usize {
        self.monos.len()
    }

    pub fn vector(&self, p: &GrassPoly<Rat>) -> SparseVec<Rat> {
        let entries = p
            .terms()
            .map(|(m, c)| (*self.map.get(m).expect("degree-2 monomial"), c.clone()))
            .collect();
        SparseVec::from_entries(entries)
    }

    pub fn poly(&self, v: &SparseVec<Rat>) -> GrassPoly<Rat> {
        let mut out = GrassPoly::zero();
        for (i, c) in v.iter() {
            out.add_assign(&GrassPoly::term(self.monos[i as usize].clone(), c.clone()));
        }
        out
    }
}

/// Same affine solution set: both systems consistent and the augmented
/// rows span the same space.
pub fn same_solution_set(a: &PairSystem, b: &PairSystem) -> bool {
    crate::linalg::rowspace_equal(&a.augmented_rows(), &b.augmented_rows())
}

/// Do the order-zero leftovers of a system span the same `Λ²` subspace as
/// the singlet pairing rows `K(Ω₁Ω₂) + (Ω₁Ω₂)K`?
pub fn constraints_match_singlet_pairing(sys: &PairSystem, group: &Group) -> bool {
    let coords = WedgeCoords::new(sys.n);
    let a: Vec<SparseVec<Rat>> = sys.constraints.iter().map(|p| coords.vector(p)).collect();
    let b: Vec<SparseVec<Rat>> = singlet_pairing_rows(group)
        .iter()
        .map(|p| coords.vector(p))
        .collect();
    crate::linalg::rowspace_equal(&a, &b)
}

// ---------------------------------------------------------------------------
// The projector-compatibility system and its undetermined block.
// ---------------------------------------------------------------------------

/// The quadratic counterterm `G₁₂` built from the classical data:
///
/// ```text
/// G₁₂ = −[Ω₁,[Ω₂,r]]₊ + P(Ω₁²+Ω₂²) − ε(KΩ₁Ω₂ + Ω₁Ω₂K + Ω₁KΩ₂ + Ω₂KΩ₁)
/// ```
///
/// with `r` the skew r-matrix and `K = K⁰`.  The combination
/// `{Ω₁,Ω₂} + G₁₂` is what the singlet projector must see on its mixed
/// blocks only.
pub fn quadratic_counterterm(sd: &SemiclassicalData) -> SpaceTensor<GrassPoly<Rat>> {
    let g = &sd.group;
    let n = g.n;
    let eps = GrassPoly::constant(rint(g.eps()));
    let o = FormMat::<Rat>::generators(n);
    let o1 = o.embed(1);
    let o2 = o.embed(2);
    let rr = sd.r_skew.map(|v| GrassPoly::constant(v.clone()));
    let flip = g.p_flip::<GrassPoly<Rat>>(1, 2);
    let k0 = g.k0::<GrassPoly<Rat>>(1, 2);

    let inner = o2.dot(&rr).sub(&rr.dot(&o2));
    let anchor = o1.dot(&inner).add(&inner.dot(&o1));
    let squares = flip.dot(&o1.dot(&o1).add(&o2.dot(&o2)));
    let oo = o1.dot(&o2);
    let k_terms = k0
        .dot(&oo)
        .add(&oo.dot(&k0))
        .add(&o1.dot(&k0).dot(&o2))
        .add(&o2.dot(&k0).dot(&o1));
    anchor.map(|v| v.neg()).add(&squares).sub(&k_terms.scale(&eps))
}

/// The counterterm bracket `{Ω₁, Ω₂} = −G₁₂`, wrapped as a generator
/// table.  It is *not* of seven-slot form and not even graded-symmetric as
/// written: its symmetry defect is the failure of `K(Ω₁Ω₂) + (Ω₁Ω₂)K` to
/// vanish, so it only defines a bracket on generators constrained by the
/// singlet pairing.  See [`counterterm_poisson_check`].
pub fn counterterm_bracket(sd: &SemiclassicalData) -> BicovBracket<Rat> {
    BicovBracket::from_table(&sd.group, quadratic_counterterm(sd).map(|v| v.neg()))
}

/// Outcome of the constrained-Poisson probes on the counterterm bracket.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstrainedPoissonReport {
    /// The graded-symmetry defect of `−G₁₂` lies in the constraint span.
    pub symmetry_defect_in_span: bool,
    /// Every generator-triple Jacobi residual lies in the degree-3 ideal
    /// generated by the constraint span.
    pub jacobiator_in_ideal: bool,
    /// Whether the Jacobi residuals vanish before any reduction (they do
    /// not: the reduction is what makes the bracket Poisson).
    pub jacobiator_zero_exactly: bool,
}

impl ConstrainedPoissonReport {
    /// True iff the bracket is Poisson on the constrained generators while
    /// genuinely needing the constraint: defect and residuals reduce to
    /// zero, but the residuals are nonzero before reduction.
    pub fn pass(&self) -> bool {
        self.symmetry_defect_in_span && self.jacobiator_in_ideal && !self.jacobiator_zero_exactly
    }
}

/// Verify that the counterterm bracket `−G₁₂` is Poisson for generators
/// restricted by the singlet pairing constraint: its symmetry defect and
/// all of its Jacobi residuals lie in the constraint ideal, while the
/// unreduced residuals do not vanish.
pub fn counterterm_poisson_check(sd: &SemiclassicalData) -> ConstrainedPoissonReport {
    let bk = counterterm_bracket(sd);
    let group = &sd.group;
    let g = (group.n * group.n) as u16;
    let ideal = PairingIdeal::new(group);

    let defect = bk.table().sub(&bk.table().relabel(&[(1, 2), (2, 1)]));
    let symmetry_defect_in_span = defect.iter().all(|(_, v)| ideal.contains_quadratic(v));

    let mut triples = Vec::new();
    for g1 in 0..g {
        for g2 in g1..g {
            for g3 in g2..g {
                triples.push((g1, g2, g3));
            }
        }
    }
    let (all_in, all_zero) = triples
        .par_iter()
        .map(|&(g1, g2, g3)| {
            let j = bk.jacobiator(g1, g2, g3);
            if j.is_zero() {
                (true, true)
            } else {
                (ideal.contains_cubic(&j), false)
            }
        })
        .reduce(|| (true, true), |a, b| (a.0 && b.0, a.1 && b.1));

    ConstrainedPoissonReport {
        symmetry_defect_in_span,
        jacobiator_in_ideal: all_in,
        jacobiator_zero_exactly: all_zero,
    }
}

/// The one-line compatibility system: with `P̂⁰ = (ε/N)K⁰` the idempotent
/// singlet projector and `X` the unknown bracket table,
///
/// ```text
/// (I − P̂⁰)(X + G) − (X + G)P̂⁰ = 0 ,
/// ```
///
/// read entrywise over the matrix slots of `End(V⊗V)` as affine equations
/// for the pair unknowns `B_{uv}` (the table entry at row `(i₁,i₂)`,
/// column `(j₁,j₂)` is `B_{uv}` with `u = i₁n+j₁`, `v = i₂n+j₂`).
pub fn singlet_block_system(sd: &SemiclassicalData) -> PairSystem {
    let g = &sd.group;
    let n = g.n;
    let d = n * n;
    let scale = rat(g.eps(), n as i64);
    let p0 = flat_matrix(&g.k0::<Rat>(1, 2).scale(&scale), n);

    // Right-hand side: −[(I−P̂⁰)G − G·P̂⁰] entrywise.
    let p0g = g
        .k0::<GrassPoly<Rat>>(1, 2)
        .scale(&GrassPoly::constant(scale.clone()));
    let gt = quadratic_counterterm(sd);
    let m = gt.sub(&p0g.dot(&gt)).sub(&gt.dot(&p0g));

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..d {
        let (r1, r2) = (r / n, r % n);
        for c in 0..d {
            let (c1, c2) = (c / n, c % n);
            let mut acc: std::collections::BTreeMap<u32, Rat> = std::collections::BTreeMap::new();
            let mut put = |u: usize, v: usize, w: Rat| {
                if w.is_zero() {
                    return;
                }
                let col = pair_index(n, u as u16, v as u16);
                let e = acc.entry(col).or_insert_with(Rat::zero);
                *e += &w;
            };
            // X_{rc} itself.
            put(r1 * n + c1, r2 * n + c2, Rat::one());
            for t in 0..d {
                let (t1, t2) = (t / n, t % n);
                // −(P̂⁰X)_{rc} = −Σ_t P̂⁰_{rt}X_{tc}
                put(t1 * n + c1, t2 * n + c2, -&p0[r][t]);
                // −(XP̂⁰)_{rc} = −Σ_t X_{rt}P̂⁰_{tc}
                put(r1 * n + t1, r2 * n + t2, -&p0[t][c]);
            }
            let key = [(1, (r1 as u8, c1 as u8)), (2, (r2 as u8, c2 as u8))];
            let w = m.get(&key).neg();
            let sv = SparseVec::from_entries(acc.into_iter().collect());
            if sv.is_zero() && w.is_zero() {
                continue;
            }
            rows.push(sv);
            rhs.push(w);
        }
    }
    PairSystem { n, rows, rhs, constraints: Vec::new() }
}

/// Dimension of the bracket block the compatibility system leaves free:
/// symmetric-placement tables whose matrix sits in
/// `P̂⁰·E·(I−P̂⁰) + (I−P̂⁰)·E·P̂⁰`.  Each of the two mixed blocks
/// contributes the flip `ε`-eigenspace dimension minus one (the singlet
/// direction itself), giving `2·(n(n+ε)/2 − 1)`.
pub fn mixed_block_dim(group: &Group) -> usize {
    let n = group.n as i64;
    let eps = group.eps();
    (n * (n + eps) - 2) as usize
}

fn flat_matrix(t: &SpaceTensor<Rat>, n: usize) -> Vec<Vec<Rat>> {
    let d = n * n;
    let a = t.align_to(&[1, 2]);
    let mut m = vec![vec![Rat::zero(); d]; d];
    for (key, v) in a.iter() {
        let (i1, j1) = (key[0].0 as usize, key[0].1 as usize);
        let (i2, j2) = (key[1].0 as usize, key[1].1 as usize);
        m[i1 * n + i2][j1 * n + j2] = v.clone();
    }
    m
}

fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let d = a.len();
    let mut out = vec![vec![Rat::zero(); d]; d];
    for i in 0..d {
        for k in 0..d {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..d {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

/// Reconstitute a pair vector as the symmetric-placement matrix
/// `Z_{(i₁,i₂),(j₁,j₂)} = z_{{i₁n+j₁, i₂n+j₂}}` and report whether it is
/// supported purely on the mixed singlet blocks: `P̂⁰ Z P̂⁰ = 0` and
/// `(I−P̂⁰) Z (I−P̂⁰) = 0`.
pub fn on_mixed_block(group: &Group, z: &[Rat]) -> bool {
    let n = group.n;
    let d = n * n;
    assert_eq!(z.len(), pair_count(n));
    let mut zm = vec![vec![Rat::zero(); d]; d];
    for r in 0..d {
        for c in 0..d {
            let u = (r / n) * n + (c / n);
            let v = (r % n) * n + (c % n);
            zm[r][c] = z[pair_index(n, u as u16, v as u16) as usize].clone();
        }
    }
    let scale = rat(group.eps(), n as i64);
    let p0 = flat_matrix(&group.k0::<Rat>(1, 2).scale(&scale), n);
    let q: Vec<Vec<Rat>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut v = -&p0[i][j];
                    if i == j {
                        v += Rat::one();
                    }
                    v
                })
                .collect()
        })
        .collect();
    let pzp = mat_mul(&p0, &mat_mul(&zm, &p0));
    let qzq = mat_mul(&q, &mat_mul(&zm, &q));
    let zero = |m: &[Vec<Rat>]| m.iter().all(|row| row.iter().all(|v| v.is_zero()));
    zero(&pzp) && zero(&qzq)
}

// ---------------------------------------------------------------------------
// The uniquely induced bracket and its failure to be differential.
// ---------------------------------------------------------------------------

/// The seven-slot bracket forced by the enlarged relation set: slot one is
/// `−P`, slot three is `K`, every other slot vanishes, and the r-matrix is
/// the skew `r = r̃ − P + εK⁰`.  Expanded:
///
/// ```text
/// {Ω₁,Ω₂} = [Ω₁,[Ω₂,r]]₊ − P(Ω₁²+Ω₂²) + Ω̃₁KΩ₁ + Ω̃₂KΩ₂ ,
/// ```
///
/// and the singlet reflection identity `Ω̃₁K = Ω₂K` turns the last two
/// terms into the mixed sandwiches `Ω₂KΩ₁ + Ω₁KΩ₂`.
pub fn induced_bracket(sd: &SemiclassicalData) -> BicovBracket<Rat> {
    let mut params = BracketParams::<Rat>::zero();
    params.b[0] = -Rat::one();
    params.c[2] = Rat::one();
    BicovBracket::build(&sd.group, params, &sd.r_skew)
}

/// The generator table of a bracket in pair order: entry `pair_index(u,v)`
/// is `{ω_u, ω_v}`.
pub fn bracket_pair_table(bk: &BicovBracket<Rat>) -> Vec<GrassPoly<Rat>> {
    let g = (bk.group.n * bk.group.n) as u16;
    let mut out = Vec::with_capacity(pair_count(bk.group.n));
    for u in 0..g {
        for v in u..g {
            out.push(bk.gen_bracket(u, v));
        }
    }
    out
}

/// The quadratic constraint rows `K(Ω₁Ω₂) + (Ω₁Ω₂)K = 0` (entrywise): the
/// pairing condition under which the induced bracket becomes symmetric and
/// Jacobi.  Returns the nonzero entries as quadratic Grassmann elements.
pub fn singlet_pairing_rows(group: &Group) -> Vec<GrassPoly<Rat>> {
    let o = FormMat::<Rat>::generators(group.n);
    let oo = o.embed(1).dot(&o.embed(2));
    let k0 = group.k0::<GrassPoly<Rat>>(1, 2);
    let t = k0.dot(&oo).add(&oo.dot(&k0));
    t.iter().map(|(_, v)| v.clone()).filter(|v| !v.is_zero()).collect()
}

/// Fixed coordinates on `Λ³`: the monomial `ω_u∧ω_v∧ω_w` (`u < v < w`) in
/// triangular enumeration order.
struct CubicCoords {
    map: std::collections::BTreeMap<GMono, u32>,
}

impl CubicCoords {
    fn new(n: usize) -> Self {
        let g = (n * n) as u16;
        let mut map = std::collections::BTreeMap::new();
        let mut next = 0u32;
        for u in 0..g {
            for v in (u + 1)..g {
                for w in (v + 1)..g {
                    let p = GrassPoly::<Rat>::gen(u)
                        .mul(&GrassPoly::gen(v))
                        .mul(&GrassPoly::gen(w));
                    let (m, _) = p.terms().next().expect("distinct generators");
                    map.insert(m.clone(), next);
                    next += 1;
                }
            }
        }
        CubicCoords { map }
    }

    fn vector(&self, p: &GrassPoly<Rat>) -> SparseVec<Rat> {
        let entries = p
            .terms()
            .map(|(m, c)| (*self.map.get(m).expect("degree-3 monomial"), c.clone()))
            .collect();
        SparseVec::from_entries(entries)
    }
}

/// The ideal generated by the singlet pairing rows, prepared for quotient
/// tests in degrees 2 and 3: the degree-2 component is the span of the
/// rows themselves, the degree-3 component is the span of `row ∧ ω_w`.
pub struct PairingIdeal {
    wedge: WedgeCoords,
    cubic: CubicCoords,
    deg2: Echelon<Rat>,
    deg3: Echelon<Rat>,
}

impl PairingIdeal {
    pub fn new(group: &Group) -> Self {
        let n = group.n;
        let g = (n * n) as u16;
        let wedge = WedgeCoords::new(n);
        let cubic = CubicCoords::new(n);
        let mut deg2 = Echelon::new();
        let mut deg3 = Echelon::new();
        for row in singlet_pairing_rows(group) {
            deg2.insert(&wedge.vector(&row));
            for w in 0..g {
                let p = row.mul(&GrassPoly::gen(w));
                if !p.is_zero() {
                    deg3.insert(&cubic.vector(&p));
                }
            }
        }
        PairingIdeal { wedge, cubic, deg2, deg3 }
    }

    /// Dimension of the degree-2 component (the constraint span itself).
    pub fn quadratic_rank(&self) -> usize {
        self.deg2.rank()
    }

    pub fn contains_quadratic(&self, p: &GrassPoly<Rat>) -> bool {
        p.is_zero() || self.deg2.contains(&self.wedge.vector(p))
    }

    pub fn contains_cubic(&self, p: &GrassPoly<Rat>) -> bool {
        p.is_zero() || self.deg3.contains(&self.cubic.vector(p))
    }

    /// Reduce a quadratic value to its normal form modulo the constraint
    /// span.
    pub fn reduce_quadratic(&self, p: &GrassPoly<Rat>) -> GrassPoly<Rat> {
        self.wedge.poly(&self.deg2.reduce(&self.wedge.vector(p)))
    }
}

/// Outcome of the differential-compatibility probes on the induced
/// bracket.  Every field records the *observed* verdict; the headline
/// pattern is that the bracket is not nilpotent-compatible and not Jacobi,
/// its trace identity and Jacobi identity hold only after reduction by the
/// singlet pairing constraint, and the Leibniz rule fails even when
/// restricted to the antisymmetrized generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedBracketProbe {
    /// `d² ≠ 0` for the induced trace differential.
    pub nilpotency_fails: bool,
    /// Some generator triple has a nonzero Jacobi residual.
    pub jacobi_fails: bool,
    /// `{Ω⁻, trΩ} + 2(Ω⁻)² = 0` before any reduction (informational; the
    /// identity needs the constraint).
    pub trace_residual_zero_exactly: bool,
    /// Every entry of `{Ω⁻, trΩ} + 2(Ω⁻)²` lies in the constraint span.
    pub trace_residual_in_constraint_span: bool,
    /// The compatibility of the bracket with its trace differential fails
    /// already on antisymmetrized generators.
    pub minus_sector_leibniz_fails: bool,
    /// Every Jacobi residual lies in the degree-3 ideal generated by the
    /// singlet pairing rows.
    pub jacobiator_in_pairing_ideal: bool,
}

impl InducedBracketProbe {
    /// True iff the observed pattern is exactly the predicted one.
    pub fn pass(&self) -> bool {
        self.nilpotency_fails
            && self.jacobi_fails
            && self.trace_residual_in_constraint_span
            && self.minus_sector_leibniz_fails
            && self.jacobiator_in_pairing_ideal
    }
}

/// Run all probes on the induced bracket.
pub fn induced_bracket_no_go(sd: &SemiclassicalData) -> InducedBracketProbe {
    let bk = induced_bracket(sd);
    let group = &sd.group;
    let n = group.n;
    let g = (n * n) as u16;
    let ideal = PairingIdeal::new(group);

    let nilpotency_fails = !bk.check_nilpotency().map_or(false, |r| r.pass());
    let jacobi = bk.check_jacobi(false);
    let jacobi_fails = !jacobi.pass();

    let trace_residual = bk.omega_minus_trace_residual();
    let mut trace_residual_zero_exactly = true;
    let mut trace_residual_in_constraint_span = true;
    for i in 0..n {
        for j in 0..n {
            let e = trace_residual.at(i, j);
            if !e.is_zero() {
                trace_residual_zero_exactly = false;
            }
            if !ideal.contains_quadratic(e) {
                trace_residual_in_constraint_span = false;
            }
        }
    }

    // Antisymmetrized generators ω⁻ = ω − ω̃.
    let o = FormMat::<Rat>::generators(n);
    let minus = o.sub(&tilde_form(group, &o));
    let mut minus_sector_leibniz_fails = false;
    'outer: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let x = minus.at(i, j);
                    let y = minus.at(k, l);
                    if !bk.leibniz_residual(x, y).is_zero() {
                        minus_sector_leibniz_fails = true;
                        break 'outer;
                    }
                }
            }
        }
    }

    // Jacobi modulo the pairing ideal.
    let mut triples = Vec::new();
    for g1 in 0..g {
        for g2 in g1..g {
            for g3 in g2..g {
                triples.push((g1, g2, g3));
            }
        }
    }
    let jacobiator_in_pairing_ideal = triples
        .par_iter()
        .all(|&(g1, g2, g3)| ideal.contains_cubic(&bk.jacobiator(g1, g2, g3)));

    InducedBracketProbe {
        nilpotency_fails,
        jacobi_fails,
        trace_residual_zero_exactly,
        trace_residual_in_constraint_span,
        minus_sector_leibniz_fails,
        jacobiator_in_pairing_ideal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Family;
    use crate::quantum::build_rmatrix;

    fn expand(family: Family, n: usize) -> SemiclassicalData {
        let rm = build_rmatrix(family, n).expect("R-matrix builds");
        semiclassical_expand(&rm).expect("first-order identities hold")
    }

    #[test]
    fn first_order_identities_hold_for_all_shipped_groups() {
        for (family, n) in [(Family::Sp, 4), (Family::SO, 5), (Family::Sp, 6), (Family::SO, 7)] {
            let sd = expand(family, n);
            assert!(!sd.r_tilde.is_zero());
            assert!(!sd.k1.is_zero());
        }
    }

    #[test]
    fn first_order_term_is_independent_of_the_deformation_chart() {
        // The order-h coefficient of q^{k/2} is k/2 whether q = 1 + h or
        // q = exp(h): both charts have dq/dh = 1 at h = 0, so the jet can
        // also be computed as the divided difference in s at s = 1, halved
        // by the chain rule through s = q^{1/2}.
        let rm = build_rmatrix(Family::Sp, 4).unwrap();
        let s_minus_one = LaurentQ::term(Rat::one(), 1).sub(&LaurentQ::one());
        let one = Rat::one();
        for (_, v) in rm.rhat.iter() {
            let at_one = v.eval_s(&one);
            let diff = v.sub(&LaurentQ::constant(at_one));
            let quot = diff
                .div_exact(&s_minus_one)
                .expect("s = 1 is a root of f - f(1)");
            let derivative_half = quot.eval_s(&one) / rat(2, 1);
            assert_eq!(v.jet().c1, derivative_half);
        }
    }

    #[test]
    fn pair_indexing_is_a_bijection() {
        let n = 4;
        let g = (n * n) as u16;
        let mut seen = std::collections::BTreeSet::new();
        for u in 0..g {
            for v in u..g {
                assert_eq!(pair_index(n, u, v), pair_index(n, v, u));
                assert!(seen.insert(pair_index(n, u, v)));
            }
        }
        assert_eq!(seen.len(), pair_count(n));
        assert_eq!(*seen.iter().max().unwrap() as usize, pair_count(n) - 1);
    }

    #[test]
    fn relation_ideal_determines_bracket_up_to_mixed_singlet_block() {
        let rm = build_rmatrix(Family::Sp, 4).unwrap();
        let sd = semiclassical_expand(&rm).unwrap();
        let sys = order_h_system(&rm.relations_combined());
        assert!(sys.constraints.is_empty(), "this family is classically free");
        let sol = sys.solve().expect("order-h components are consistent");
        let free = sys.bracket_nullspace(&sol);
        assert_eq!(free.len(), mixed_block_dim(&sd.group));
        for z in &free {
            assert!(on_mixed_block(&sd.group, z));
        }
    }

    #[test]
    fn relation_ideal_matches_projector_compatibility_system() {
        let rm = build_rmatrix(Family::Sp, 4).unwrap();
        let sd = semiclassical_expand(&rm).unwrap();
        let from_relations = order_h_system(&rm.relations_combined());
        let from_projector = singlet_block_system(&sd);
        assert!(from_projector.solve().is_some());
        assert!(same_solution_set(&from_relations, &from_projector));
    }

    #[test]
    fn enlarged_relation_set_pins_the_induced_bracket() {
        let rm = build_rmatrix(Family::Sp, 4).unwrap();
        let sd = semiclassical_expand(&rm).unwrap();
        let sys = order_h_system(&rm.relations_alternative());
        assert!(constraints_match_singlet_pairing(&sys, &sd.group));
        let sol = sys.solve().expect("order-h components are consistent");
        assert!(
            sys.bracket_nullspace(&sol).is_empty(),
            "the enlarged set pins every bracket"
        );
        let table = bracket_pair_table(&induced_bracket(&sd));
        assert_eq!(sys.bracket_values(&sol), &table[..]);
    }

    #[test]
    fn induced_bracket_fails_differential_axioms_in_the_predicted_pattern() {
        let sd = expand(Family::Sp, 4);
        let probe = induced_bracket_no_go(&sd);
        assert!(probe.pass(), "observed pattern: {probe:?}");
    }
}
