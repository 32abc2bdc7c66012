//! Exact-arithmetic engine for graded Poisson-type brackets on matrix-valued
//! one-forms covariant under orthogonal and symplectic groups.
//!
//! The crate builds, from first principles and in exact arithmetic:
//!
//! * the ambient exterior algebra on the `N x N` matrix of one-form
//!   generators and the bicovariance machinery (metric, transpose-conjugate,
//!   permutation and rank-one projector tensors);
//! * the 20-parameter graded bracket ansatz on those generators, its
//!   extension by graded Leibniz rules, and the derived conditions
//!   (trace couplings, nilpotency of the induced differential, derivation
//!   compatibility, graded Jacobi on the antisymmetric part, closure);
//! * the quantum R-matrix side — braid-form R, metric projectors, the
//!   quadratic exchange-relation candidates and their spans, PBW-style
//!   dimension probes — together with its first-order semiclassical limit,
//!   which reproduces the classical brackets;
//! * randomized (Schwartz–Zippel style) counterparts of the symbolic checks
//!   over two fixed 62-bit prime fields.
//!
//! All scalar arithmetic is exact (`BigRational`, Laurent polynomials in
//! `q^(1/2)`, first-order jets, prime fields); there is no floating point
//! anywhere in the identity-checking paths.

pub mod ring;
pub mod modp;
pub mod mpoly;
pub mod laurent;
pub mod hjet;
pub mod linalg;
pub mod tensor;
pub mod grass;
pub mod group;
pub mod bracket;
pub mod presets;
pub mod quantum;
pub mod semiclassical;
pub mod pbw;
pub mod invariants;

pub use ring::{Rat, Ring};
