//! Exact intermediate weighted Ehrhart quasi-polynomials of parametric
//! rational polytopes.
//!
//! A parametric polytope is a family `p(b) = { x : <mu_j, x> <= b_j }` whose
//! right-hand side `b` ranges over a chamber of parameter space.  For a
//! rational subspace `L` the intermediate sum interpolates between counting
//! lattice points (`L = 0`) and integrating (`L = V`): it integrates over the
//! slices of `p(b)` parallel to `L` and sums the results over the projected
//! lattice.  Applied to a polynomial weight, the result is a quasi-polynomial
//! in `b`: a polynomial whose coefficients involve fractional parts of linear
//! forms in `b`.
//!
//! The crate computes these quasi-polynomials exactly on a chamber, along with
//! two patched approximations (a Barvinok-family sum and a cone-by-cone sum)
//! that agree with the exact lattice count in the `k+1` highest polynomial
//! degrees.  Everything is exact rational arithmetic; no floats anywhere.
//!
//! Modules, bottom up:
//!
//! * [`exactlin`]: integer/rational matrices, Hermite and Smith normal forms,
//!   saturated subspaces and projected lattices.
//! * [`steppoly`]: quasi-polynomial ring (step polynomials times polynomials),
//!   canonical forms, specialization, JSON round-trip.
//! * [`conegen`]: half-open simplicial cones, adaptation of a cone to a
//!   subspace, primal half-open unimodular decomposition, and truncated
//!   two-variable Laurent expansions of intermediate generating functions.
//! * [`patchwork`]: patching coefficients on subspace families via Möbius
//!   inversion, with closed-form fast paths.
//! * [`parametric`]: chambers, vertex assembly over a chamber, the exact and
//!   patched quasi-polynomials, dilations, Minkowski sums, partition functions.
//! * [`oracle`]: independent brute-force reference (direct slice enumeration
//!   and simplex integration) used to cross-check the pipeline.
//! * [`cli`]: JSON/CSV front end used by the `ehrhart` binary.

pub mod cli;
pub mod conegen;
pub mod exactlin;
pub mod oracle;
pub mod parametric;
pub mod patchwork;
pub mod steppoly;

mod error;
pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
