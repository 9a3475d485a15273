//! Exact-arithmetic engine for building OZ vertex algebras whose Griess
//! algebra contains a prescribed commutative algebra.
//!
//! Starting from a finite-dimensional commutative algebra `A` with an
//! invariant symmetric bilinear form, the crate computes the spaces of
//! admissible correlation functions, runs the inductive coalgebra
//! construction, materializes a length/degree-truncated vertex algebra with
//! explicit structure constants, and forms the simple quotient by the radical
//! of an invariant bilinear form.  All arithmetic is over the rationals and
//! exact; every identity check is decidable.
//!
//! Module map:
//! - [`rat`], [`poly`]: arbitrary-precision rationals and sparse Laurent
//!   polynomials.
//! - [`ratfun`]: the function spaces `Phi^l` (rational functions with poles
//!   on diagonals), expansions, differential operators, involutions.
//! - [`linalg`]: exact kernels, preimages and subspace arithmetic.
//! - [`funspaces`]: bases of regular / admissible / simple-pole spaces.
//! - [`coalgebra`]: the inductive tower of correlation-function spaces
//!   attached to an algebra input.
//! - [`vertexbuild`]: the truncated vertex algebra and its structure
//!   constants.
//! - [`axioms`]: verification suites for the vertex-algebra identities.
//! - [`quotient`]: invariant forms, Gram matrices, radical and quotient
//!   dimensions.

pub mod axioms;
pub mod coalgebra;
pub mod error;
pub mod funspaces;
pub mod linalg;
pub mod poly;
pub mod quotient;
pub mod rat;
pub mod ratfun;
pub mod vertexbuild;

pub use error::Error;
pub use rat::Rat;
