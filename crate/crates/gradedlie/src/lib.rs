//! Exact-arithmetic engine for the twisted deformative Schrödinger-Virasoro
//! Lie algebras L(lambda, mu).
//!
//! The crate instantiates L(lambda, mu) from its structure constants over
//! exact rationals, computes degree-homogeneous derivation spaces on finite
//! truncation windows as exact nullspaces, verifies and factors
//! automorphisms along the classified generating families, and machine-checks
//! the resulting classification at desk scale. Every computation is exact;
//! there is no floating point and no tolerance anywhere.
//!
//! Layering:
//! - [`exactlin`]: rationals, sparse matrices, RREF / nullspace / span.
//! - [`algebra`]: parameters, elements, brackets, Jacobi verification.
//! - [`derivations`]: Leibniz solver, named outer derivations, classification.
//! - [`automorphisms`]: constructor families, hom checks, factorization.
//! - [`cli`]: report plumbing shared by the command-line binary and the FFI.

pub mod algebra;
pub mod automorphisms;
pub mod cli;
pub mod derivations;
pub mod exactlin;
pub mod rng;
