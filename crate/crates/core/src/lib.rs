//! Verification workbench for a small object-oriented language, its
//! recursive-procedure counterpart and the kernel language both build on.
//!
//! The crate provides an interpreter for the small-step semantics, the
//! transformation of object-oriented programs into recursive ones, an
//! aliasing-aware substitution calculus, weakest preconditions computed by
//! enumeration, and a checker for Hoare-style derivations.

pub mod assertions;
pub mod gen;
pub mod interp;
pub mod parser;
pub mod proofs;
pub mod state;
pub mod suites;
pub mod syntax;
pub mod transform;
pub mod wp;
