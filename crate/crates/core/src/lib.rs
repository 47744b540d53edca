//! Exact automorphism-group computations for smooth plane sextic curves
//! over a prime field `F_p` with `p ≡ 1 (mod 252)`.
//!
//! The library builds explicit families of degree-6 ternary forms, computes
//! their linear automorphisms relative to a fixed candidate catalog of
//! projective transformations, and identifies the resulting groups against
//! a catalog of subgroup embeddings in `PGL_3`.

pub mod classify;
pub mod families;
pub mod field;
pub mod forms;
pub mod groups;
pub mod params;
pub mod pgl;
pub mod sample;
