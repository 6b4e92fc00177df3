//! Chain-level computation of τ and ε for Mazur-pattern satellites.

pub mod acceptance;
pub mod cfk;
pub mod cli;
pub mod grading;
pub mod invariants;
pub mod pairing;
pub mod patterns;
pub mod reduction;
pub mod structures;
pub mod torus_algebra;
