//! Exact analysis of 1-quasihomomorphisms `f: ℤ → Sym(n×n, ℚ)` on finite
//! windows.
//!
//! The crate checks the quasihomomorphism condition, extracts the
//! almost-periodic almost-palindromic structure of the delta sequence
//! `Δ(i) = f(i+1) - f(i)`, synthesizes `A` with `rank(f(x) - x·A) ≤ 2`, and
//! certifies that bound on every point of the window. All arithmetic is
//! exact over ℚ.

pub mod apap;
pub mod approximator;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod quasihom;
pub mod render;
pub mod selftest;
pub mod seq;

pub use approximator::{
    approximate, approximate_with, certify, detect_structure, ApproxCertificate, ApproxError,
    CertPeriod, FindingKind, StructureFinding, Verification,
};
pub use linalg::{Rational, Subspace, SymMat};
pub use quasihom::{DefectReport, QuasiHomWindow};
pub use seq::{DeltaSeq, GroupElement, Seq};
