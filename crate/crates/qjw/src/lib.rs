//! Exact computations with Jones-Wenzl projectors on tensor chains of a
//! Verma module and two-dimensional irreducibles over U_q(sl2).
//!
//! Everything is computed symbolically over the field of fractions of
//! Laurent polynomials in `q`, `t = q^mu` (generic Verma highest weight) and
//! `s = q^i` (generic basis index, used by the prover). No floating point,
//! no specialization unless explicitly requested.
//!
//! Module map:
//! - [`scalar`]: exact coefficient field and quantum brackets
//! - [`repmod`]: weight-graded module shapes, bases and generator actions
//! - [`maps`]: level-blocked exact linear maps between modules
//! - [`operators`]: evaluation/coevaluation, Temperley-Lieb generators,
//!   the Verma-chain intertwiners E/F and their towers
//! - [`projectors`]: Jones-Wenzl and extended Jones-Wenzl projectors plus
//!   the verification drivers
//! - [`prover`]: symbolic verification for a generic basis index
//! - [`report`]: verification report records shared by the drivers

pub mod maps;
pub mod operators;
pub mod projectors;
pub mod prover;
pub mod repmod;
pub mod report;
pub mod scalar;
