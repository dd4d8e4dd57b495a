//! Elliptic pfaffian theta functions and the lattice-model quantities they describe.
//!
//! The crate is organised bottom-up:
//!
//! - [`numkernel`]: nomes, q-Pochhammer symbols, theta functions and classical identities.
//! - [`pfaffian`]: dense complex pfaffians, determinants and Hankel determinants.
//! - [`sympoly`]: bialternants, Schur polynomials and the `T_λ` family.
//! - [`ellpf`]: the twelve pfaffians `P_n^(σ)` and every identity checked about them.
//! - [`soslattice`]: brute-force 8VSOS and three-colour domain wall partition functions.
//! - [`eightvertex`]: eight-vertex transfer matrices and TQ-equation solutions at `η = π/3`.
//! - [`suites`]: named verification suites producing JSON check records.

pub mod eightvertex;
pub mod ellpf;
pub mod error;
pub mod numkernel;
pub mod pfaffian;
pub mod report;
pub mod sampling;
pub mod soslattice;
pub mod suites;
pub mod sympoly;

pub use error::{Error, Result};
pub use numkernel::{Nome, TruncationPolicy, C64};
