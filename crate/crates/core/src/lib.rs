//! Exact numerics for quantum Fisher information in N-qubit Ramsey frequency
//! estimation under Gaussian dephasing.
//!
//! The crate computes the quantum Fisher information of dephased N-qubit
//! states three independent ways — a dense symmetric-logarithmic-derivative
//! solver, closed-form GHZ/CSS expressions, and classical Fisher information
//! of explicit POVM measurements — and evaluates the family of upper bounds
//! and optimal-interrogation-time results that govern how the achievable
//! frequency resolution scales with the atom number N.
//!
//! Module map:
//! - [`hilbert`]: states (GHZ, CSS, seeded Haar-random) and the diagonal
//!   Hamiltonian H = ½Σσ^z.
//! - [`dephasing`]: the decoherence function γ(t) and the local/collective
//!   Gaussian dephasing channels, plus the full ω-dependent evolution.
//! - [`qfi`]: SLD solver, QFI, initial factor I_ρ, analytic formulas, and
//!   classical Fisher information.
//! - [`bounds`]: single-experiment and total-time upper bounds.
//! - [`protocol`]: time-budget accounting, interrogation-time optimization,
//!   and the uniform-allocation check.
//! - [`scaling`]: N-sweeps, power-law exponent fits, and resolution-scaling
//!   figure data.
//! - [`parallel`]: data-parallel map helpers (rayon behind the `parallel`
//!   feature, sequential fallback without it).

pub mod bounds;
pub mod dephasing;
pub mod error;
pub mod hilbert;
pub mod parallel;
pub mod protocol;
pub mod qfi;
pub mod scaling;

pub use error::{Error, Result};
