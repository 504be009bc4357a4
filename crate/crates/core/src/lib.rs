//! Numerical toolkit for the Iwatsuka Hamiltonian
//! `H₀ = -∂ₓ² + (-i∂_y - a(x))²` with a unidirectional magnetic field
//! `b(x) = a'(x)` that increases from `b₋` to `b₊`.
//!
//! The operator fibers over the momentum `k` dual to the invariant
//! direction; each fiber `h(k) = -d²/dx² + (a(x)-k)²` has discrete simple
//! spectrum `E₁(k) < E₂(k) < …` (the band functions). The crate computes:
//!
//! - **field**: profiles `b`, their primitive `a = ∫₀ˣ b`, and `a⁻¹`;
//! - **hermite**: normalized Hermite functions and the ladder identities
//!   for `tΨₙ` and `t³Ψₙ`;
//! - **fiber**: band functions, eigenfunctions, Feynman–Hellmann
//!   derivatives, and the inverse `ϱₙ` of the threshold gap `Ɛ̄ₙ - Eₙ`;
//! - **quasimode**: explicit second-order quasi-modes in the Hermite
//!   basis, their residual `ηₙ(k)`, and the remainder scale `ε(k)`;
//! - **threshold**: current bounds over energy windows and localization
//!   of near-threshold states;
//! - **spectral**: electric potentials, semiclassical volumes `N₀(λ,V)`,
//!   effective kernels on the k-line, and Birman–Schwinger gap counting;
//! - **report**: batch experiment runners with CSV/JSON serialization
//!   (shared by the CLI).

pub mod error;
pub mod field;
pub mod fiber;
pub mod hermite;
pub mod linalg;
pub mod quad;
pub mod quasimode;
pub mod report;
pub mod spectral;
pub mod threshold;

pub use error::{Error, Result};
pub use field::MagneticProfile;
pub use fiber::{BandTable, FiberEigenpair, FiberGrid, SolveOptions};
pub use hermite::HermiteExpansion;
