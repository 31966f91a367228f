//! Epistemically restricted phase-space representations of prime-dimensional
//! quantum systems.
//!
//! The crate decomposes the three components of a quantum experiment — a
//! preparation, a chain of unital transformations, and a measurement
//! outcome — into families of genuinely non-negative classical probability
//! functions on a discrete phase space, one family member per *framework*
//! (a striation of phase space, or a symplectic matrix drawn from a special
//! subgroup). The quantum prediction is recovered from the classical ones by
//! summing their nonrandom parts, and the crate ships the machinery to do
//! that reconstruction and to check it against a conventional Hilbert-space
//! oracle:
//!
//! - [`phasespace`]: lines, striations, symplectic matrices over Z_d, and
//!   the search for nonsingular-difference subgroups.
//! - [`linalg`]: small dense complex matrices and a Hermitian eigensolver.
//! - [`hilbert`]: the Hilbert-space oracle — phase-point operators, Wigner
//!   functions, channels, transition quasiprobabilities.
//! - [`epistemic`]: the restricted probability functions (R-functions) for
//!   preparations, measurements, and transformations.
//! - [`reconstruct`]: nonrandom parts, the reconstruction sum, composition
//!   rules, and validity criteria.
//! - [`qubit`]: the complete d = 2 classification, including the finite
//!   24-element permutation theory.
//!
//! The library is `no_std plus alloc`; everything IO-flavored lives in the
//! companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod epistemic;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod phasespace;
pub mod qubit;
pub mod reconstruct;

pub use error::Error;

/// Default absolute tolerance for numerical equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;
