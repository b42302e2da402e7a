//! Floquet-Bloch numerics for the discrete Heisenberg group.
//!
//! Finite unitary representations and Fourier inversion ([`reps`]), Harper
//! band structure ([`harper`]), oscillator spectra and spectral zeta values
//! ([`oscillators`]), random-walk return probabilities ([`walks`]) and
//! Lie integrals of Heisenberg-valued one-forms ([`chen`]).

pub mod chen;
pub mod error;
pub mod heis;
pub mod oscillators;
pub mod harper;
pub mod reps;
pub mod spectra;
pub mod walks;

pub use error::{Error, Result};
pub use heis::GroupElement;
