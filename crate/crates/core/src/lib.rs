//! Simulation toolkit for a driven optical cavity coupled to a Rydberg-blocked
//! atomic ensemble ("super atom").
//!
//! The ensemble-cavity system is modeled on a truncated product space of an
//! atomic excitation ladder and a photon Fock space. The crate provides
//!
//! - [`hilbert`]: basis indexing, state vectors and sparse operators,
//! - [`models`]: Hamiltonians and jump operators of the effective ladder model
//!   and of the full three-level collective model used as an
//!   adiabatic-elimination oracle,
//! - [`spectral`]: dressed-state spectra, multi-photon resonance locations and
//!   perturbative line strengths,
//! - [`dynamics`]: a Monte-Carlo wave-function (quantum jump) trajectory
//!   engine plus Lindblad master-equation propagation and steady states,
//! - [`observables`]: transmission spectra, click statistics, bursts and
//!   intensity correlations,
//! - [`stats`]: small statistical helpers (Kolmogorov-Smirnov, bootstrap).
//!
//! All core math is generic over the floating-point scalar through
//! [`scalar::Scalar`]; concrete `f64`/`f32` aliases live at the crate root.
//! Frequencies and rates are angular, in rad/us; time is in us. Configuration
//! values quoted in MHz convert as `omega = 2*pi*value`.

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod scalar;
pub mod spectral;
pub mod stats;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Complex amplitude over a generic scalar.
pub type Amplitude<T> = num_complex::Complex<T>;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type BasisSpec = hilbert::BasisSpec;
pub type StateVector64 = hilbert::StateVector<f64>;
pub type StateVector32 = hilbert::StateVector<f32>;
pub type SparseOperator64 = hilbert::SparseOperator<f64>;
pub type SparseOperator32 = hilbert::SparseOperator<f32>;
pub type PhysicalParams64 = models::PhysicalParams<f64>;
pub type PhysicalParams32 = models::PhysicalParams<f32>;
pub type TrajectoryConfig64 = dynamics::TrajectoryConfig<f64>;
pub type TrajectoryRecord64 = dynamics::TrajectoryRecord<f64>;
pub type DensityMatrix64 = dynamics::DensityMatrix<f64>;
pub type SpectrumResult64 = observables::SpectrumResult<f64>;
