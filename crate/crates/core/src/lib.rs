//! Finite-measurement scattering transforms on the d-torus.
//!
//! This crate simulates the nonlinear measurement operator U = F + B built
//! from complex-geometrical-optics (CGO) solutions of the Schrödinger
//! equation on T^d = [0,1]^d, computes how many ordered Fourier channels N
//! are needed for a given finite-dimensional prior subspace W (the balancing
//! computation), and reconstructs potentials from the finite data
//! y = P_N U(q) with a globally convergent fixed-point iteration.
//!
//! Numeric kernels are generic over the scalar type through [`Scalar`]
//! (f32 or f64); the concrete aliases below fix f64, which is what the CLI
//! and the verification suite use.

pub mod cgo;
pub mod error;
pub mod io;
pub mod linalg;
pub mod recon;
pub mod scalar;
pub mod spectral;
pub mod subspaces;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use spectral::field::Field;
pub use spectral::fourier::Spectrum;
pub use spectral::grid::TorusGrid;
pub use spectral::ordering::{make_ordering, FreqOrdering, OrderingKind};

/// f64 field on a torus grid.
pub type Field64 = Field<f64>;
/// f64 spectrum (Fourier coefficients over the grid frequency box).
pub type Spectrum64 = Spectrum<f64>;
/// f64 CGO frequency data.
pub type Frequency64 = cgo::ComplexFrequency<f64>;
/// f64 orthonormal basis of a prior subspace.
pub type Basis64 = subspaces::SubspaceBasis<f64>;
/// f64 measurement vector.
pub type Measurement64 = transform::MeasurementVector<f64>;
