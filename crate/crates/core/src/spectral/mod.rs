//! Torus grids, discrete Fourier analysis and frequency orderings.

pub mod field;
pub mod fourier;
pub mod gamma;
pub mod grid;
pub mod ordering;

pub use field::Field;
pub use fourier::{forward_transform, inverse_transform, Spectrum};
pub use gamma::{gamma_s, GammaEstimate};
pub use grid::TorusGrid;
pub use ordering::{make_ordering, FreqOrdering, OrderingKind};
