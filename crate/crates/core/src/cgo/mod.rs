//! Complex-geometrical-optics machinery: frequency frames, the constant
//! coefficient operator Δ + 2ζ·∇ in Fourier space, and the remainder solver.

pub mod frame;
pub mod solver;
pub mod symbol;
pub mod zeta;

pub use frame::make_frame;
pub use solver::{
    remainder_decay, solve_remainder, Grounding, Method, RemainderSolution, SolverConfig,
};
pub use symbol::{faddeev_symbol, resonance_guard, SymbolTable};
pub use zeta::{make_zeta, ComplexFrequency};
