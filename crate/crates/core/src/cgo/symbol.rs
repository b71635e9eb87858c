//! Fourier symbol of Δ + 2ζ·∇, its grounded inverse, and the resonance guard.

use super::zeta::ComplexFrequency;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::grid::TorusGrid;
use num_complex::Complex;
use num_traits::Zero;

/// σ(m) = -4π²|m|² + 4πi ζ·m, the action of Δ + 2ζ·∇ on e^{2πim·x}.
pub fn faddeev_symbol<T: Scalar>(m: &[i64], zeta: &[Complex<T>]) -> Complex<T> {
    let pi = T::PI();
    let four_pi = T::cast(4.0) * pi;
    let norm_sq: T = m.iter().map(|&c| T::cast((c * c) as f64)).sum();
    let mut dot = Complex::<T>::zero();
    for (&ma, za) in m.iter().zip(zeta) {
        dot += za.scale(T::cast(ma as f64));
    }
    Complex::new(-four_pi * pi * norm_sq, T::zero()) + Complex::new(T::zero(), four_pi) * dot
}

/// The grounded inverse symbol of one channel, tabulated over the grid
/// frequency box.
///
/// Grounded modes are the characteristic sublattice {m : ξ·m = η·m = 0}.
/// On that sublattice σ(m) = 4π²(k·m - |m|²) does not depend on t at all:
/// it vanishes identically at m = 0 and m = k (no nudge can move it), and on
/// the remaining sublattice points it stays O(1) while every other mode
/// grows linearly in t. Zeroing the inverse there keeps the channel
/// well-posed and preserves the 1/t decay of the remainder.
#[derive(Clone, Debug)]
pub struct SymbolTable<T: Scalar> {
    symbol: Vec<Complex<T>>,
    inverse: Vec<Complex<T>>,
    grounded: Vec<bool>,
    min_offground: T,
    argmin: Vec<i64>,
    max_offground: T,
}

impl<T: Scalar> SymbolTable<T> {
    pub fn build(grid: &TorusGrid, freq: &ComplexFrequency<T>) -> Self {
        let d = grid.dim();
        let len = grid.len();
        let xi: Vec<f64> = freq.xi.iter().map(|&x| x.to_f64_lossy()).collect();
        let eta: Vec<f64> = freq.eta.iter().map(|&x| x.to_f64_lossy()).collect();

        let mut symbol = Vec::with_capacity(len);
        let mut inverse = Vec::with_capacity(len);
        let mut grounded = Vec::with_capacity(len);
        let mut min_off = T::infinity();
        let mut max_off = T::zero();
        let mut argmin = vec![0i64; d];
        let mut m = vec![0i64; d];
        for flat in 0..len {
            grid.freq_at(flat, &mut m);
            let norm = (m.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
            let tol = 1e-9 * (1.0 + norm);
            let xi_dot: f64 = m.iter().zip(&xi).map(|(&c, &x)| c as f64 * x).sum();
            let eta_dot: f64 = m.iter().zip(&eta).map(|(&c, &x)| c as f64 * x).sum();
            let on_sublattice = xi_dot.abs() <= tol && eta_dot.abs() <= tol;

            let s = faddeev_symbol(&m, &freq.zeta1);
            symbol.push(s);
            grounded.push(on_sublattice);
            if on_sublattice {
                inverse.push(Complex::zero());
            } else {
                let a = s.norm();
                if a < min_off {
                    min_off = a;
                    argmin.copy_from_slice(&m);
                }
                max_off = max_off.max(a);
                inverse.push(s.finv());
            }
        }
        Self {
            symbol,
            inverse,
            grounded,
            min_offground: min_off,
            argmin,
            max_offground: max_off,
        }
    }

    pub fn symbol(&self) -> &[Complex<T>] {
        &self.symbol
    }

    pub fn grounded(&self) -> &[bool] {
        &self.grounded
    }

    /// Smallest |σ(m)| over the non-grounded modes of the box.
    pub fn min_offground(&self) -> T {
        self.min_offground
    }

    pub fn max_offground(&self) -> T {
        self.max_offground
    }

    /// Apply the grounded inverse pointwise.
    pub fn apply_inverse(&self, v: &mut [Complex<T>]) {
        for (x, g) in v.iter_mut().zip(&self.inverse) {
            *x *= g;
        }
    }

    /// ℓ² norm over non-grounded modes.
    pub fn offground_norm(&self, v: &[Complex<T>]) -> T {
        v.iter()
            .zip(&self.grounded)
            .filter(|(_, &g)| !g)
            .map(|(x, _)| x.norm_sqr())
            .sum::<T>()
            .sqrt()
    }
}

/// Nudge t multiplicatively until the non-grounded symbol minimum clears the
/// threshold `resonance_delta * t`. Accidental near-resonances move with t;
/// the t-independent sublattice is excluded by grounding.
pub fn resonance_guard<T: Scalar>(
    freq: ComplexFrequency<T>,
    grid: &TorusGrid,
    resonance_delta: f64,
    nudge_factor: f64,
    max_nudges: usize,
) -> Result<(ComplexFrequency<T>, SymbolTable<T>)> {
    let mut freq = freq;
    for nudge in 0..=max_nudges {
        let table = SymbolTable::build(grid, &freq);
        let threshold = T::cast(resonance_delta) * freq.t.max(T::one());
        if table.min_offground() >= threshold {
            return Ok((freq, table));
        }
        if nudge == max_nudges {
            return Err(Error::GuardFailure {
                nudges: max_nudges,
                min_abs: table.min_offground().to_f64_lossy(),
                m: table.argmin.clone(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        freq = freq.with_t(freq.t * T::cast(nudge_factor))?;
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgo::zeta::make_zeta;
    use std::f64::consts::PI;

    #[test]
    fn symbol_at_zero_mode_vanishes() {
        let f = make_zeta::<f64>(&[1, 0, 0], 2.0).unwrap();
        assert!(faddeev_symbol(&[0, 0, 0], &f.zeta1).norm() < 1e-14);
    }

    #[test]
    fn symbol_hand_values() {
        let f = make_zeta::<f64>(&[1, 0, 0], 2.0).unwrap();
        // m = k: -4π² + 4πi(-πi) = 0, for every t — the structural resonance
        assert!(faddeev_symbol(&[1, 0, 0], &f.zeta1).norm() < 1e-12);
        let f2 = make_zeta::<f64>(&[1, 0, 0], 97.31).unwrap();
        assert!(faddeev_symbol(&[1, 0, 0], &f2.zeta1).norm() < 1e-10);
        // m = (0,1,0): ζ₁·m = -2i, so σ = -4π² + 4πi·(-2i) = -4π² + 8π
        let got = faddeev_symbol(&[0, 1, 0], &f.zeta1);
        let want = Complex::new(-4.0 * PI * PI + 8.0 * PI, 0.0);
        assert!((got - want).norm() < 1e-12, "got {got} want {want}");
        // m = (0,0,1): ζ₁·m = √(4+π²), purely imaginary symbol part
        let got = faddeev_symbol(&[0, 0, 1], &f.zeta1);
        let radius = (4.0 + PI * PI).sqrt();
        let want = Complex::new(-4.0 * PI * PI, 4.0 * PI * radius);
        assert!((got - want).norm() < 1e-12, "got {got} want {want}");
    }

    #[test]
    fn grounded_set_is_the_k_line() {
        let grid = TorusGrid::new(3, 16).unwrap();
        let f = make_zeta::<f64>(&[1, 0, 0], 40.0).unwrap();
        let table = SymbolTable::build(&grid, &f);
        let mut m = vec![0i64; 3];
        for flat in 0..grid.len() {
            grid.freq_at(flat, &mut m);
            let on_line = m[1] == 0 && m[2] == 0;
            assert_eq!(table.grounded()[flat], on_line, "m = {m:?}");
        }
    }

    #[test]
    fn generic_t_passes_unchanged() {
        let grid = TorusGrid::new(3, 16).unwrap();
        let k = [2i64, 1, 0];
        let t = 40.0 * (2f64.sqrt()); // irrational-valued, generic
        let f = make_zeta::<f64>(&k, t).unwrap();
        let (out, table) = resonance_guard(f, &grid, 1e-6, 1.0 + 1e-4, 20).unwrap();
        assert_eq!(out.t, t);
        assert!(table.min_offground() >= 1e-6 * t);
    }

    #[test]
    fn accidental_resonance_gets_nudged() {
        // k = (1,0,0): σ((0,2,0)) = -16π² + 4πt·(ξ·m) with ξ = e₂, so the
        // real part vanishes at t = 2π and η·m = 0 makes it a true zero
        let grid = TorusGrid::new(3, 16).unwrap();
        let k = [1i64, 0, 0];
        let t = 2.0 * PI;
        let f = make_zeta::<f64>(&k, t).unwrap();
        let bad = SymbolTable::build(&grid, &f);
        assert!(bad.min_offground() < 1e-9);
        let (out, table) = resonance_guard(f, &grid, 1e-6, 1.0 + 1e-4, 50).unwrap();
        assert!(out.t > t);
        assert!(table.min_offground() >= 1e-6 * out.t);
    }

    #[test]
    fn zero_frequency_large_t_unchanged() {
        let grid = TorusGrid::new(3, 16).unwrap();
        let f = make_zeta::<f64>(&[0, 0, 0], 1000.0 * std::f64::consts::E).unwrap();
        let (out, _) = resonance_guard(f, &grid, 1e-6, 1.0 + 1e-4, 20).unwrap();
        assert_eq!(out.t, 1000.0 * std::f64::consts::E);
    }

    #[test]
    fn guard_failure_reports_offender() {
        let grid = TorusGrid::new(3, 16).unwrap();
        let f = make_zeta::<f64>(&[1, 0, 0], 2.0 * PI).unwrap();
        match resonance_guard(f, &grid, 1e-6, 1.0 + 1e-12, 2) {
            Err(Error::GuardFailure { m, .. }) => assert_eq!(m, vec![0, 2, 0]),
            other => panic!("expected guard failure, got {other:?}"),
        }
    }
}
