//! Discrete Fourier transform matching the analytic convention
//! q̂(k) = ∫ q(x) e^{-2πik·x} dx, realized by the trapezoidal rule
//! (1/n^d) Σ_j f(x_j) e^{-2πik·x_j}.
//!
//! With this normalization the map field → coefficients is unitary from the
//! grid L² norm to ℓ², and the coefficients are exact Fourier coefficients
//! for trigonometric polynomials of per-axis degree < n/2.

use super::field::Field;
use super::grid::TorusGrid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;
use num_traits::Zero;
use rustfft::FftPlanner;

/// Fourier coefficients over the grid frequency box, stored in the same
/// row-major layout as the field samples (frequency k at storage index
/// k mod n per axis).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T: Scalar> {
    grid: TorusGrid,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex::zero(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Coefficient at a frequency vector.
    pub fn get(&self, k: &[i64]) -> Result<Complex<T>> {
        let flat = self
            .grid
            .flat_of_freq(k)
            .ok_or_else(|| Error::FrequencyOutOfBox { k: k.to_vec() })?;
        Ok(self.coeffs[flat])
    }

    pub fn set(&mut self, k: &[i64], v: Complex<T>) -> Result<()> {
        let flat = self
            .grid
            .flat_of_freq(k)
            .ok_or_else(|| Error::FrequencyOutOfBox { k: k.to_vec() })?;
        self.coeffs[flat] = v;
        Ok(())
    }

    /// ℓ² norm of the coefficients; equals the grid L² norm of the field.
    pub fn l2_norm(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<T>()
            .sqrt()
    }
}

/// ‖∇f‖_{L²} computed spectrally: (Σ_m (2π|m|)² |f̂(m)|²)^{1/2}.
pub fn gradient_l2_norm<T: Scalar>(s: &Spectrum<T>) -> T {
    let grid = *s.grid();
    let d = grid.dim();
    let two_pi = T::PI() + T::PI();
    let mut m = vec![0i64; d];
    let mut acc = T::zero();
    for (flat, c) in s.coeffs().iter().enumerate() {
        grid.freq_at(flat, &mut m);
        let norm_sq: T = m.iter().map(|&x| T::cast((x * x) as f64)).sum();
        acc += two_pi * two_pi * norm_sq * c.norm_sqr();
    }
    acc.sqrt()
}

/// In-place FFT along every axis. `forward` uses e^{-2πi·}, inverse e^{+2πi·};
/// both are unnormalized (rustfft convention).
pub(crate) fn fft_all_axes<T: Scalar>(grid: &TorusGrid, data: &mut [Complex<T>], forward: bool) {
    let n = grid.points_per_axis();
    let d = grid.dim();
    let len = grid.len();
    let mut planner = FftPlanner::<T>::new();
    let fft = if forward {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    let mut scratch = vec![Complex::zero(); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex::zero(); n];

    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32);
        let block = stride * n;
        let mut base = 0;
        while base < len {
            for off in 0..stride {
                let start = base + off;
                if stride == 1 {
                    fft.process_with_scratch(&mut data[start..start + n], &mut scratch);
                } else {
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[start + i * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[start + i * stride] = *v;
                    }
                }
            }
            base += block;
        }
    }
}

/// Trapezoidal-rule Fourier coefficients of a sampled field.
pub fn forward_transform<T: Scalar>(f: &Field<T>) -> Spectrum<T> {
    let grid = *f.grid();
    let mut coeffs = f.values().to_vec();
    fft_all_axes(&grid, &mut coeffs, true);
    let scale = T::cast(grid.spacing().powi(grid.dim() as i32));
    for c in &mut coeffs {
        *c = c.scale(scale);
    }
    Spectrum { grid, coeffs }
}

/// Inverse of [`forward_transform`]: f(x_j) = Σ_k q̂(k) e^{+2πik·x_j}.
pub fn inverse_transform<T: Scalar>(s: &Spectrum<T>) -> Field<T> {
    let grid = *s.grid();
    let mut values = s.coeffs().to_vec();
    fft_all_axes(&grid, &mut values, false);
    Field::from_values(grid, values).expect("layout preserved")
}

/// Samples of the exponential e^{sign·2πi k·x} on the grid, built from
/// per-axis tables. Cheaper than an FFT when a single frequency is needed.
pub fn exp_field<T: Scalar>(grid: &TorusGrid, k: &[i64], sign: f64) -> Field<T> {
    let n = grid.points_per_axis();
    let d = grid.dim();
    let tables: Vec<Vec<Complex<T>>> = (0..d)
        .map(|a| {
            (0..n)
                .map(|j| {
                    let phase = sign * 2.0 * std::f64::consts::PI * (k[a] * j as i64) as f64
                        / n as f64;
                    Complex::new(T::cast(phase.cos()), T::cast(phase.sin()))
                })
                .collect()
        })
        .collect();
    let mut idx = vec![0usize; d];
    let values = (0..grid.len())
        .map(|flat| {
            grid.decode(flat, &mut idx);
            let mut v = Complex::new(T::one(), T::zero());
            for a in 0..d {
                v *= tables[a][idx[a]];
            }
            v
        })
        .collect();
    Field::from_values(*grid, values).expect("layout preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> TorusGrid {
        TorusGrid::new(3, 8).unwrap()
    }

    fn random_field(grid: TorusGrid, seed: u64) -> Field<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len())
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Field::from_values(grid, values).unwrap()
    }

    /// O(n^{2d}) quadrature oracle for the forward transform.
    fn naive_dft(f: &Field<f64>) -> Spectrum<f64> {
        let grid = *f.grid();
        let d = grid.dim();
        let mut out = Spectrum::zeros(grid);
        let mut k = vec![0i64; d];
        let mut x = vec![0.0f64; d];
        let w = grid.spacing().powi(d as i32);
        for flat_k in 0..grid.len() {
            grid.freq_at(flat_k, &mut k);
            let mut acc = Complex::new(0.0, 0.0);
            for flat_j in 0..grid.len() {
                grid.node_at(flat_j, &mut x);
                let phase: f64 = -2.0
                    * std::f64::consts::PI
                    * k.iter().zip(&x).map(|(&ki, &xi)| ki as f64 * xi).sum::<f64>();
                acc += f.values()[flat_j] * Complex::new(phase.cos(), phase.sin());
            }
            out.coeffs_mut()[flat_k] = acc * w;
        }
        out
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let f = Field::from_fn(grid(), |_| Complex::new(3.5f64, 0.0));
        let s = forward_transform(&f);
        assert!((s.get(&[0, 0, 0]).unwrap() - Complex::new(3.5, 0.0)).norm() < 1e-13);
        let off: f64 = s
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 0)
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-14);
    }

    #[test]
    fn exponential_maps_to_single_coefficient() {
        let g = grid();
        let k0 = [2i64, -1, 3];
        let f = exp_field::<f64>(&g, &k0, 1.0);
        let s = forward_transform(&f);
        assert!((s.get(&k0).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-13);
        let total: f64 = s.coeffs().iter().map(|c| c.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_naive_quadrature_on_random_field() {
        let f = random_field(grid(), 11);
        let s = forward_transform(&f);
        let o = naive_dft(&f);
        let err = s
            .coeffs()
            .iter()
            .zip(o.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "max coeff error {err}");
    }

    #[test]
    fn roundtrip_is_identity() {
        let f = random_field(grid(), 7);
        let back = inverse_transform(&forward_transform(&f));
        let rel = f.sub(&back).unwrap().l2_norm() / f.l2_norm();
        assert!(rel < 1e-12);
    }

    #[test]
    fn zero_coefficients_give_zero_field() {
        let s = Spectrum::<f64>::zeros(grid());
        let f = inverse_transform(&s);
        assert!(f.l2_norm() == 0.0);
    }

    #[test]
    fn single_coefficient_synthesizes_exponential() {
        let g = grid();
        let mut s = Spectrum::<f64>::zeros(g);
        let k0 = [1i64, 4, -3];
        s.set(&k0, Complex::new(1.0, 0.0)).unwrap();
        let f = inverse_transform(&s);
        let expected = exp_field::<f64>(&g, &k0, 1.0);
        assert!(f.sub(&expected).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn parseval_holds_for_random_fields() {
        for seed in 0..100 {
            let f = random_field(grid(), seed);
            let s = forward_transform(&f);
            assert!((s.l2_norm() - f.l2_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn works_in_f32() {
        let g = grid();
        let f = exp_field::<f32>(&g, &[1, 0, 0], 1.0);
        let s = forward_transform(&f);
        assert!((s.get(&[1, 0, 0]).unwrap() - Complex::new(1.0f32, 0.0)).norm() < 1e-5);
    }
}
