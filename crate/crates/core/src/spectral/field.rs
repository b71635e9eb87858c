//! Complex-valued functions sampled on a torus grid.

use super::grid::TorusGrid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use num_complex::Complex;
use num_traits::Zero;

/// A complex scalar field sampled at the grid nodes.
///
/// The optional support mask realizes extension-by-zero of functions that
/// live on a subdomain: values outside the mask are kept exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Scalar> {
    grid: TorusGrid,
    values: Vec<Complex<T>>,
    support: Option<Vec<bool>>,
}

impl<T: Scalar> Field<T> {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            values: vec![Complex::zero(); grid.len()],
            support: None,
        }
    }

    pub fn from_values(grid: TorusGrid, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid,
            values,
            support: None,
        })
    }

    /// Sample a function of the node coordinates.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> Complex<T>) -> Self {
        let d = grid.dim();
        let mut x = vec![0.0f64; d];
        let values = (0..grid.len())
            .map(|flat| {
                grid.node_at(flat, &mut x);
                f(&x)
            })
            .collect();
        Self {
            grid,
            values,
            support: None,
        }
    }

    /// Attach a support mask, zeroing everything outside it.
    pub fn with_support(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.grid.len() {
            return Err(Error::GridMismatch);
        }
        for (v, &inside) in self.values.iter_mut().zip(&mask) {
            if !inside {
                *v = Complex::zero();
            }
        }
        self.support = Some(mask);
        Ok(self)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn support(&self) -> Option<&[bool]> {
        self.support.as_deref()
    }

    /// Mutable access to the samples. Re-applies the support mask afterwards,
    /// keeping the extension-by-zero invariant.
    pub fn update(&mut self, f: impl FnOnce(&mut [Complex<T>])) {
        f(&mut self.values);
        if let Some(mask) = &self.support {
            for (v, &inside) in self.values.iter_mut().zip(mask) {
                if !inside {
                    *v = Complex::zero();
                }
            }
        }
    }

    /// Grid L² norm: sqrt(h^d Σ |f(x_j)|²), the trapezoidal-rule L²(T^d) norm.
    pub fn l2_norm(&self) -> T {
        let w = T::cast(self.grid.spacing().powi(self.grid.dim() as i32));
        (self.values.iter().map(|v| v.norm_sqr()).sum::<T>() * w).sqrt()
    }

    /// Sup norm over the grid nodes.
    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Hermitian inner product ⟨f,g⟩ = h^d Σ f(x_j) conj(g(x_j)).
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let w = T::cast(self.grid.spacing().powi(self.grid.dim() as i32));
        let mut acc = Complex::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a * b.conj();
        }
        Ok(acc * w)
    }

    /// Bilinear pairing h^d Σ f(x_j) g(x_j), no conjugation.
    pub fn pairing(&self, other: &Self) -> Result<Complex<T>> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let w = T::cast(self.grid.spacing().powi(self.grid.dim() as i32));
        let mut acc = Complex::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc += a * b;
        }
        Ok(acc * w)
    }

    pub fn scale(&mut self, c: Complex<T>) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// self += c * other.
    pub fn axpy(&mut self, c: Complex<T>, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
            support: None,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
            support: None,
        })
    }

    pub fn dist_l2(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.l2_norm())
    }

    /// Pointwise product self ⊙ other.
    pub fn mul_pointwise(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self {
            grid: self.grid,
            values,
            support: None,
        })
    }
}
