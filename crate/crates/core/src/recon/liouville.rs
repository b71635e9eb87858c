//! The forward Liouville transform σ ↦ q = Δ√σ/√σ, turning a conductivity
//! into a Schrödinger potential. The Laplacian is applied spectrally, so σ
//! should be smooth (band-limited on the grid) and strictly positive.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::spectral::fourier::{forward_transform, inverse_transform};
use num_complex::Complex;

pub fn liouville_potential<T: Scalar>(sigma: &Field<T>) -> Result<Field<T>> {
    let grid = *sigma.grid();
    // σ must be real and strictly positive on the nodes
    let mut min_re = T::infinity();
    let mut max_im = T::zero();
    for v in sigma.values() {
        min_re = min_re.min(v.re);
        max_im = max_im.max(v.im.abs());
    }
    if max_im > T::cast(1e-12) {
        return Err(Error::PositivityViolation(max_im.to_f64_lossy()));
    }
    if !(min_re > T::zero()) {
        return Err(Error::PositivityViolation(min_re.to_f64_lossy()));
    }

    let root = Field::from_values(
        grid,
        sigma
            .values()
            .iter()
            .map(|v| Complex::new(v.re.sqrt(), T::zero()))
            .collect(),
    )?;

    let mut spec = forward_transform(&root);
    let d = grid.dim();
    let mut m = vec![0i64; d];
    let four_pi_sq = T::cast(4.0) * T::PI() * T::PI();
    for (flat, c) in spec.coeffs_mut().iter_mut().enumerate() {
        grid.freq_at(flat, &mut m);
        let norm_sq: T = m.iter().map(|&x| T::cast((x * x) as f64)).sum();
        *c = c.scale(-four_pi_sq * norm_sq);
    }
    let laplacian = inverse_transform(&spec);

    let values = laplacian
        .values()
        .iter()
        .zip(root.values())
        .map(|(l, r)| l / r.re)
        .collect();
    Field::from_values(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::TorusGrid;
    use std::f64::consts::PI;

    fn grid() -> TorusGrid {
        TorusGrid::new(3, 16).unwrap()
    }

    #[test]
    fn unit_conductivity_gives_zero_potential() {
        let sigma = Field::from_fn(grid(), |_| Complex::new(1.0f64, 0.0));
        let q = liouville_potential(&sigma).unwrap();
        assert!(q.sup_norm() < 1e-12);
    }

    #[test]
    fn cosine_profile_matches_closed_form() {
        // σ = (1 + a cos 2πx₁)² -> q = -4π²a cos(2πx₁) / (1 + a cos 2πx₁)
        let a = 0.3;
        let sigma = Field::from_fn(grid(), |x| {
            let c = 1.0 + a * (2.0 * PI * x[0]).cos();
            Complex::new(c * c, 0.0)
        });
        let q = liouville_potential(&sigma).unwrap();
        let expected = Field::from_fn(grid(), |x| {
            let c = (2.0 * PI * x[0]).cos();
            Complex::new(-4.0 * PI * PI * a * c / (1.0 + a * c), 0.0)
        });
        let err = q.sub(&expected).unwrap().sup_norm();
        assert!(err < 1e-8, "max deviation {err}");
    }

    #[test]
    fn zero_node_is_rejected() {
        let g = grid();
        let mut values = vec![Complex::new(1.0f64, 0.0); g.len()];
        values[5] = Complex::new(0.0, 0.0);
        let sigma = Field::from_values(g, values).unwrap();
        assert!(matches!(
            liouville_potential(&sigma),
            Err(Error::PositivityViolation(_))
        ));
    }

    #[test]
    fn complex_sigma_is_rejected() {
        let sigma = Field::from_fn(grid(), |_| Complex::new(1.0f64, 0.5));
        assert!(matches!(
            liouville_potential(&sigma),
            Err(Error::PositivityViolation(_))
        ));
    }
}
