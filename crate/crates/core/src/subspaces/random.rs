//! Deterministic random test potentials inside W_R.

use super::basis::SubspaceBasis;
use super::{BoxConstraint, Family};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Draw a random element of W_R, deterministically from the seed.
///
/// Coefficients are uniform (real-valued for the piecewise families, complex
/// for band-limited ones); the result is rescaled so the grid sup norm lands
/// in (0, R]. For band-limited elements the rescaling uses a 2x oversampled
/// sup so the continuous function stays inside the box as well.
pub fn random_element<T: Scalar>(
    basis: &SubspaceBasis<T>,
    box_c: &BoxConstraint,
    seed: u64,
) -> Result<Field<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complex_coeffs = matches!(basis.spec().family, Family::Bandlimited { .. });
    let mut f = Field::zeros(*basis.grid());
    for el in basis.elements() {
        let re = rng.gen_range(-1.0f64..1.0);
        let im = if complex_coeffs {
            rng.gen_range(-1.0f64..1.0)
        } else {
            0.0
        };
        f.axpy(Complex::new(T::cast(re), T::cast(im)), &el.samples)?;
    }
    let sup = if complex_coeffs {
        super::project::sup_norm_oversampled(&f, 2)?
    } else {
        f.sup_norm()
    };
    if sup > T::zero() {
        let target = T::cast(box_c.r * rng.gen_range(0.5f64..1.0));
        f.scale(Complex::new(target / sup, T::zero()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::TorusGrid;
    use crate::subspaces::{build_basis, Partition, SubspaceSpec};

    fn basis() -> SubspaceBasis<f64> {
        let grid = TorusGrid::new(3, 16).unwrap();
        build_basis(
            &SubspaceSpec::piecewise(3, Partition::dyadic(3, 1)),
            &grid,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_in_the_seed() {
        let b = basis();
        let r = BoxConstraint { r: 5.0 };
        let f1 = random_element(&b, &r, 99).unwrap();
        let f2 = random_element(&b, &r, 99).unwrap();
        assert_eq!(f1.values(), f2.values());
    }

    #[test]
    fn stays_inside_the_box() {
        let b = basis();
        let r = BoxConstraint { r: 5.0 };
        for seed in 0..20 {
            let f = random_element(&b, &r, seed).unwrap();
            assert!(f.sup_norm() <= 5.0 + 1e-12);
        }
    }

    #[test]
    fn different_seeds_differ() {
        let b = basis();
        let r = BoxConstraint { r: 5.0 };
        let f1 = random_element(&b, &r, 1).unwrap();
        let f2 = random_element(&b, &r, 2).unwrap();
        assert!(f1.dist_l2(&f2).unwrap() > 1e-6);
    }
}
