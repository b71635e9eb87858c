//! Orthogonal projection onto span(W) and convex projection onto W_R.

use super::basis::SubspaceBasis;
use super::BoxConstraint;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::spectral::fourier::{forward_transform, inverse_transform, Spectrum};
use crate::spectral::grid::TorusGrid;
use num_complex::Complex;
use num_traits::Zero;

/// Orthogonal projection P_W f = Σ_i ⟨f, w_i⟩ w_i.
pub fn project_subspace<T: Scalar>(f: &Field<T>, basis: &SubspaceBasis<T>) -> Result<Field<T>> {
    if f.grid() != basis.grid() {
        return Err(Error::GridMismatch);
    }
    let mut out = Field::zeros(*f.grid());
    for el in basis.elements() {
        let c = f.inner(&el.samples)?;
        out.axpy(c, &el.samples)?;
    }
    Ok(out)
}

fn clip_pointwise<T: Scalar>(f: &mut Field<T>, r: T) {
    f.update(|values| {
        for v in values.iter_mut() {
            let n = v.norm();
            if n > r {
                *v = v.scale(r / n);
            }
        }
    });
}

/// Sup norm of the band-limited interpolant of `f`, sampled on a grid
/// refined by `factor`. Used as the feasibility check where the grid sup
/// norm may undershoot the true sup.
pub fn sup_norm_oversampled<T: Scalar>(f: &Field<T>, factor: usize) -> Result<T> {
    let grid = *f.grid();
    let fine = TorusGrid::new(grid.dim(), grid.points_per_axis() * factor.max(1))?;
    let spec = forward_transform(f);
    let mut padded = Spectrum::zeros(fine);
    let d = grid.dim();
    let mut k = vec![0i64; d];
    for (flat, &c) in spec.coeffs().iter().enumerate() {
        if c != Complex::zero() {
            grid.freq_at(flat, &mut k);
            padded.set(&k, c)?;
        }
    }
    Ok(inverse_transform(&padded).sup_norm())
}

/// Dykstra's alternating projections between span(W) and the sup-norm ball.
fn dykstra<T: Scalar>(
    f: &Field<T>,
    basis: &SubspaceBasis<T>,
    r: T,
    tol: T,
    cap: usize,
) -> Result<Field<T>> {
    let mut x = f.clone();
    let mut p = Field::zeros(*f.grid());
    let mut q = Field::zeros(*f.grid());
    let one = Complex::new(T::one(), T::zero());
    let neg = Complex::new(-T::one(), T::zero());

    let mut prev = x.clone();
    for iter in 0..cap {
        // y = P_ball(x + p)
        let mut y = x.clone();
        y.axpy(one, &p)?;
        let before = y.clone();
        clip_pointwise(&mut y, r);
        p = before;
        p.axpy(neg, &y)?;
        // x = P_span(y + q)
        let mut z = y.clone();
        z.axpy(one, &q)?;
        x = project_subspace(&z, basis)?;
        q = z;
        q.axpy(neg, &x)?;

        if iter > 0 && x.dist_l2(&prev)? <= tol {
            return Ok(x);
        }
        prev = x.clone();
    }
    Err(Error::ProjectionCap(cap))
}

/// Default iteration cap for Dykstra.
pub const DYKSTRA_CAP: usize = 10_000;

/// L²-nearest point of W_R = {w ∈ span(W) : ‖w‖_∞ ≤ R}.
///
/// For piecewise-constant families (including Haar) the constraints decouple
/// across cells, so the projection is pointwise clipping of P_W f. For
/// band-limited families it is computed with Dykstra's algorithm; there the
/// sup norm is evaluated on the grid nodes, an approximation that can be
/// audited with [`sup_norm_oversampled`].
pub fn project_box<T: Scalar>(
    f: &Field<T>,
    basis: &SubspaceBasis<T>,
    box_c: &BoxConstraint,
    tol: f64,
) -> Result<Field<T>> {
    let r = T::cast(box_c.r);
    if basis.clips_pointwise() {
        let mut w = project_subspace(f, basis)?;
        clip_pointwise(&mut w, r);
        Ok(w)
    } else {
        dykstra(f, basis, r, T::cast(tol), DYKSTRA_CAP)
    }
}
