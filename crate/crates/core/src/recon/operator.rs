//! The fixed-point operator A(q) = P_{W_R}(F⁻¹y + F⁻¹P_N^⊥Fq - F⁻¹P_N B(q)).

use super::ReconConfig;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::spectral::fourier::{forward_transform, inverse_transform};
use crate::spectral::ordering::FreqOrdering;
use crate::subspaces::project_box;
use crate::transform::{ordered_slots, scattering_b, MeasurementVector};
use num_complex::Complex;

/// A(q) together with the by-products of computing it.
#[derive(Clone, Debug)]
pub struct StepOutput<T: Scalar> {
    pub field: Field<T>,
    /// B(q)_l of the input iterate.
    pub b_values: Vec<Complex<T>>,
    /// U(q)_l = q̂(k_l) + B(q)_l of the input iterate.
    pub u_values: Vec<Complex<T>>,
    /// ‖y - P_N U(q)‖_{ℓ²} of the input iterate.
    pub data_residual: T,
}

/// Apply A once. The input is projected into W_R first, matching the domain
/// of the operator.
pub fn apply_step<T: Scalar>(
    q: &Field<T>,
    y: &MeasurementVector<T>,
    cfg: &ReconConfig<T>,
    ordering: &FreqOrdering,
) -> Result<StepOutput<T>> {
    let n = cfg.n.min(y.n());
    let slots = ordered_slots(&cfg.solver.grid, ordering, n)?;
    let q = project_box(q, &cfg.basis, &cfg.box_c, cfg.projection_tol)?;

    let b_values = scattering_b(&q, ordering, &cfg.schedule, &cfg.solver, n)?;
    let mut spectrum = forward_transform(&q);
    let mut u_values = Vec::with_capacity(n);
    let mut residual_sq = T::zero();
    for (l, &slot) in slots.iter().enumerate() {
        let u = spectrum.coeffs()[slot] + b_values[l];
        residual_sq += (y.values[l] - u).norm_sqr();
        u_values.push(u);
        // data in, current-tail kept, scattering part removed
        spectrum.coeffs_mut()[slot] = y.values[l] - b_values[l];
    }
    let assembled = inverse_transform(&spectrum);
    let field = project_box(&assembled, &cfg.basis, &cfg.box_c, cfg.projection_tol)?;
    Ok(StepOutput {
        field,
        b_values,
        u_values,
        data_residual: residual_sq.sqrt(),
    })
}

/// A(q), discarding the by-products.
pub fn apply_a<T: Scalar>(
    q: &Field<T>,
    y: &MeasurementVector<T>,
    cfg: &ReconConfig<T>,
) -> Result<Field<T>> {
    let ordering = cfg.ordering(y.ordering);
    Ok(apply_step(q, y, cfg, &ordering)?.field)
}
