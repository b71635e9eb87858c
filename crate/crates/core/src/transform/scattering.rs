//! The nonlinear scattering maps B and U = F + B.

use super::{MeasurementVector, TSchedule};
use crate::cgo::{make_zeta, solve_remainder, SolverConfig};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::spectral::fourier::{exp_field, forward_transform};
use crate::spectral::grid::TorusGrid;
use crate::spectral::ordering::FreqOrdering;
use num_complex::Complex;
use rayon::prelude::*;

/// Flat storage indices of the first `n` ordered frequencies; errors if any
/// falls outside the grid box (the grid must resolve every channel).
pub fn ordered_slots(
    grid: &TorusGrid,
    ordering: &FreqOrdering,
    n: usize,
) -> Result<Vec<usize>> {
    (0..n)
        .map(|l| {
            let k = ordering.point(l);
            grid.flat_of_freq(k)
                .ok_or_else(|| Error::FrequencyOutOfBox { k: k.to_vec() })
        })
        .collect()
}

/// One channel of B: the bilinear pairing ⟨q, e_{k_l} r_l⟩ = ∫ q e^{-2πik_l·x} r_l dx.
fn channel_b<T: Scalar>(
    q: &Field<T>,
    k: &[i64],
    schedule: &TSchedule,
    cfg: &SolverConfig,
) -> Result<Complex<T>> {
    let t = T::cast(schedule.t_for(k));
    let (freq, _) = cfg.guard(make_zeta::<T>(k, t)?)?;
    let sol = solve_remainder(q, &freq, cfg)?;
    let ek = exp_field::<T>(&cfg.grid, k, -1.0);
    let qr = q.mul_pointwise(&sol.r)?;
    qr.pairing(&ek)
}

/// B(q) over the first `n` ordered channels. Channels solve independently
/// and in parallel; the output order is fixed by the ordering.
pub fn scattering_b<T: Scalar>(
    q: &Field<T>,
    ordering: &FreqOrdering,
    schedule: &TSchedule,
    cfg: &SolverConfig,
    n: usize,
) -> Result<Vec<Complex<T>>> {
    if q.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    ordered_slots(&cfg.grid, ordering, n)?;
    (0..n)
        .into_par_iter()
        .map(|l| channel_b(q, ordering.point(l), schedule, cfg))
        .collect()
}

/// U(q) = F(q) + B(q) over the first `n` ordered channels.
pub fn scattering_u<T: Scalar>(
    q: &Field<T>,
    ordering: &FreqOrdering,
    schedule: &TSchedule,
    cfg: &SolverConfig,
    n: usize,
) -> Result<MeasurementVector<T>> {
    let slots = ordered_slots(&cfg.grid, ordering, n)?;
    let qhat = forward_transform(q);
    let b = scattering_b(q, ordering, schedule, cfg, n)?;
    let values = slots
        .iter()
        .zip(b)
        .map(|(&slot, bl)| qhat.coeffs()[slot] + bl)
        .collect();
    Ok(MeasurementVector {
        values,
        ordering: ordering.kind(),
        schedule: *schedule,
        solver: *cfg,
    })
}
