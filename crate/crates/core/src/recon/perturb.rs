//! Noise-perturbation experiments standing in for the Lipschitz stability
//! statement: the contraction converts a data perturbation δ into a
//! reconstruction error of at most 4‖δ‖ plus iteration tolerance.

use super::{reconstruct, ReconConfig};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::transform::MeasurementVector;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct PerturbationReport {
    pub noise_level: f64,
    /// ‖q̃ - q*‖_{L²} of the reconstruction from the perturbed data.
    pub recon_error: f64,
    /// The contraction bound 4‖δ‖ + iteration slack.
    pub bound: f64,
    pub converged: bool,
}

/// Perturb y with a random ℓ² direction of the given norm, reconstruct from
/// zero, and report the error against the truth.
pub fn perturbation_experiment<T: Scalar>(
    q_true: &Field<T>,
    y: &MeasurementVector<T>,
    noise_level: f64,
    cfg: &ReconConfig<T>,
    seed: u64,
) -> Result<PerturbationReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delta: Vec<Complex<T>> = (0..y.n())
        .map(|_| {
            Complex::new(
                T::cast(rng.gen_range(-1.0f64..1.0)),
                T::cast(rng.gen_range(-1.0f64..1.0)),
            )
        })
        .collect();
    let norm = delta
        .iter()
        .map(|v| v.norm_sqr())
        .sum::<T>()
        .sqrt();
    let scale = if norm > T::zero() {
        T::cast(noise_level) / norm
    } else {
        T::zero()
    };
    for v in delta.iter_mut() {
        *v = v.scale(scale);
    }

    let mut noisy = y.clone();
    for (v, d) in noisy.values.iter_mut().zip(&delta) {
        *v += d;
    }

    let q0 = Field::<T>::zeros(cfg.solver.grid);
    let out = reconstruct(&noisy, &q0, cfg, Some(q_true))?;
    let err = out.potential.dist_l2(q_true)?.to_f64_lossy();
    Ok(PerturbationReport {
        noise_level,
        recon_error: err,
        bound: 4.0 * noise_level + 1e-8,
        converged: out.converged,
    })
}
