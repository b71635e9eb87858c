//! Empirical calibration of the schedule constant τ.
//!
//! The contraction lemma guarantees a τ making B a 1/2-contraction on W_R
//! but its value involves constants that are not computable. A doubling
//! search finds the smallest τ in {τ₀·2^j} whose empirical contraction
//! ratio over random probe pairs stays at or below 1/2 - margin.

use super::scattering::scattering_b;
use super::TSchedule;
use crate::cgo::SolverConfig;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::ordering::FreqOrdering;
use crate::subspaces::{random_element, BoxConstraint, SubspaceBasis};

#[derive(Clone, Debug)]
pub struct CalibrationReport {
    pub schedule: TSchedule,
    pub doublings: usize,
    /// Worst ratio ‖B(q₂)-B(q₁)‖/‖q₂-q₁‖ over the probe pairs at the
    /// accepted τ.
    pub ratio: f64,
    /// Worst probe ratio at every τ tried, in search order.
    pub ladder: Vec<(f64, f64)>,
}

/// Worst contraction ratio of B over `probes` seeded pairs in W_R.
/// Solver failures count as an infinite ratio. When `early_stop` is given,
/// the scan returns as soon as the running maximum exceeds it (the returned
/// value is then still a valid lower bound on the true maximum).
pub fn contraction_ratio<T: Scalar>(
    basis: &SubspaceBasis<T>,
    box_c: &BoxConstraint,
    ordering: &FreqOrdering,
    schedule: &TSchedule,
    cfg: &SolverConfig,
    n: usize,
    probes: usize,
    seed: u64,
    early_stop: Option<f64>,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..probes {
        let q1 = random_element(basis, box_c, seed.wrapping_add(2 * i as u64))?;
        let q2 = random_element(basis, box_c, seed.wrapping_add(2 * i as u64 + 1))?;
        let denom = q1.dist_l2(&q2)?.to_f64_lossy();
        if denom == 0.0 {
            continue;
        }
        let b1 = match scattering_b(&q1, ordering, schedule, cfg, n) {
            Ok(v) => v,
            Err(_) => return Ok(f64::INFINITY),
        };
        let b2 = match scattering_b(&q2, ordering, schedule, cfg, n) {
            Ok(v) => v,
            Err(_) => return Ok(f64::INFINITY),
        };
        let num: f64 = b1
            .iter()
            .zip(&b2)
            .map(|(a, b)| (a - b).norm_sqr().to_f64_lossy())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(num / denom);
        if let Some(stop) = early_stop {
            if worst > stop {
                return Ok(worst);
            }
        }
    }
    Ok(worst)
}

/// Smallest τ in the doubling ladder whose probe contraction ratio is
/// ≤ 1/2 - margin. Deterministic given the seed.
pub fn calibrate_tau<T: Scalar>(
    basis: &SubspaceBasis<T>,
    box_c: &BoxConstraint,
    ordering: &FreqOrdering,
    schedule0: &TSchedule,
    cfg: &SolverConfig,
    n: usize,
    probes: usize,
    margin: f64,
    seed: u64,
) -> Result<CalibrationReport> {
    const MAX_DOUBLINGS: usize = 20;
    let target = 0.5 - margin;
    if !(target > 0.0) {
        return Err(Error::Config(format!(
            "margin {margin} leaves no admissible contraction target"
        )));
    }
    let mut ladder = Vec::new();
    let mut ratio = f64::INFINITY;
    for j in 0..=MAX_DOUBLINGS {
        let tau = schedule0.tau * (2.0f64).powi(j as i32);
        let schedule = schedule0.with_tau(tau);
        ratio = contraction_ratio(
            basis,
            box_c,
            ordering,
            &schedule,
            cfg,
            n,
            probes,
            seed,
            Some(target),
        )?;
        ladder.push((tau, ratio));
        if ratio <= target {
            return Ok(CalibrationReport {
                schedule,
                doublings: j,
                ratio,
                ladder,
            });
        }
    }
    Err(Error::CalibrationFailure {
        doublings: MAX_DOUBLINGS,
        ratio,
    })
}
