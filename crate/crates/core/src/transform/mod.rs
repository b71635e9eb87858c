//! The measurement operators F, B and U = F + B, the balancing computation
//! and the t-schedule calibration.

pub mod balancing;
pub mod calibrate;
pub mod scattering;

pub use balancing::{balancing_norm, choose_n};
pub use calibrate::{calibrate_tau, CalibrationReport};
pub use scattering::{ordered_slots, scattering_b, scattering_u};

use crate::cgo::SolverConfig;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::ordering::OrderingKind;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// The rule t_k = τ·(|k|^s + 1) fixing the CGO size parameter per channel.
///
/// τ stands in for the inaccessible constant of the underlying estimates and
/// is found by calibration; s defaults to d (admissible since s > d/2 is all
/// the schedule needs).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TSchedule {
    pub s: f64,
    pub tau: f64,
}

impl TSchedule {
    pub fn new(s: f64, tau: f64, d: usize) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Config(format!("tau must be positive, got {tau}")));
        }
        if !(s > d as f64 / 2.0) {
            return Err(Error::Config(format!(
                "schedule exponent must satisfy s > d/2 = {}, got {s}",
                d as f64 / 2.0
            )));
        }
        Ok(Self { s, tau })
    }

    pub fn default_for_dimension(d: usize) -> Self {
        Self {
            s: d as f64,
            tau: 1.0,
        }
    }

    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    /// t_k for a lattice frequency.
    pub fn t_for(&self, k: &[i64]) -> f64 {
        let norm = (k.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
        self.tau * (norm.powf(self.s) + 1.0)
    }
}

/// Finite measurement data y = P_N U(q) with the provenance needed to
/// recompute it.
#[derive(Clone, Debug)]
pub struct MeasurementVector<T: Scalar> {
    pub values: Vec<Complex<T>>,
    pub ordering: OrderingKind,
    pub schedule: TSchedule,
    pub solver: SolverConfig,
}

impl<T: Scalar> MeasurementVector<T> {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn l2_norm(&self) -> T {
        self.values
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Check that this data is compatible with a (ordering, schedule, solver)
    /// triple before feeding it to the reconstruction.
    pub fn check_provenance(
        &self,
        ordering: OrderingKind,
        schedule: &TSchedule,
        solver: &SolverConfig,
    ) -> Result<()> {
        if self.ordering != ordering {
            return Err(Error::Provenance(format!(
                "ordering {} in data vs {} in config",
                self.ordering, ordering
            )));
        }
        if self.schedule != *schedule {
            return Err(Error::Provenance(format!(
                "schedule {:?} in data vs {:?} in config",
                self.schedule, schedule
            )));
        }
        if self.solver != *solver {
            return Err(Error::Provenance(
                "solver configuration differs from the one recorded in the data".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_validates_parameters() {
        assert!(TSchedule::new(3.0, 0.0, 3).is_err());
        assert!(TSchedule::new(1.4, 1.0, 3).is_err());
        let s = TSchedule::new(3.0, 2.0, 3).unwrap();
        assert_eq!(s.t_for(&[0, 0, 0]), 2.0);
        // |k| = 5 -> t = 2·(125+1)
        assert!((s.t_for(&[3, 4, 0]) - 252.0).abs() < 1e-9);
    }
}
