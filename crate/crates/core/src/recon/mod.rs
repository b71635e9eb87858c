//! Fixed-point reconstruction from finite scattering data.

pub mod liouville;
pub mod operator;
pub mod perturb;

pub use liouville::liouville_potential;
pub use operator::{apply_a, apply_step, StepOutput};
pub use perturb::{perturbation_experiment, PerturbationReport};

use crate::cgo::SolverConfig;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::spectral::ordering::{make_ordering, FreqOrdering};
use crate::subspaces::{project_box, BoxConstraint, SubspaceBasis};
use crate::transform::{MeasurementVector, TSchedule};

/// Everything the fixed-point iteration needs besides the data.
#[derive(Clone, Debug)]
pub struct ReconConfig<T: Scalar> {
    pub n: usize,
    pub schedule: TSchedule,
    pub box_c: BoxConstraint,
    pub basis: SubspaceBasis<T>,
    pub solver: SolverConfig,
    pub max_iter: usize,
    /// Stop once successive iterates differ by less than this in L².
    pub stop_tol: f64,
    /// Tolerance handed to the convex projection (Dykstra path).
    pub projection_tol: f64,
}

impl<T: Scalar> ReconConfig<T> {
    pub fn new(
        n: usize,
        schedule: TSchedule,
        box_c: BoxConstraint,
        basis: SubspaceBasis<T>,
        solver: SolverConfig,
    ) -> Self {
        Self {
            n,
            schedule,
            box_c,
            basis,
            solver,
            max_iter: 60,
            stop_tol: 1e-10,
            projection_tol: 1e-12,
        }
    }

    pub(crate) fn ordering(&self, kind: crate::spectral::OrderingKind) -> FreqOrdering {
        make_ordering(kind, self.basis.grid().dim(), self.n)
    }
}

/// One row per iterate: the step into it, the error against the truth when
/// known, and the data residual ‖y - P_N U(q_n)‖.
#[derive(Clone, Debug)]
pub struct LogRow {
    pub n: usize,
    pub step_norm: f64,
    pub true_error: Option<f64>,
    pub data_residual: f64,
}

#[derive(Clone, Debug, Default)]
pub struct IterationLog {
    pub rows: Vec<LogRow>,
}

impl IterationLog {
    /// Check ‖q* - q_n‖ ≤ 4·(3/4)^n·‖q₁ - q₀‖ for every logged n ≥ 1.
    /// None when no truth was supplied.
    pub fn envelope_holds(&self) -> Option<bool> {
        let first_step = self.rows.first()?.step_norm;
        let mut checked = false;
        for row in &self.rows {
            let err = row.true_error?;
            let bound = 4.0 * (0.75f64).powi(row.n as i32) * first_step;
            checked = true;
            if err > bound + 1e-12 {
                return Some(false);
            }
        }
        checked.then_some(true)
    }
}

#[derive(Clone, Debug)]
pub struct ReconOutcome<T: Scalar> {
    pub potential: Field<T>,
    pub log: IterationLog,
    /// False when the iteration hit max_iter before reaching stop_tol.
    pub converged: bool,
}

/// Iterate q_n = A(q_{n-1}) from an initial guess until the step norm falls
/// below stop_tol. The initial guess is projected into W_R first; the truth,
/// when given, is only used to fill the log.
pub fn reconstruct<T: Scalar>(
    y: &MeasurementVector<T>,
    q0: &Field<T>,
    cfg: &ReconConfig<T>,
    truth: Option<&Field<T>>,
) -> Result<ReconOutcome<T>> {
    let ordering = cfg.ordering(y.ordering);
    let mut log = IterationLog::default();
    let mut current = project_box(q0, &cfg.basis, &cfg.box_c, cfg.projection_tol)?;
    let mut converged = false;

    for n in 1..=cfg.max_iter {
        let step = apply_step(&current, y, cfg, &ordering)?;
        let step_norm = step.field.dist_l2(&current)?.to_f64_lossy();
        let true_error = match truth {
            Some(t) => Some(step.field.dist_l2(t)?.to_f64_lossy()),
            None => None,
        };
        current = step.field;
        log.rows.push(LogRow {
            n,
            step_norm,
            true_error,
            data_residual: step.data_residual.to_f64_lossy(),
        });
        if step_norm <= cfg.stop_tol {
            converged = true;
            break;
        }
    }

    Ok(ReconOutcome {
        potential: current,
        log,
        converged,
    })
}
