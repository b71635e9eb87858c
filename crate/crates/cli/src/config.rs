//! Run configuration: one JSON document describing the grid, the prior
//! space, the measurement schedule and the solver. Unknown keys are
//! rejected, and every command echoes the resolved configuration next to
//! its outputs so runs can be reproduced from the artifacts alone.

use serde::{Deserialize, Serialize};
use torusrec::cgo::{Grounding, Method, SolverConfig};
use torusrec::io::SubspaceSpecFile;
use torusrec::spectral::{OrderingKind, TorusGrid};
use torusrec::subspaces::{BoxConstraint, SubspaceSpec};
use torusrec::transform::TSchedule;
use torusrec::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_restart")]
    pub restart: usize,
    #[serde(default = "default_resonance_delta")]
    pub resonance_delta: f64,
    #[serde(default = "default_nudge_factor")]
    pub nudge_factor: f64,
    #[serde(default = "default_max_nudges")]
    pub max_nudges: usize,
}

fn default_method() -> Method {
    Method::Krylov
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    500
}
fn default_restart() -> usize {
    30
}
fn default_resonance_delta() -> f64 {
    1e-6
}
fn default_nudge_factor() -> f64 {
    1.0 + 1e-4
}
fn default_max_nudges() -> usize {
    20
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            method: default_method(),
            tol: default_tol(),
            max_iter: default_max_iter(),
            restart: default_restart(),
            resonance_delta: default_resonance_delta(),
            nudge_factor: default_nudge_factor(),
            max_nudges: default_max_nudges(),
        }
    }
}

impl SolverParams {
    pub fn with_grid(&self, grid: TorusGrid) -> SolverConfig {
        SolverConfig {
            grid,
            method: self.method,
            tol: self.tol,
            max_iter: self.max_iter,
            restart: self.restart,
            grounding: Grounding::CharacteristicSublattice,
            resonance_delta: self.resonance_delta,
            nudge_factor: self.nudge_factor,
            max_nudges: self.max_nudges,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BalancingParams {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_threshold() -> f64 {
    0.25
}
fn default_n_max() -> usize {
    8000
}

impl Default for BalancingParams {
    fn default() -> Self {
        Self {
            threshold: default_threshold(),
            n_max: default_n_max(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconParams {
    #[serde(default = "default_recon_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    #[serde(default = "default_projection_tol")]
    pub projection_tol: f64,
}

fn default_recon_max_iter() -> usize {
    60
}
fn default_stop_tol() -> f64 {
    1e-10
}
fn default_projection_tol() -> f64 {
    1e-12
}

impl Default for ReconParams {
    fn default() -> Self {
        Self {
            max_iter: default_recon_max_iter(),
            stop_tol: default_stop_tol(),
            projection_tol: default_projection_tol(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationParams {
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_probes() -> usize {
    10
}
fn default_margin() -> f64 {
    0.05
}

impl Default for CalibrationParams {
    fn default() -> Self {
        Self {
            probes: default_probes(),
            margin: default_margin(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: TorusGrid,
    pub subspace: SubspaceSpecFile,
    #[serde(default = "default_ordering")]
    pub ordering: OrderingKind,
    pub schedule: TSchedule,
    #[serde(default)]
    pub solver: SolverParams,
    #[serde(default)]
    pub balancing: BalancingParams,
    /// Measurement count; when absent the balancing search picks it.
    #[serde(default)]
    pub n_measurements: Option<usize>,
    #[serde(default)]
    pub recon: ReconParams,
    #[serde(default)]
    pub calibration: CalibrationParams,
    #[serde(default)]
    pub seed: u64,
}

fn default_ordering() -> OrderingKind {
    OrderingKind::Hyperbolic
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (spec, _) = self.subspace.to_spec()?;
        if spec.d != self.grid.dim() {
            return Err(Error::Config(format!(
                "subspace dimension {} does not match grid dimension {}",
                spec.d,
                self.grid.dim()
            )));
        }
        TSchedule::new(self.schedule.s, self.schedule.tau, self.grid.dim())?;
        if !(self.balancing.threshold > 0.0 && self.balancing.threshold <= 1.0) {
            return Err(Error::Config(format!(
                "balancing threshold must lie in (0,1], got {}",
                self.balancing.threshold
            )));
        }
        Ok(())
    }

    pub fn spec_and_box(&self) -> Result<(SubspaceSpec, BoxConstraint)> {
        self.subspace.to_spec()
    }

    pub fn solver_config(&self) -> SolverConfig {
        self.solver.with_grid(self.grid)
    }
}
