//! Property-based verification suite at desk scale (d = 3).
//!
//! Each criterion is a self-contained check with pinned tolerances and
//! deterministic seeds; `run_all` powers both the `verify` CLI command and
//! the acceptance test target.
//!
//! Criteria that exercise the full measurement pipeline share one calibrated
//! fixture: the two-slab piecewise prior (M = 2, R = 5) with the hyperbolic
//! ordering and N from the balancing search, which lands at N = 406 channels
//! with ‖k‖_∞ ≤ 7 — the largest piecewise prior whose balancing channels the
//! 16³ desk-scale grid can host. Octant priors (M = 8) need N = 4388
//! channels reaching ‖k‖_∞ = 35, i.e. a 72³ grid and two orders of magnitude
//! more work; their balancing numbers are still computed and reported by the
//! norm-shape criterion.

pub mod oracles;

use crate::cgo::SolverConfig;
use crate::error::{Error, Result};
use crate::recon::{perturbation_experiment, reconstruct, ReconConfig};
use crate::spectral::field::Field;
use crate::spectral::grid::TorusGrid;
use crate::spectral::ordering::{make_ordering, FreqOrdering, OrderingKind};
use crate::subspaces::{
    build_basis, random_element, BoxConstraint, Partition, SubspaceSpec,
};
use crate::transform::{
    balancing_norm, calibrate_tau, choose_n, scattering_u, TSchedule,
};
use num_complex::Complex;
use once_cell::sync::Lazy;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Skip calibration and force this τ (diagnostic lever).
    pub tau_override: Option<f64>,
    /// Draw the contraction-criterion probes from W_R with this radius
    /// instead of the calibrated ball. The negative control sets it far
    /// above the calibrated R: the schedule was not calibrated for such
    /// potentials and the contraction criterion must then fail.
    pub box_override: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            tau_override: None,
            box_override: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub details: Vec<(String, f64)>,
    pub elapsed_secs: f64,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:2} {:<24}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name
        )?;
        for (k, v) in &self.details {
            write!(f, " {k}={v:.3e}")?;
        }
        write!(f, " ({:.1}s)", self.elapsed_secs)
    }
}

pub const CRITERIA_COUNT: usize = 10;

/// Calibrated measurement pipeline shared by the contraction, uniqueness,
/// convergence and perturbation criteria.
pub struct PipelineFixture {
    pub grid: TorusGrid,
    pub basis: crate::subspaces::SubspaceBasis<f64>,
    pub box_c: BoxConstraint,
    pub ordering: FreqOrdering,
    pub n_meas: usize,
    pub schedule: TSchedule,
    pub solver: SolverConfig,
    /// Probe ratio at the accepted τ (NaN when τ was overridden).
    pub calibration_ratio: f64,
    pub seed: u64,
}

impl PipelineFixture {
    pub fn recon_config(&self) -> ReconConfig<f64> {
        ReconConfig::new(
            self.n_meas,
            self.schedule,
            self.box_c,
            self.basis.clone(),
            self.solver,
        )
    }
}

type FixtureKey = (u64, Option<u64>);

static FIXTURES: Lazy<Mutex<HashMap<FixtureKey, Arc<PipelineFixture>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn build_fixture(cfg: &VerifyConfig) -> Result<PipelineFixture> {
    let d = 3;
    let box_c = BoxConstraint { r: 5.0 };
    let spec = SubspaceSpec::piecewise(d, Partition::uniform_boxes(d, &[2])?);
    let ordering = make_ordering(OrderingKind::Hyperbolic, d, 8000);

    // the balancing search uses closed-form coefficients only, so any grid
    // hosting the basis will do for selecting N
    let provisional = build_basis::<f64>(&spec, &TorusGrid::new(d, 16)?)?;
    let n_meas = choose_n(&provisional, &ordering, 0.25, 8000)?;

    // the working grid must resolve every measured channel
    let max_inf = ordering.max_inf_norm(n_meas) as usize;
    let n = (2 * max_inf + 2).max(16).next_multiple_of(2);
    let grid = TorusGrid::new(d, n)?;
    let basis = build_basis::<f64>(&spec, &grid)?;
    let solver = SolverConfig::new(grid);
    let schedule0 = TSchedule::new(d as f64, 1.0, d)?;

    let (schedule, ratio) = match cfg.tau_override {
        Some(tau) => (schedule0.with_tau(tau), f64::NAN),
        None => {
            let report = calibrate_tau(
                &basis, &box_c, &ordering, &schedule0, &solver, n_meas, 10, 0.05, cfg.seed,
            )?;
            (report.schedule, report.ratio)
        }
    };

    Ok(PipelineFixture {
        grid,
        basis,
        box_c,
        ordering,
        n_meas,
        schedule,
        solver,
        calibration_ratio: ratio,
        seed: cfg.seed,
    })
}

/// Shared fixture, built once per (seed, τ-override) pair.
pub fn fixture(cfg: &VerifyConfig) -> Result<Arc<PipelineFixture>> {
    let key = (cfg.seed, cfg.tau_override.map(f64::to_bits));
    let mut map = FIXTURES.lock().expect("fixture lock");
    if let Some(found) = map.get(&key) {
        return Ok(found.clone());
    }
    let built = Arc::new(build_fixture(cfg)?);
    map.insert(key, built.clone());
    Ok(built)
}

fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn report(
    id: usize,
    name: &str,
    started: Instant,
    passed: bool,
    details: Vec<(String, f64)>,
) -> CriterionReport {
    CriterionReport {
        id,
        name: name.to_string(),
        passed,
        details,
        elapsed_secs: started.elapsed().as_secs_f64(),
    }
}

/// 1. Band-limited balancing: with the box ordering, N = dim W exactly.
fn criterion_1(_cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let grid = TorusGrid::new(3, 16)?;
    let ordering = make_ordering(OrderingKind::Box, 3, 200);

    let b1 = build_basis::<f64>(&SubspaceSpec::bandlimited(3, 1), &grid)?;
    let norm27 = balancing_norm(&b1, &ordering, 27);
    let n1 = choose_n(&b1, &ordering, 0.25, 200)?;
    let b2 = build_basis::<f64>(&SubspaceSpec::bandlimited(3, 2), &grid)?;
    let n2 = choose_n(&b2, &ordering, 0.25, 200)?;

    let passed = norm27 <= 1e-12 && n1 == 27 && n2 == 125;
    Ok(report(
        1,
        "bandlimited-balancing",
        t0,
        passed,
        vec![
            ("norm_at_27".into(), norm27),
            ("n_star_b1".into(), n1 as f64),
            ("n_star_b2".into(), n2 as f64),
        ],
    ))
}

/// 2. Gram-complement identity vs direct tail summation (two-slab prior).
fn criterion_2(_cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let grid = TorusGrid::new(3, 16)?;
    let partition = Partition::uniform_boxes(3, &[2])?;
    let basis = build_basis::<f64>(&SubspaceSpec::piecewise(3, partition.clone()), &grid)?;
    let ordering = make_ordering(OrderingKind::Hyperbolic, 3, 1_000_000);

    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for n in [1usize, 27, 125] {
        let via_gram = balancing_norm(&basis, &ordering, n);
        let via_tail =
            oracles::brute_tail_norm_two_slabs(&partition, &ordering, n, 1_000_000);
        let diff = (via_gram - via_tail).abs();
        worst = worst.max(diff);
        details.push((format!("norm_at_{n}"), via_gram));
        details.push((format!("oracle_diff_{n}"), diff));
    }
    Ok(report(
        2,
        "balancing-gram-oracle",
        t0,
        worst <= 1e-6,
        details,
    ))
}

/// 3. Krylov remainder vs dense grounded Fourier-Galerkin solve.
fn criterion_3(cfg: &VerifyConfig) -> Result<CriterionReport> {
    use rayon::prelude::*;
    let t0 = Instant::now();
    let grid = TorusGrid::new(3, 10)?;
    let solver = SolverConfig::new(grid);
    let basis = build_basis::<f64>(&SubspaceSpec::bandlimited(3, 4), &grid)?;
    let box_c = BoxConstraint { r: 5.0 };
    let ks = [[1i64, 0, 0], [2, 1, 0], [1, 1, 1]];

    let diffs: Result<Vec<f64>> = (0..10u64)
        .into_par_iter()
        .map(|i| {
            let q = random_element(&basis, &box_c, cfg.seed.wrapping_add(900 + i))?;
            let k = ks[i as usize % ks.len()];
            let (freq, _) =
                solver.guard(crate::cgo::make_zeta::<f64>(&k, 40.0)?)?;
            let fast = crate::cgo::solve_remainder(&q, &freq, &solver)?;
            let dense = oracles::dense_remainder_solve(&q, &freq)?;
            fast.r.dist_l2(&dense)
        })
        .collect();
    let diffs = diffs?;
    let worst = diffs.iter().cloned().fold(0.0, f64::max);
    Ok(report(
        3,
        "cgo-solver-oracle",
        t0,
        worst <= 1e-8,
        vec![("max_distance".into(), worst)],
    ))
}

/// 4. Remainder decay ‖r‖ ~ 1/t.
fn criterion_4(cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let grid = TorusGrid::new(3, 16)?;
    let solver = SolverConfig::new(grid);
    let basis = build_basis::<f64>(
        &SubspaceSpec::piecewise(3, Partition::dyadic(3, 1)),
        &grid,
    )?;
    let q = random_element(&basis, &BoxConstraint { r: 5.0 }, cfg.seed.wrapping_add(40))?;
    let pts = crate::cgo::remainder_decay(&q, &[1, 0, 0], &[20.0, 40.0, 80.0, 160.0], &solver)?;
    let slope = loglog_slope(&pts);
    let mut details = vec![("slope".into(), slope)];
    for (t, r) in &pts {
        details.push((format!("norm_at_t{:.0}", t), *r));
    }
    Ok(report(4, "remainder-decay", t0, slope <= -0.9, details))
}

/// 5. Contraction of B after calibration, on held-out pairs.
fn criterion_5(cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let fx = fixture(cfg)?;
    let probe_box = match cfg.box_override {
        Some(r) => BoxConstraint::new(r)?,
        None => fx.box_c,
    };
    let ratio = crate::transform::calibrate::contraction_ratio(
        &fx.basis,
        &probe_box,
        &fx.ordering,
        &fx.schedule,
        &fx.solver,
        fx.n_meas,
        20,
        cfg.seed.wrapping_add(10_000),
        Some(0.5),
    )?;
    let passed = ratio <= 0.5;
    Ok(report(
        5,
        "contraction-of-b",
        t0,
        passed,
        vec![
            ("holdout_ratio".into(), ratio),
            ("calibration_ratio".into(), fx.calibration_ratio),
            ("tau".into(), fx.schedule.tau),
            ("probe_radius".into(), probe_box.r),
            ("n_channels".into(), fx.n_meas as f64),
        ],
    ))
}

/// 6. The uniqueness certificate ‖q₁-q₂‖ ≤ 4‖P_N U(q₁)-P_N U(q₂)‖.
fn criterion_6(cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let fx = fixture(cfg)?;
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let base = cfg.seed.wrapping_add(40_000 + 2 * i);
        let q1 = random_element(&fx.basis, &fx.box_c, base)?;
        let q2 = random_element(&fx.basis, &fx.box_c, base + 1)?;
        let lhs = q1.dist_l2(&q2)?;
        let u1 = scattering_u(&q1, &fx.ordering, &fx.schedule, &fx.solver, fx.n_meas)?;
        let u2 = scattering_u(&q2, &fx.ordering, &fx.schedule, &fx.solver, fx.n_meas)?;
        let rhs: f64 = u1
            .values
            .iter()
            .zip(&u2.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(lhs / (4.0 * rhs));
    }
    Ok(report(
        6,
        "proposition-inequality",
        t0,
        worst <= 1.0,
        vec![("max_lhs_over_4rhs".into(), worst)],
    ))
}

/// 7. Global convergence with the geometric envelope and initialization
/// independence.
fn criterion_7(cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let fx = fixture(cfg)?;
    let q_true = random_element(&fx.basis, &fx.box_c, cfg.seed.wrapping_add(20_000))?;
    let y = scattering_u(&q_true, &fx.ordering, &fx.schedule, &fx.solver, fx.n_meas)?;

    let mut rc = fx.recon_config();
    rc.max_iter = 40;
    let out = reconstruct(&y, &Field::zeros(fx.grid), &rc, Some(&q_true))?;
    let final_error = out.potential.dist_l2(&q_true)?;
    let envelope = out.log.envelope_holds() == Some(true);

    let mut limits = Vec::new();
    for i in 0..5u64 {
        let q0 = random_element(&fx.basis, &fx.box_c, cfg.seed.wrapping_add(21_000 + i))?;
        let run = reconstruct(&y, &q0, &fx.recon_config(), None)?;
        limits.push(run.potential);
    }
    let mut max_pair = 0.0f64;
    for i in 0..limits.len() {
        for j in (i + 1)..limits.len() {
            max_pair = max_pair.max(limits[i].dist_l2(&limits[j])?);
        }
    }

    let passed = final_error <= 1e-6 && envelope && max_pair <= 1e-8;
    Ok(report(
        7,
        "global-convergence",
        t0,
        passed,
        vec![
            ("final_error".into(), final_error),
            ("iterations".into(), out.log.rows.len() as f64),
            ("envelope_ok".into(), if envelope { 1.0 } else { 0.0 }),
            ("max_pairwise_limit_gap".into(), max_pair),
        ],
    ))
}

/// 8. Perturbation bound and near-linear error-vs-noise scaling.
fn criterion_8(cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let fx = fixture(cfg)?;
    let q_true = random_element(&fx.basis, &fx.box_c, cfg.seed.wrapping_add(20_000))?;
    let y = scattering_u(&q_true, &fx.ordering, &fx.schedule, &fx.solver, fx.n_meas)?;
    let rc = fx.recon_config();

    let mut details = Vec::new();
    let mut points = Vec::new();
    let mut bounds_ok = true;
    for (j, noise) in [1e-4f64, 1e-3, 1e-2].into_iter().enumerate() {
        let rep = perturbation_experiment(
            &q_true,
            &y,
            noise,
            &rc,
            cfg.seed.wrapping_add(30_000 + j as u64),
        )?;
        bounds_ok &= rep.recon_error <= rep.bound && rep.converged;
        points.push((noise, rep.recon_error));
        details.push((format!("error_at_noise_{noise:.0e}"), rep.recon_error));
    }
    let slope = loglog_slope(&points);
    details.push(("slope".into(), slope));
    let passed = bounds_ok && (0.8..=1.2).contains(&slope);
    Ok(report(8, "perturbation-bound", t0, passed, details))
}

/// 9. Piecewise norm-bound shape and monotone N*(M).
fn criterion_9(_cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let grid = TorusGrid::new(3, 16)?;
    let ordering = make_ordering(OrderingKind::Hyperbolic, 3, 8000);

    // shape: norm(N) ≤ C·log²(N)/√N·M² with C fitted on N ≤ 256 and the
    // bound then checked on the rest of the ladder
    let m8 = build_basis::<f64>(
        &SubspaceSpec::piecewise(3, Partition::dyadic(3, 1)),
        &grid,
    )?;
    let phi = |n: usize| (n as f64).ln().powi(2) / (n as f64).sqrt() * 64.0;
    let ladder: Vec<usize> = (1..=12).map(|j| 1usize << j).collect();
    let mut c_fit = 0.0f64;
    for &n in ladder.iter().filter(|&&n| n <= 256) {
        c_fit = c_fit.max(balancing_norm(&m8, &ordering, n) / phi(n));
    }
    let mut shape_ok = true;
    for &n in &ladder {
        let norm = balancing_norm(&m8, &ordering, n);
        if norm > c_fit * phi(n) * (1.0 + 1e-9) {
            shape_ok = false;
        }
    }

    // N*(M) monotone over M ∈ {2,4,8}; the channel reach ‖k‖_∞ is reported
    // alongside because it dictates the grid each prior would need
    let mut n_stars = Vec::new();
    let mut details = vec![("c_fit".into(), c_fit)];
    for (m, splits) in [(2usize, &[2usize][..]), (4, &[2, 2][..]), (8, &[2, 2, 2][..])] {
        let basis = build_basis::<f64>(
            &SubspaceSpec::piecewise(3, Partition::uniform_boxes(3, splits)?),
            &grid,
        )?;
        let n_star = choose_n(&basis, &ordering, 0.25, 8000)?;
        details.push((format!("n_star_m{m}"), n_star as f64));
        details.push((
            format!("max_freq_m{m}"),
            ordering.max_inf_norm(n_star) as f64,
        ));
        n_stars.push(n_star);
    }
    let monotone = n_stars.windows(2).all(|w| w[0] <= w[1]);

    Ok(report(9, "piecewise-norm-shape", t0, shape_ok && monotone, details))
}

/// 10. Liouville transform closed form.
fn criterion_10(_cfg: &VerifyConfig) -> Result<CriterionReport> {
    let t0 = Instant::now();
    let grid = TorusGrid::new(3, 16)?;
    let a = 0.3;
    let two_pi = 2.0 * std::f64::consts::PI;
    let sigma = Field::from_fn(grid, |x| {
        let c = 1.0 + a * (two_pi * x[0]).cos();
        Complex::new(c * c, 0.0)
    });
    let q = crate::recon::liouville_potential(&sigma)?;
    let expected = Field::from_fn(grid, |x| {
        let c = (two_pi * x[0]).cos();
        Complex::new(-two_pi * two_pi * a * c / (1.0 + a * c), 0.0)
    });
    let err = q.sub(&expected)?.sup_norm();
    Ok(report(
        10,
        "liouville-closed-form",
        t0,
        err <= 1e-8,
        vec![("max_deviation".into(), err)],
    ))
}

/// Run one criterion by id (1-based).
pub fn run_criterion(id: usize, cfg: &VerifyConfig) -> Result<CriterionReport> {
    match id {
        1 => criterion_1(cfg),
        2 => criterion_2(cfg),
        3 => criterion_3(cfg),
        4 => criterion_4(cfg),
        5 => criterion_5(cfg),
        6 => criterion_6(cfg),
        7 => criterion_7(cfg),
        8 => criterion_8(cfg),
        9 => criterion_9(cfg),
        10 => criterion_10(cfg),
        other => Err(Error::Config(format!(
            "unknown criterion {other}; valid ids are 1..={CRITERIA_COUNT}"
        ))),
    }
}

/// Run all (or a subset of) criteria, in order.
pub fn run_all(cfg: &VerifyConfig, subset: Option<&[usize]>) -> Result<Vec<CriterionReport>> {
    let ids: Vec<usize> = match subset {
        Some(ids) => ids.to_vec(),
        None => (1..=CRITERIA_COUNT).collect(),
    };
    ids.into_iter().map(|id| run_criterion(id, cfg)).collect()
}

/// Used by tests to double-check the grid chosen for the pipeline fixture
/// resolves all measured channels.
pub fn fixture_grid_covers_channels(fx: &PipelineFixture) -> bool {
    crate::transform::ordered_slots(&fx.grid, &fx.ordering, fx.n_meas).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion_rejected() {
        assert!(run_criterion(11, &VerifyConfig::default()).is_err());
        assert!(run_criterion(0, &VerifyConfig::default()).is_err());
    }

    #[test]
    fn liouville_criterion_is_self_contained() {
        let rep = run_criterion(10, &VerifyConfig::default()).unwrap();
        assert!(rep.passed, "{rep}");
    }
}
