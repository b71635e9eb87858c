//! Command-line pipelines: balancing reports, measurement simulation,
//! reconstruction, schedule calibration and the verification suite.
//!
//! Exit codes: 2 on configuration/schema errors, 3 when a search (balancing
//! or calibration) fails, 4 on solver failures, 5 on provenance mismatches,
//! 1 on anything else (including failed verification criteria).

mod config;

use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use torusrec::io;
use torusrec::recon::ReconConfig;
use torusrec::spectral::{make_ordering, FreqOrdering};
use torusrec::subspaces::{build_basis, project_subspace, random_element};
use torusrec::transform::{balancing_norm, calibrate_tau, choose_n, scattering_u};
use torusrec::verify::{run_all, VerifyConfig, CRITERIA_COUNT};
use torusrec::{Basis64, Error, Field64};

#[derive(Parser)]
#[command(name = "torusrec", version, about = "Finite-measurement scattering transforms on the torus")]
struct Cli {
    /// Worker threads for the channel-parallel solves (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the seed recorded in the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the balancing norm over N and select the measurement count.
    Balance {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Simulate the finite measurement data y = P_N U(q).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Potential from a CGO1 field file.
        #[arg(long, conflicts_with = "q_seed")]
        q_file: Option<PathBuf>,
        /// Potential drawn from W_R with this seed (defaults to the config seed).
        #[arg(long)]
        q_seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Reconstruct the potential from measurement data.
    Reconstruct {
        #[arg(long)]
        config: PathBuf,
        /// Measurement JSON produced by `simulate`.
        #[arg(long)]
        data: PathBuf,
        /// Initial guess field (defaults to zero).
        #[arg(long, conflicts_with = "q0_seed")]
        q0_file: Option<PathBuf>,
        /// Initial guess drawn from W_R with this seed.
        #[arg(long)]
        q0_seed: Option<u64>,
        /// Ground-truth field; enables the error column and the verdict.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Calibrate the schedule constant τ by the doubling search.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the verification suite (all criteria, or a subset).
    Verify {
        /// Comma-separated criterion ids, e.g. "1,4,10".
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
        /// Force τ instead of calibrating (diagnostic lever).
        #[arg(long)]
        tau_override: Option<f64>,
        /// Probe the contraction criterion with this ball radius instead of
        /// the calibrated one (negative-control lever).
        #[arg(long)]
        box_override: Option<f64>,
        /// Directory for the JSON report (skipped when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_)
        | Error::Json(_)
        | Error::Format(_)
        | Error::DimensionTooSmall(_)
        | Error::BadGridSize(_)
        | Error::GridTooLarge { .. }
        | Error::MisalignedPartition { .. }
        | Error::CellOutOfRange { .. }
        | Error::OverlappingCells { .. }
        | Error::BandwidthExceedsGrid { .. }
        | Error::HaarLevelExceedsGrid { .. }
        | Error::DivergentParameters { .. } => 2,
        Error::BalancingNotFound { .. } | Error::CalibrationFailure { .. } => 3,
        Error::GuardFailure { .. }
        | Error::SolverDiverged(_)
        | Error::IterationCap { .. }
        | Error::ProjectionCap(_)
        | Error::TolInfeasible { .. }
        | Error::PositivityViolation(_) => 4,
        Error::Provenance(_) => 5,
        _ => 1,
    }
}

struct Workspace {
    cfg: RunConfig,
    basis: Basis64,
    ordering: FreqOrdering,
}

fn load_workspace(path: &Path, seed_override: Option<u64>) -> Result<Workspace, Error> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = seed_override {
        cfg.seed = seed;
    }
    let (spec, _) = cfg.spec_and_box()?;
    let basis = build_basis::<f64>(&spec, &cfg.grid)?;
    let ordering = make_ordering(cfg.ordering, cfg.grid.dim(), cfg.balancing.n_max);
    Ok(Workspace {
        cfg,
        basis,
        ordering,
    })
}

fn resolve_n(ws: &Workspace) -> Result<usize, Error> {
    match ws.cfg.n_measurements {
        Some(n) => Ok(n),
        None => choose_n(
            &ws.basis,
            &ws.ordering,
            ws.cfg.balancing.threshold,
            ws.cfg.balancing.n_max,
        ),
    }
}

fn write_resolved_config(out: &Path, cfg: &RunConfig, n: Option<usize>) -> Result<(), Error> {
    let mut resolved = cfg.clone();
    if n.is_some() {
        resolved.n_measurements = n;
    }
    let json = serde_json::to_string_pretty(&resolved)?;
    std::fs::write(out.join("resolved_config.json"), json + "\n")?;
    Ok(())
}

fn cmd_balance(ws: &Workspace, out: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(out)?;
    let chosen = resolve_n(ws)?;

    // geometric ladder plus the chosen N itself
    let mut ladder: Vec<usize> = (0..)
        .map(|j| 1usize << j)
        .take_while(|&n| n <= ws.cfg.balancing.n_max)
        .collect();
    ladder.push(chosen);
    ladder.sort_unstable();
    ladder.dedup();

    let is_piecewise = ws.cfg.subspace.family == "piecewise";
    let m = ws.basis.len() as f64;
    let phi = |n: usize| (n as f64).ln().powi(2) / (n as f64).sqrt() * m * m;
    let norms: Vec<(usize, f64)> = ladder
        .iter()
        .map(|&n| (n, balancing_norm(&ws.basis, &ws.ordering, n)))
        .collect();
    let c_fit = norms
        .iter()
        .filter(|&&(n, _)| n >= 2)
        .map(|&(n, v)| v / phi(n))
        .fold(0.0, f64::max);

    let mut csv = String::from(if is_piecewise {
        "N,balancing_norm,fitted_bound\n"
    } else {
        "N,balancing_norm\n"
    });
    for &(n, v) in &norms {
        if is_piecewise {
            let bound = if n >= 2 { c_fit * phi(n) } else { f64::NAN };
            csv.push_str(&format!("{n},{v:.17e},{bound:.17e}\n"));
        } else {
            csv.push_str(&format!("{n},{v:.17e}\n"));
        }
    }
    std::fs::write(out.join("balance.csv"), csv)?;
    io::write_ordering_csv(&out.join("ordering.csv"), &ws.ordering)?;
    write_resolved_config(out, &ws.cfg, Some(chosen))?;
    println!(
        "chosen N = {chosen} (threshold {}, norm {:.6})",
        ws.cfg.balancing.threshold,
        balancing_norm(&ws.basis, &ws.ordering, chosen)
    );
    Ok(())
}

fn load_potential(
    ws: &Workspace,
    q_file: &Option<PathBuf>,
    q_seed: Option<u64>,
) -> Result<Field64, Error> {
    let (_, box_c) = ws.cfg.spec_and_box()?;
    match q_file {
        Some(path) => {
            let q: Field64 = io::read_field(path)?;
            if q.grid() != &ws.cfg.grid {
                return Err(Error::Provenance(format!(
                    "field in {} lives on a {}^{} grid, config wants {}^{}",
                    path.display(),
                    q.grid().points_per_axis(),
                    q.grid().dim(),
                    ws.cfg.grid.points_per_axis(),
                    ws.cfg.grid.dim(),
                )));
            }
            // the potential must be an element of W_R
            if q.sup_norm() > box_c.r * (1.0 + 1e-9) {
                return Err(Error::Config(format!(
                    "potential sup norm {:.6} exceeds the box radius {}",
                    q.sup_norm(),
                    box_c.r
                )));
            }
            let in_span = project_subspace(&q, &ws.basis)?;
            let defect = q.sub(&in_span)?.l2_norm();
            if defect > 1e-8 * (1.0 + q.l2_norm()) {
                return Err(Error::Config(format!(
                    "potential is not in the prior span (defect {defect:.3e})"
                )));
            }
            Ok(q)
        }
        None => random_element(&ws.basis, &box_c, q_seed.unwrap_or(ws.cfg.seed)),
    }
}

fn cmd_simulate(
    ws: &Workspace,
    q_file: &Option<PathBuf>,
    q_seed: Option<u64>,
    out: &Path,
) -> Result<(), Error> {
    std::fs::create_dir_all(out)?;
    let n = resolve_n(ws)?;
    let q = load_potential(ws, q_file, q_seed)?;
    let solver = ws.cfg.solver_config();
    let y = scattering_u(&q, &ws.ordering, &ws.cfg.schedule, &solver, n)?;
    io::write_measurement(&out.join("measurements.json"), &y)?;
    io::write_field(&out.join("potential.cgo1"), &q)?;
    write_resolved_config(out, &ws.cfg, Some(n))?;
    println!(
        "wrote {} channels (‖y‖ = {:.6e}) to {}",
        n,
        y.l2_norm(),
        out.join("measurements.json").display()
    );
    Ok(())
}

fn cmd_reconstruct(
    ws: &Workspace,
    data: &Path,
    q0_file: &Option<PathBuf>,
    q0_seed: Option<u64>,
    truth: &Option<PathBuf>,
    out: &Path,
) -> Result<(), Error> {
    std::fs::create_dir_all(out)?;
    let y = io::read_measurement::<f64>(data)?;
    let solver = ws.cfg.solver_config();
    y.check_provenance(ws.cfg.ordering, &ws.cfg.schedule, &solver)?;
    let n = match ws.cfg.n_measurements {
        Some(n) if n != y.n() => {
            return Err(Error::Provenance(format!(
                "config requests N = {n} but the data carries {}",
                y.n()
            )));
        }
        _ => y.n(),
    };

    let (_, box_c) = ws.cfg.spec_and_box()?;
    let mut rc = ReconConfig::new(n, ws.cfg.schedule, box_c, ws.basis.clone(), solver);
    rc.max_iter = ws.cfg.recon.max_iter;
    rc.stop_tol = ws.cfg.recon.stop_tol;
    rc.projection_tol = ws.cfg.recon.projection_tol;

    let q0 = match q0_file {
        Some(path) => io::read_field::<f64>(path)?,
        None => match q0_seed {
            Some(seed) => random_element(&ws.basis, &box_c, seed)?,
            None => Field64::zeros(ws.cfg.grid),
        },
    };
    let truth_field = truth.as_ref().map(|p| io::read_field::<f64>(p)).transpose()?;

    let outcome = torusrec::recon::reconstruct(&y, &q0, &rc, truth_field.as_ref())?;
    io::write_field(&out.join("reconstruction.cgo1"), &outcome.potential)?;
    io::write_log_csv(&out.join("iterations.csv"), &outcome.log)?;
    write_resolved_config(out, &ws.cfg, Some(n))?;

    let steps = outcome.log.rows.len();
    if !outcome.converged {
        println!("warning: iteration cap reached before stop_tol");
    }
    match (&truth_field, outcome.log.envelope_holds()) {
        (Some(t), Some(ok)) => {
            let err = outcome.potential.dist_l2(t)?;
            println!(
                "verdict: {} (geometric envelope), final error {:.3e}, {} iterations",
                if ok { "PASS" } else { "FAIL" },
                err,
                steps
            );
        }
        _ => println!(
            "done in {} iterations, final step {:.3e}",
            steps,
            outcome.log.rows.last().map(|r| r.step_norm).unwrap_or(0.0)
        ),
    }
    Ok(())
}

fn cmd_calibrate(ws: &Workspace, out: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(out)?;
    let n = resolve_n(ws)?;
    let (_, box_c) = ws.cfg.spec_and_box()?;
    let solver = ws.cfg.solver_config();
    let report = calibrate_tau(
        &ws.basis,
        &box_c,
        &ws.ordering,
        &ws.cfg.schedule,
        &solver,
        n,
        ws.cfg.calibration.probes,
        ws.cfg.calibration.margin,
        ws.cfg.seed,
    )?;
    let mut resolved = ws.cfg.clone();
    resolved.schedule = report.schedule;
    resolved.n_measurements = Some(n);
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "tau": report.schedule.tau,
        "s": report.schedule.s,
        "doublings": report.doublings,
        "contraction_ratio": report.ratio,
        "ladder": report.ladder,
        "n_measurements": n,
    }))?;
    std::fs::write(out.join("calibration.json"), json + "\n")?;
    let cfg_json = serde_json::to_string_pretty(&resolved)?;
    std::fs::write(out.join("resolved_config.json"), cfg_json + "\n")?;
    println!(
        "calibrated tau = {} after {} doublings (ratio {:.4})",
        report.schedule.tau, report.doublings, report.ratio
    );
    Ok(())
}

fn cmd_verify(
    only: Option<Vec<usize>>,
    seed: Option<u64>,
    tau_override: Option<f64>,
    box_override: Option<f64>,
    out: Option<PathBuf>,
) -> Result<bool, Error> {
    let cfg = VerifyConfig {
        seed: seed.unwrap_or(7),
        tau_override,
        box_override,
    };
    if let Some(ids) = &only {
        for &id in ids {
            if id == 0 || id > CRITERIA_COUNT {
                return Err(Error::Config(format!(
                    "criterion ids must lie in 1..={CRITERIA_COUNT}, got {id}"
                )));
            }
        }
    }
    let reports = run_all(&cfg, only.as_deref())?;
    for rep in &reports {
        println!("{rep}");
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        let json = serde_json::to_string_pretty(&reports)?;
        std::fs::write(dir.join("verify_report.json"), json + "\n")?;
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Balance { config, out } => {
            cmd_balance(&load_workspace(&config, cli.seed)?, &out)?;
            Ok(true)
        }
        Command::Simulate {
            config,
            q_file,
            q_seed,
            out,
        } => {
            cmd_simulate(&load_workspace(&config, cli.seed)?, &q_file, q_seed, &out)?;
            Ok(true)
        }
        Command::Reconstruct {
            config,
            data,
            q0_file,
            q0_seed,
            truth,
            out,
        } => {
            cmd_reconstruct(
                &load_workspace(&config, cli.seed)?,
                &data,
                &q0_file,
                q0_seed,
                &truth,
                &out,
            )?;
            Ok(true)
        }
        Command::Calibrate { config, out } => {
            cmd_calibrate(&load_workspace(&config, cli.seed)?, &out)?;
            Ok(true)
        }
        Command::Verify {
            only,
            tau_override,
            box_override,
            out,
        } => cmd_verify(only, cli.seed, tau_override, box_override, out),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
