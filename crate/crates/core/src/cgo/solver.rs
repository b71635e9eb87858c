//! Solving the remainder equation Δr + 2ζ·∇r - qr = q on the torus.
//!
//! In Fourier space the equation reads σ(m) r̂(m) - (qr)^(m) = q̂(m) with the
//! grounded modes discarded. Two methods are provided: a plain fixed-point
//! iteration r ← G[q(1+r)] with G the grounded inverse symbol (Neumann), and
//! restarted GMRES on (I - G M_q) r = G q̂ (Krylov, the default).

use super::symbol::{resonance_guard, SymbolTable};
use super::zeta::{make_zeta, ComplexFrequency};
use crate::error::{Error, Result};
use crate::linalg::gmres;
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::spectral::fourier::fft_all_axes;
use crate::spectral::grid::TorusGrid;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Neumann,
    Krylov,
}

/// Grounding convention of the inverse symbol. A single fixed rule: the
/// inverse is zero on the characteristic sublattice {m : ξ·m = η·m = 0}
/// (which contains m = 0 and m = k, where σ vanishes for every t).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grounding {
    #[default]
    CharacteristicSublattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: TorusGrid,
    pub method: Method,
    /// Absolute ℓ² residual threshold in Fourier space.
    pub tol: f64,
    pub max_iter: usize,
    /// Krylov restart length.
    pub restart: usize,
    pub grounding: Grounding,
    /// Minimum allowed |σ(m)| relative to t.
    pub resonance_delta: f64,
    pub nudge_factor: f64,
    pub max_nudges: usize,
}

impl SolverConfig {
    pub fn new(grid: TorusGrid) -> Self {
        Self {
            grid,
            method: Method::Krylov,
            tol: 1e-10,
            max_iter: 500,
            restart: 30,
            grounding: Grounding::CharacteristicSublattice,
            resonance_delta: 1e-6,
            nudge_factor: 1.0 + 1e-4,
            max_nudges: 20,
        }
    }

    /// Apply the resonance guard of this configuration to a channel.
    pub fn guard<T: Scalar>(
        &self,
        freq: ComplexFrequency<T>,
    ) -> Result<(ComplexFrequency<T>, SymbolTable<T>)> {
        resonance_guard(
            freq,
            &self.grid,
            self.resonance_delta,
            self.nudge_factor,
            self.max_nudges,
        )
    }
}

#[derive(Clone, Debug)]
pub struct RemainderSolution<T: Scalar> {
    pub r: Field<T>,
    /// ℓ² norm of σ r̂ - (qr)^ - q̂ over the non-grounded modes.
    pub residual: T,
    pub iterations: usize,
    /// t after any guard nudges.
    pub t_used: T,
}

struct Workspace<'a, T: Scalar> {
    grid: TorusGrid,
    q_values: &'a [Complex<T>],
    scale: T,
}

impl<'a, T: Scalar> Workspace<'a, T> {
    /// (q · F^{-1} r)^ with the same normalization as `forward_transform`.
    fn conv(&self, r_spec: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut v = r_spec.to_vec();
        fft_all_axes(&self.grid, &mut v, false);
        for (vi, qi) in v.iter_mut().zip(self.q_values) {
            *vi *= qi;
        }
        fft_all_axes(&self.grid, &mut v, true);
        for vi in v.iter_mut() {
            *vi = vi.scale(self.scale);
        }
        v
    }

    fn residual(
        &self,
        table: &SymbolTable<T>,
        r_spec: &[Complex<T>],
        qhat: &[Complex<T>],
    ) -> T {
        let s = self.conv(r_spec);
        let mut acc = T::zero();
        for (((&sym, &g), (&ri, &si)), &qi) in table
            .symbol()
            .iter()
            .zip(table.grounded())
            .zip(r_spec.iter().zip(&s))
            .zip(qhat)
        {
            if !g {
                acc += (sym * ri - si - qi).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Solve the remainder equation for one channel. The channel should already
/// have passed the resonance guard; guarding again is harmless.
pub fn solve_remainder<T: Scalar>(
    q: &Field<T>,
    freq: &ComplexFrequency<T>,
    cfg: &SolverConfig,
) -> Result<RemainderSolution<T>> {
    if q.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    let grid = cfg.grid;
    let table = SymbolTable::build(&grid, freq);
    let scale = T::cast(grid.spacing().powi(grid.dim() as i32));

    let mut qhat = q.values().to_vec();
    fft_all_axes(&grid, &mut qhat, true);
    for v in qhat.iter_mut() {
        *v = v.scale(scale);
    }

    let ws = Workspace {
        grid,
        q_values: q.values(),
        scale,
    };
    let tol = T::cast(cfg.tol);

    let (r_spec, iterations, residual) = match cfg.method {
        Method::Neumann => {
            let mut r = vec![Complex::zero(); grid.len()];
            let mut prev = T::infinity();
            let mut grow = 0usize;
            let mut iters = 0usize;
            loop {
                let s = ws.conv(&r);
                let mut acc = T::zero();
                for (((&sym, &g), (&ri, &si)), &qi) in table
                    .symbol()
                    .iter()
                    .zip(table.grounded())
                    .zip(r.iter().zip(&s))
                    .zip(&qhat)
                {
                    if !g {
                        acc += (sym * ri - si - qi).norm_sqr();
                    }
                }
                let res = acc.sqrt();
                if res <= tol {
                    break (r, iters, res);
                }
                if res >= prev {
                    grow += 1;
                    if grow >= 5 {
                        return Err(Error::SolverDiverged(5));
                    }
                } else {
                    grow = 0;
                }
                prev = res;
                if iters >= cfg.max_iter {
                    return Err(Error::IterationCap {
                        cap: cfg.max_iter,
                        residual: res.to_f64_lossy(),
                    });
                }
                // r ← G[(qr)^ + q̂]
                let mut next = s;
                for (ni, &qi) in next.iter_mut().zip(&qhat) {
                    *ni += qi;
                }
                table.apply_inverse(&mut next);
                r = next;
                iters += 1;
            }
        }
        Method::Krylov => {
            let mut b = qhat.clone();
            table.apply_inverse(&mut b);
            // ‖σ∘ρ‖ ≤ max|σ|·‖ρ‖ converts the preconditioned residual to the
            // contract residual
            let inner_tol = tol / table.max_offground().max(T::one());
            let out = gmres(
                |x: &[Complex<T>], y: &mut [Complex<T>]| {
                    let mut gs = ws.conv(x);
                    table.apply_inverse(&mut gs);
                    for ((yi, &xi), &gi) in y.iter_mut().zip(x).zip(&gs) {
                        *yi = xi - gi;
                    }
                },
                &b,
                cfg.restart,
                cfg.max_iter,
                inner_tol,
            );
            let res = ws.residual(&table, &out.x, &qhat);
            if res > tol {
                return Err(Error::IterationCap {
                    cap: cfg.max_iter,
                    residual: res.to_f64_lossy(),
                });
            }
            (out.x, out.iterations, res)
        }
    };

    let mut values = r_spec;
    fft_all_axes(&grid, &mut values, false);
    Ok(RemainderSolution {
        r: Field::from_values(grid, values)?,
        residual,
        iterations,
        t_used: freq.t,
    })
}

/// ‖r‖_{L²} for a list of increasing t values; each t passes the guard first.
/// Returns (t_used, norm) pairs.
pub fn remainder_decay<T: Scalar>(
    q: &Field<T>,
    k: &[i64],
    t_list: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<(f64, f64)>> {
    debug_assert!(t_list.windows(2).all(|w| w[0] < w[1]));
    t_list
        .iter()
        .map(|&t| {
            let (freq, _) = cfg.guard(make_zeta::<T>(k, T::cast(t))?)?;
            let sol = solve_remainder(q, &freq, cfg)?;
            Ok((sol.t_used.to_f64_lossy(), sol.r.l2_norm().to_f64_lossy()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fourier::{forward_transform, gradient_l2_norm};
    use crate::subspaces::{build_basis, random_element, BoxConstraint, Partition, SubspaceSpec};

    fn grid16() -> TorusGrid {
        TorusGrid::new(3, 16).unwrap()
    }

    fn dyadic_q(grid: TorusGrid, seed: u64, r: f64) -> Field<f64> {
        let basis = build_basis::<f64>(
            &SubspaceSpec::piecewise(3, Partition::dyadic(3, 1)),
            &grid,
        )
        .unwrap();
        random_element(&basis, &BoxConstraint { r }, seed).unwrap()
    }

    fn guarded(k: &[i64], t: f64, cfg: &SolverConfig) -> ComplexFrequency<f64> {
        cfg.guard(make_zeta::<f64>(k, t).unwrap()).unwrap().0
    }

    #[test]
    fn zero_potential_gives_zero_remainder() {
        let cfg = SolverConfig::new(grid16());
        let q = Field::<f64>::zeros(cfg.grid);
        let freq = guarded(&[1, 0, 0], 20.0, &cfg);
        let sol = solve_remainder(&q, &freq, &cfg).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.r.l2_norm(), 0.0);
    }

    #[test]
    fn constant_potential_gives_zero_remainder() {
        // every non-grounded equation is homogeneous; the grounded ones are
        // discarded
        for method in [Method::Neumann, Method::Krylov] {
            let mut cfg = SolverConfig::new(grid16());
            cfg.method = method;
            let q = Field::from_fn(cfg.grid, |_| Complex::new(2.5f64, 0.0));
            let freq = guarded(&[1, 1, 0], 25.0, &cfg);
            let sol = solve_remainder(&q, &freq, &cfg).unwrap();
            assert!(sol.r.l2_norm() < 1e-13, "{method:?}");
            assert_eq!(sol.iterations, 0);
        }
    }

    #[test]
    fn residual_contract_holds() {
        let cfg = SolverConfig::new(grid16());
        let q = dyadic_q(cfg.grid, 3, 5.0);
        for k in [[1i64, 0, 0], [2, 1, 0], [1, 1, 1]] {
            let freq = guarded(&k, 30.0, &cfg);
            let sol = solve_remainder(&q, &freq, &cfg).unwrap();
            assert!(sol.residual <= cfg.tol, "k={k:?} residual {}", sol.residual);
        }
    }

    #[test]
    fn neumann_and_krylov_agree() {
        let base = SolverConfig::new(grid16());
        let q = dyadic_q(base.grid, 7, 5.0);
        let freq = guarded(&[2, 1, 0], 60.0, &base);
        let mut cfg_n = base;
        cfg_n.method = Method::Neumann;
        let a = solve_remainder(&q, &freq, &cfg_n).unwrap();
        let b = solve_remainder(&q, &freq, &base).unwrap();
        let dist = a.r.dist_l2(&b.r).unwrap();
        assert!(dist < 1e-8, "methods disagree by {dist}");
    }

    #[test]
    fn krylov_matches_dense_galerkin_oracle() {
        let grid = TorusGrid::new(3, 10).unwrap();
        let cfg = SolverConfig::new(grid);
        let basis = build_basis::<f64>(&SubspaceSpec::bandlimited(3, 4), &grid).unwrap();
        let q = random_element(&basis, &BoxConstraint { r: 5.0 }, 11).unwrap();
        let freq = guarded(&[1, 0, 0], 40.0, &cfg);
        let sol = solve_remainder(&q, &freq, &cfg).unwrap();
        let oracle = crate::verify::oracles::dense_remainder_solve(&q, &freq).unwrap();
        let dist = sol.r.dist_l2(&oracle).unwrap();
        assert!(dist < 1e-8, "krylov vs dense oracle distance {dist}");
    }

    #[test]
    fn neumann_diverges_for_tiny_t() {
        let mut cfg = SolverConfig::new(grid16());
        cfg.method = Method::Neumann;
        let q = dyadic_q(cfg.grid, 5, 400.0);
        let freq = guarded(&[1, 0, 0], 0.37, &cfg);
        match solve_remainder(&q, &freq, &cfg) {
            Err(Error::SolverDiverged(_)) | Err(Error::IterationCap { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn iteration_cap_reported() {
        let mut cfg = SolverConfig::new(grid16());
        cfg.method = Method::Neumann;
        cfg.max_iter = 1;
        cfg.tol = 1e-15;
        let q = dyadic_q(cfg.grid, 5, 5.0);
        let freq = guarded(&[1, 0, 0], 20.0, &cfg);
        match solve_remainder(&q, &freq, &cfg) {
            Err(Error::IterationCap { cap: 1, .. }) => {}
            other => panic!("expected iteration cap, got {other:?}"),
        }
    }

    #[test]
    fn remainder_norm_decays_like_inverse_t() {
        let cfg = SolverConfig::new(grid16());
        let q = dyadic_q(cfg.grid, 1, 5.0);
        let pts = remainder_decay(&q, &[1, 0, 0], &[20.0, 40.0, 80.0], &cfg).unwrap();
        // least-squares slope in log-log
        let n = pts.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &(t, r) in &pts {
            let (x, y) = (t.ln(), r.ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(slope <= -0.9, "decay slope {slope}, points {pts:?}");
    }

    #[test]
    fn gradient_norm_stays_bounded_in_t() {
        let cfg = SolverConfig::new(grid16());
        let q = dyadic_q(cfg.grid, 9, 5.0);
        let sol20 =
            solve_remainder(&q, &guarded(&[1, 1, 0], 20.0, &cfg), &cfg).unwrap();
        let sol160 =
            solve_remainder(&q, &guarded(&[1, 1, 0], 160.0, &cfg), &cfg).unwrap();
        let g20 = gradient_l2_norm(&forward_transform(&sol20.r));
        let g160 = gradient_l2_norm(&forward_transform(&sol160.r));
        assert!(g160 <= 2.0 * g20, "gradient grew: {g160} vs {g20}");
    }
}
