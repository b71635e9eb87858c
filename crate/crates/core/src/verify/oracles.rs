//! Independent computational routes used to cross-check the main
//! implementation. These deliberately avoid the code paths they audit:
//! the dense solver assembles and factors the full Galerkin matrix instead
//! of iterating with FFTs, and the balancing oracle sums coefficient tails
//! directly instead of using the Gram-complement identity.

use crate::cgo::{ComplexFrequency, SymbolTable};
use crate::error::{Error, Result};
use crate::spectral::field::Field;
use crate::spectral::fourier::{forward_transform, inverse_transform, Spectrum};
use crate::spectral::ordering::FreqOrdering;
use crate::subspaces::Partition;
use num_complex::Complex;
use num_traits::Zero;
use std::f64::consts::PI;

/// Solve a dense complex system in place by LU with partial pivoting.
/// Returns the solution; `a` is row-major n x n.
pub fn lu_solve(mut a: Vec<Complex<f64>>, mut b: Vec<Complex<f64>>) -> Result<Vec<Complex<f64>>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (pivot, pmax) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .fold((col, -1.0), |acc, (r, v)| if v > acc.1 { (r, v) } else { acc });
        if pmax < 1e-300 {
            return Err(Error::Format("singular dense system".into()));
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
            perm.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for r in (col + 1)..n {
            let factor = a[r * n + col] / diag;
            if factor == Complex::zero() {
                continue;
            }
            a[r * n + col] = Complex::zero();
            for j in (col + 1)..n {
                let v = a[col * n + j];
                a[r * n + j] -= factor * v;
            }
            let bv = b[col];
            b[r] -= factor * bv;
        }
    }
    let mut x = vec![Complex::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in (row + 1)..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// Dense grounded Fourier-Galerkin solve of the remainder equation: build
/// the full matrix σ(m)δ_{mm'} - q̂((m-m') mod box) with grounded rows
/// replaced by the identity, factor it, and return the remainder field.
pub fn dense_remainder_solve(
    q: &Field<f64>,
    freq: &ComplexFrequency<f64>,
) -> Result<Field<f64>> {
    let grid = *q.grid();
    let n_modes = grid.len();
    let d = grid.dim();
    let n = grid.points_per_axis();
    let table = SymbolTable::build(&grid, freq);
    let qhat = forward_transform(q);

    // per-mode storage indices for wrapped differences
    let mut decoded = vec![0usize; n_modes * d];
    let mut idx = vec![0usize; d];
    for flat in 0..n_modes {
        grid.decode(flat, &mut idx);
        decoded[flat * d..(flat + 1) * d].copy_from_slice(&idx);
    }

    let mut a = vec![Complex::<f64>::zero(); n_modes * n_modes];
    let mut rhs = vec![Complex::<f64>::zero(); n_modes];
    for row in 0..n_modes {
        if table.grounded()[row] {
            a[row * n_modes + row] = Complex::new(1.0, 0.0);
            continue;
        }
        rhs[row] = qhat.coeffs()[row];
        a[row * n_modes + row] = table.symbol()[row];
        let ri = &decoded[row * d..(row + 1) * d];
        for col in 0..n_modes {
            let ci = &decoded[col * d..(col + 1) * d];
            let mut diff_flat = 0usize;
            for axis in 0..d {
                diff_flat = diff_flat * n + (ri[axis] + n - ci[axis]) % n;
            }
            a[row * n_modes + col] -= qhat.coeffs()[diff_flat];
        }
    }

    let r_spec = lu_solve(a, rhs)?;
    Ok(inverse_transform(&Spectrum::from_coeffs(grid, r_spec)?))
}

/// Direct tail computation of ‖P_N^⊥ F P_W‖ for the two-slab partition
/// (the unit cube split in half along the first axis).
///
/// All nonzero coefficients sit on the k₁-axis, so the tail Gram matrix is
/// 2x2 with entries a ± b determined by axis sums; the part of the axis not
/// reached by the enumerated prefix is summed in closed form through
/// Σ_{odd m>0} m⁻² = π²/8.
pub fn brute_tail_norm_two_slabs(
    partition: &Partition,
    ordering: &FreqOrdering,
    n_channels: usize,
    cutoff: usize,
) -> f64 {
    assert_eq!(partition.cells.len(), 2);
    let upto = cutoff.min(ordering.len());

    // Gram of the enumerated tail, plus the set of axis modes seen anywhere
    // in the enumerated prefix.
    let mut t11 = 0.0f64;
    let mut t12 = Complex::new(0.0, 0.0);
    let mut seen_axis: Vec<i64> = Vec::new();
    let w = [
        1.0 / partition.cells[0].volume().sqrt(),
        1.0 / partition.cells[1].volume().sqrt(),
    ];
    for (l, k) in ordering.iter().enumerate().take(upto) {
        let on_axis = k[1..].iter().all(|&c| c == 0);
        if on_axis {
            seen_axis.push(k[0]);
        }
        if l < n_channels {
            continue;
        }
        let c1 = super::super::subspaces::char_fourier(&partition.cells[0], k) * w[0];
        let c2 = super::super::subspaces::char_fourier(&partition.cells[1], k) * w[1];
        t11 += c1.norm_sqr(); // = |c2|² by symmetry of the two slabs
        t12 += c1.conj() * c2;
    }

    // axis modes never enumerated: exact closed-form remainder
    // |ŵ_i((m,0,0))|² = 2/(π² m²) for odd m; cross terms carry (-1)^m = -1
    let mut sum_missing = 2.0 / PI.powi(2)
        * (PI * PI / 4.0
            - seen_axis
                .iter()
                .filter(|&&m| m % 2 != 0)
                .map(|&m| 1.0 / (m * m) as f64)
                .sum::<f64>());
    if sum_missing < 0.0 {
        sum_missing = 0.0;
    }
    t11 += sum_missing;
    t12 -= Complex::new(sum_missing, 0.0);

    // eigenvalues of [[t11, t12],[conj(t12), t11]] are t11 ± |t12|
    let lambda_max = t11 + t12.norm();
    lambda_max.max(0.0).sqrt()
}
