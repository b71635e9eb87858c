//! The balancing norm ‖P_N^⊥ F P_W‖ and the selection of N.
//!
//! Since the coefficient map is unitary, the norm equals
//! √λ_max(I_M - G_N) with (G_N)_{ij} = Σ_{l≤N} conj(ŵ_i(k_l))·ŵ_j(k_l).
//! The Gram matrix uses the closed-form Fourier coefficients of the basis,
//! never grid FFTs, so the result is exact up to the eigensolver tolerance.

use crate::error::{Error, Result};
use crate::linalg::hermitian_lambda_max;
use crate::scalar::Scalar;
use crate::spectral::ordering::FreqOrdering;
use crate::subspaces::SubspaceBasis;
use num_complex::Complex;
use num_traits::Zero;

fn gram_prefix<T: Scalar>(
    basis: &SubspaceBasis<T>,
    ordering: &FreqOrdering,
    n: usize,
) -> Vec<Complex<T>> {
    let m = basis.len();
    let mut gram = vec![Complex::<T>::zero(); m * m];
    let mut coeffs = vec![Complex::<T>::zero(); m];
    for l in 0..n {
        let k = ordering.point(l);
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = basis.coeff(i, k);
        }
        for i in 0..m {
            for j in 0..m {
                gram[i * m + j] += coeffs[i].conj() * coeffs[j];
            }
        }
    }
    gram
}

/// ‖P_N^⊥ F P_W‖ for the first `n` ordered channels.
pub fn balancing_norm<T: Scalar>(
    basis: &SubspaceBasis<T>,
    ordering: &FreqOrdering,
    n: usize,
) -> T {
    let m = basis.len();
    let mut a = gram_prefix(basis, ordering, n.min(ordering.len()));
    // I - G_N
    for x in a.iter_mut() {
        *x = -*x;
    }
    for i in 0..m {
        a[i * m + i] += Complex::new(T::one(), T::zero());
    }
    let lambda = hermitian_lambda_max(&a, m);
    lambda.max(T::zero()).sqrt()
}

/// Smallest N ≤ n_max with balancing norm ≤ threshold. The norm is
/// non-increasing in N, so binary search applies.
pub fn choose_n<T: Scalar>(
    basis: &SubspaceBasis<T>,
    ordering: &FreqOrdering,
    threshold: f64,
    n_max: usize,
) -> Result<usize> {
    let n_max = n_max.min(ordering.len());
    let thr = T::cast(threshold);
    let at_max = balancing_norm(basis, ordering, n_max);
    if at_max > thr {
        return Err(Error::BalancingNotFound {
            n_max,
            threshold,
            at_max: at_max.to_f64_lossy(),
        });
    }
    let (mut lo, mut hi) = (1usize, n_max);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if balancing_norm(basis, ordering, mid) <= thr {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}
