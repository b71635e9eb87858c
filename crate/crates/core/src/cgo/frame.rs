//! Orthonormal frames (ξ, η) perpendicular to a lattice frequency.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Unit vectors ξ, η with ξ·η = ξ·k = η·k = 0, chosen deterministically.
///
/// For k = 0 the convention is (e₁, e₂). Otherwise the two canonical basis
/// vectors with smallest indices that make {k, e_a, e_b} three-dimensional
/// are Gram-Schmidt orthogonalized against k and each other.
pub fn make_frame<T: Scalar>(k: &[i64]) -> Result<(Vec<T>, Vec<T>)> {
    let d = k.len();
    if d < 3 {
        return Err(Error::DimensionTooSmall(d));
    }
    let mut e1 = vec![T::zero(); d];
    let mut e2 = vec![T::zero(); d];
    if k.iter().all(|&c| c == 0) {
        e1[0] = T::one();
        e2[1] = T::one();
        return Ok((e1, e2));
    }

    let kf: Vec<T> = k.iter().map(|&c| T::cast(c as f64)).collect();
    let kn = norm(&kf);
    let khat: Vec<T> = kf.iter().map(|&c| c / kn).collect();
    let tol = T::cast(1e-12);

    for a in 0..d {
        for b in (a + 1)..d {
            // ξ from e_a
            let mut xi = vec![T::zero(); d];
            xi[a] = T::one();
            let proj = khat[a];
            for (x, &kh) in xi.iter_mut().zip(&khat) {
                *x = *x - proj * kh;
            }
            let xin = norm(&xi);
            if xin <= tol {
                continue;
            }
            for x in &mut xi {
                *x = *x / xin;
            }
            // η from e_b
            let mut eta = vec![T::zero(); d];
            eta[b] = T::one();
            let pk = khat[b];
            let px = xi[b];
            for i in 0..d {
                eta[i] = eta[i] - pk * khat[i] - px * xi[i];
            }
            let en = norm(&eta);
            if en <= tol {
                continue;
            }
            for x in &mut eta {
                *x = *x / en;
            }
            return Ok((xi, eta));
        }
    }
    unreachable!("a nonzero k in d >= 3 always admits a frame")
}
