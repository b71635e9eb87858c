//! Dense Hermitian eigenvalues and a matrix-free GMRES.
//!
//! The balancing computation needs all eigenvalues of small Hermitian Gram
//! matrices (dimension = dim W, at most a few hundred); a cyclic Jacobi
//! sweep is plenty. The CGO solver needs a restarted Krylov method applied
//! to an FFT-based operator; GMRES with modified Gram-Schmidt and Givens
//! rotations does that.

use crate::scalar::Scalar;
use num_complex::Complex;
use num_traits::Zero;

/// Eigenvalues of a Hermitian matrix (row-major, m x m), ascending.
pub fn hermitian_eigenvalues<T: Scalar>(a: &[Complex<T>], m: usize) -> Vec<T> {
    assert_eq!(a.len(), m * m);
    let mut a = a.to_vec();
    let frob: T = a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
    let tol = T::cast(1e-14) * (frob + T::one());

    for _sweep in 0..60 {
        let mut off = T::zero();
        for p in 0..m {
            for q in (p + 1)..m {
                off += a[p * m + q].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let z = a[p * m + q];
                let zn = z.norm();
                if zn <= T::cast(1e-300) {
                    continue;
                }
                let phi = z / zn;
                let app = a[p * m + p].re;
                let aqq = a[q * m + q].re;
                let tau = (aqq - app) / (zn + zn);
                let t = if tau == T::zero() {
                    T::one()
                } else {
                    -tau.signum() / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let s_phi = phi.scale(s);
                let s_phi_conj = phi.conj().scale(s);

                // columns: A <- A U with U = [[c, -s φ],[s φ̄, c]] on (p,q)
                for r in 0..m {
                    let arp = a[r * m + p];
                    let arq = a[r * m + q];
                    a[r * m + p] = arp.scale(c) + s_phi_conj * arq;
                    a[r * m + q] = arq.scale(c) - s_phi * arp;
                }
                // rows: A <- U* A
                for r in 0..m {
                    let apr = a[p * m + r];
                    let aqr = a[q * m + r];
                    a[p * m + r] = apr.scale(c) + s_phi * aqr;
                    a[q * m + r] = aqr.scale(c) - s_phi_conj * apr;
                }
                a[p * m + q] = Complex::zero();
                a[q * m + p] = Complex::zero();
                a[p * m + p] = Complex::new(a[p * m + p].re, T::zero());
                a[q * m + q] = Complex::new(a[q * m + q].re, T::zero());
            }
        }
    }

    let mut eig: Vec<T> = (0..m).map(|i| a[i * m + i].re).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_lambda_max<T: Scalar>(a: &[Complex<T>], m: usize) -> T {
    *hermitian_eigenvalues(a, m)
        .last()
        .expect("matrix is non-empty")
}

#[derive(Clone, Debug)]
pub struct GmresOutcome<T: Scalar> {
    pub x: Vec<Complex<T>>,
    pub iterations: usize,
    /// True residual norm ‖b - A x‖ of the returned iterate.
    pub residual: T,
    pub converged: bool,
}

fn dot<T: Scalar>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::zero();
    for (a, b) in u.iter().zip(v) {
        acc += a * b.conj();
    }
    acc
}

fn norm<T: Scalar>(u: &[Complex<T>]) -> T {
    u.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}

/// Restarted GMRES for A x = b with A given as a matrix-free operator.
/// Deterministic: fixed restart length, sequential reductions.
pub fn gmres<T: Scalar, F>(
    apply: F,
    b: &[Complex<T>],
    restart: usize,
    max_iter: usize,
    tol_abs: T,
) -> GmresOutcome<T>
where
    F: Fn(&[Complex<T>], &mut [Complex<T>]),
{
    let n = b.len();
    let mut x = vec![Complex::zero(); n];
    let mut ax = vec![Complex::zero(); n];
    let bnorm = norm(b);
    if bnorm <= T::cast(1e-300) {
        return GmresOutcome {
            x,
            iterations: 0,
            residual: T::zero(),
            converged: true,
        };
    }

    let m = restart.max(1);
    let mut total_iters = 0usize;
    let mut v: Vec<Vec<Complex<T>>> = Vec::new();
    let mut h = vec![Complex::<T>::zero(); (m + 1) * m];
    let mut cs = vec![Complex::<T>::zero(); m];
    let mut sn = vec![Complex::<T>::zero(); m];
    let mut g = vec![Complex::<T>::zero(); m + 1];

    'outer: while total_iters < max_iter {
        apply(&x, &mut ax);
        let mut r: Vec<Complex<T>> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        if beta <= tol_abs {
            break;
        }
        for ri in &mut r {
            *ri = ri.unscale(beta);
        }
        v.clear();
        v.push(r);
        for gi in g.iter_mut() {
            *gi = Complex::zero();
        }
        g[0] = Complex::new(beta, T::zero());

        let mut k_used = 0;
        for k in 0..m {
            if total_iters >= max_iter {
                break;
            }
            total_iters += 1;
            let mut w = vec![Complex::zero(); n];
            apply(&v[k], &mut w);
            for i in 0..=k {
                let hik = dot(&w, &v[i]);
                h[i * m + k] = hik;
                for (wj, vj) in w.iter_mut().zip(&v[i]) {
                    *wj -= hik * vj;
                }
            }
            let wnorm = norm(&w);
            h[(k + 1) * m + k] = Complex::new(wnorm, T::zero());

            // apply accumulated Givens rotations to the new column
            for i in 0..k {
                let hi = h[i * m + k];
                let hi1 = h[(i + 1) * m + k];
                h[i * m + k] = cs[i].conj() * hi + sn[i].conj() * hi1;
                h[(i + 1) * m + k] = cs[i] * hi1 - sn[i] * hi;
            }
            let hkk = h[k * m + k];
            let hk1k = h[(k + 1) * m + k];
            let denom = (hkk.norm_sqr() + hk1k.norm_sqr()).sqrt();
            if denom > T::zero() {
                let c = hkk.unscale(denom);
                let s = hk1k.unscale(denom);
                cs[k] = c;
                sn[k] = s;
                h[k * m + k] = Complex::new(denom, T::zero());
                h[(k + 1) * m + k] = Complex::zero();
                // g[k+1] is still zero within this cycle
                let gk = g[k];
                g[k] = c.conj() * gk;
                g[k + 1] = -s * gk;
            }
            k_used = k + 1;

            let res_est = g[k + 1].norm();
            if res_est <= tol_abs || wnorm <= T::cast(1e-300) {
                break;
            }
            let mut vk1 = w;
            for x in &mut vk1 {
                *x = x.unscale(wnorm);
            }
            v.push(vk1);
        }

        // back-substitute y from the triangularized system
        let kk = k_used;
        if kk == 0 {
            break 'outer;
        }
        let mut y = vec![Complex::<T>::zero(); kk];
        for i in (0..kk).rev() {
            let mut acc = g[i];
            for j in (i + 1)..kk {
                acc -= h[i * m + j] * y[j];
            }
            y[i] = acc / h[i * m + i];
        }
        for (i, yi) in y.iter().enumerate() {
            for (xj, vj) in x.iter_mut().zip(&v[i]) {
                *xj += yi * vj;
            }
        }

        let est = g[kk].norm();
        if est <= tol_abs {
            break;
        }
    }

    apply(&x, &mut ax);
    let res = norm(
        &b.iter()
            .zip(&ax)
            .map(|(bi, ai)| bi - ai)
            .collect::<Vec<_>>(),
    );
    GmresOutcome {
        x,
        iterations: total_iters,
        converged: res <= tol_abs,
        residual: res,
    }
}
