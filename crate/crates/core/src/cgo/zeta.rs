//! The complex frequencies ζ₁, ζ₂ of one measurement channel.

use super::frame::make_frame;
use crate::error::Result;
use crate::scalar::Scalar;
use num_complex::Complex;
use num_traits::Zero;

/// One CGO channel: lattice frequency k, size parameter t, frame (ξ, η) and
/// the two complex frequencies
///
///   ζ₁ = -i(πk + tξ) + √(t² + π²|k|²) η,
///   ζ₂ = -i(πk - tξ) - √(t² + π²|k|²) η,
///
/// which satisfy ζ_j·ζ_j = 0 and ζ₁ + ζ₂ = -2πik.
#[derive(Clone, Debug)]
pub struct ComplexFrequency<T: Scalar> {
    pub k: Vec<i64>,
    pub t: T,
    pub xi: Vec<T>,
    pub eta: Vec<T>,
    pub zeta1: Vec<Complex<T>>,
    pub zeta2: Vec<Complex<T>>,
}

/// Build the channel for (k, t) with the deterministic frame of [`make_frame`].
pub fn make_zeta<T: Scalar>(k: &[i64], t: T) -> Result<ComplexFrequency<T>> {
    let (xi, eta) = make_frame::<T>(k)?;
    let pi = T::PI();
    let norm_k_sq: T = k.iter().map(|&c| T::cast((c * c) as f64)).sum();
    let radius = (t * t + pi * pi * norm_k_sq).sqrt();

    let d = k.len();
    let mut zeta1 = Vec::with_capacity(d);
    let mut zeta2 = Vec::with_capacity(d);
    for a in 0..d {
        let ka = T::cast(k[a] as f64);
        zeta1.push(Complex::new(radius * eta[a], -(pi * ka + t * xi[a])));
        zeta2.push(Complex::new(-radius * eta[a], -(pi * ka - t * xi[a])));
    }
    Ok(ComplexFrequency {
        k: k.to_vec(),
        t,
        xi,
        eta,
        zeta1,
        zeta2,
    })
}

impl<T: Scalar> ComplexFrequency<T> {
    /// Maximum violation of the defining identities; used by tests and debug
    /// assertions.
    pub fn invariant_residual(&self) -> T {
        let two_pi = T::PI() + T::PI();
        let mut worst = T::zero();
        for zeta in [&self.zeta1, &self.zeta2] {
            let mut sq = Complex::<T>::zero();
            for z in zeta.iter() {
                sq += z * z;
            }
            worst = worst.max(sq.norm());
        }
        for a in 0..self.k.len() {
            let sum = self.zeta1[a] + self.zeta2[a];
            let want = Complex::new(T::zero(), -two_pi * T::cast(self.k[a] as f64));
            worst = worst.max((sum - want).norm());
        }
        // scale-free: the identities are quadratic in |ζ| ~ t + π|k|
        let pi_sq = T::PI() * T::PI();
        let norm_k_sq: T = self.k.iter().map(|&c| T::cast((c * c) as f64)).sum();
        let scale = T::one() + self.t * self.t + pi_sq * norm_k_sq;
        worst / scale
    }

    /// Same channel at a different t (frame preserved by construction).
    pub fn with_t(&self, t: T) -> Result<Self> {
        make_zeta(&self.k, t)
    }
}
