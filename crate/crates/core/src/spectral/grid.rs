//! Uniform sampling of the unit torus.

use crate::error::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize};

/// Uniform n^d sampling of T^d = [0,1)^d.
///
/// Nodes are x_j = j/n for j in {0,...,n-1}^d, stored row-major with axis 0
/// slowest. The representable frequency box is {-n/2+1,...,n/2}^d; a
/// frequency k maps to the storage index k mod n along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TorusGrid {
    d: usize,
    n: usize,
}

// deserialization goes through the validating constructor
impl<'de> Deserialize<'de> for TorusGrid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            d: usize,
            n: usize,
        }
        let raw = Raw::deserialize(deserializer)?;
        TorusGrid::new(raw.d, raw.n).map_err(serde::de::Error::custom)
    }
}

impl TorusGrid {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::DimensionTooSmall(d));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::BadGridSize(n));
        }
        let mut len: usize = 1;
        for _ in 0..d {
            len = len
                .checked_mul(n)
                .filter(|&l| l <= 1 << 34)
                .ok_or(Error::GridTooLarge { d, n })?;
        }
        let _ = len;
        Ok(Self { d, n })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Grid spacing h = 1/n.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Total number of nodes n^d.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest representable frequency per axis (n/2).
    pub fn max_freq(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Smallest representable frequency per axis (-n/2 + 1).
    pub fn min_freq(&self) -> i64 {
        -((self.n / 2) as i64) + 1
    }

    /// Decompose a flat node index into per-axis indices.
    pub fn decode(&self, mut flat: usize, out: &mut [usize]) {
        debug_assert_eq!(out.len(), self.d);
        for a in (0..self.d).rev() {
            out[a] = flat % self.n;
            flat /= self.n;
        }
    }

    /// Flat index of per-axis indices.
    pub fn encode(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.d);
        idx.iter().fold(0, |acc, &j| acc * self.n + j)
    }

    /// Frequency represented by storage index j along one axis.
    pub fn freq_of_index(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// Storage index of an in-box frequency along one axis.
    pub fn index_of_freq(&self, k: i64) -> Option<usize> {
        if k < self.min_freq() || k > self.max_freq() {
            return None;
        }
        Some(k.rem_euclid(self.n as i64) as usize)
    }

    /// Frequency vector at a flat storage index.
    pub fn freq_at(&self, mut flat: usize, out: &mut [i64]) {
        debug_assert_eq!(out.len(), self.d);
        for a in (0..self.d).rev() {
            out[a] = self.freq_of_index(flat % self.n);
            flat /= self.n;
        }
    }

    /// Flat storage index of a frequency vector, if representable.
    pub fn flat_of_freq(&self, k: &[i64]) -> Option<usize> {
        debug_assert_eq!(k.len(), self.d);
        let mut flat = 0usize;
        for &kj in k {
            flat = flat * self.n + self.index_of_freq(kj)?;
        }
        Some(flat)
    }

    /// Node coordinates x = j/n at a flat index.
    pub fn node_at(&self, mut flat: usize, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.d);
        let h = self.spacing();
        for a in (0..self.d).rev() {
            out[a] = (flat % self.n) as f64 * h;
            flat /= self.n;
        }
    }
}
