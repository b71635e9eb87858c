//! Finite-dimensional prior subspaces W of L^∞(T^d) and their projections.

pub mod basis;
pub mod project;
pub mod random;

pub use basis::{build_basis, char_fourier, BasisElement, CoeffForm, SubspaceBasis};
pub use project::{project_box, project_subspace};
pub use random::random_element;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A d-dimensional interval [corner, corner + sides) inside [0,1]^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub corner: Vec<f64>,
    pub sides: Vec<f64>,
}

impl Cell {
    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.corner.iter().zip(&self.sides))
            .all(|(&xi, (&c, &s))| xi >= c - 1e-12 && xi < c + s - 1e-12)
    }

    fn interiors_overlap(&self, other: &Cell) -> bool {
        self.corner
            .iter()
            .zip(&self.sides)
            .zip(other.corner.iter().zip(&other.sides))
            .all(|((&c1, &s1), (&c2, &s2))| c1 + s1 > c2 + 1e-12 && c2 + s2 > c1 + 1e-12)
    }
}

/// A collection of pairwise-disjoint cells covering part of [0,1]^d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub cells: Vec<Cell>,
}

impl Partition {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        for (i, c) in cells.iter().enumerate() {
            for (&corner, &side) in c.corner.iter().zip(&c.sides) {
                if !(side > 0.0) || corner < -1e-12 || corner + side > 1.0 + 1e-12 {
                    return Err(Error::CellOutOfRange { index: i });
                }
            }
        }
        for i in 0..cells.len() {
            for j in (i + 1)..cells.len() {
                if cells[i].interiors_overlap(&cells[j]) {
                    return Err(Error::OverlappingCells { first: i, second: j });
                }
            }
        }
        Ok(Self { cells })
    }

    /// Uniform dyadic partition of [0,1]^d into 2^{level·d} cubes.
    pub fn dyadic(d: usize, level: u32) -> Self {
        let per_axis = 1usize << level;
        let side = 1.0 / per_axis as f64;
        let mut cells = Vec::with_capacity(per_axis.pow(d as u32));
        let mut idx = vec![0usize; d];
        loop {
            cells.push(Cell {
                corner: idx.iter().map(|&i| i as f64 * side).collect(),
                sides: vec![side; d],
            });
            let mut axis = d;
            loop {
                if axis == 0 {
                    return Self { cells };
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < per_axis {
                    break;
                }
                idx[axis] = 0;
            }
        }
    }

    /// Split [0,1]^d into `m` equal slabs along the first axes; `m` must be a
    /// product of per-axis counts 2^a. Convenience used by tests and configs:
    /// m = 2 splits axis 1, m = 4 splits axes 1 and 2, m = 8 is the octant
    /// partition.
    pub fn uniform_boxes(d: usize, splits: &[usize]) -> Result<Self> {
        if splits.len() > d || splits.iter().any(|&s| s == 0) {
            return Err(Error::Config(
                "need one split count per axis, each >= 1".into(),
            ));
        }
        let mut counts = vec![1usize; d];
        counts[..splits.len()].copy_from_slice(splits);
        let mut cells = vec![Cell {
            corner: vec![0.0; d],
            sides: vec![1.0; d],
        }];
        for (axis, &cnt) in counts.iter().enumerate() {
            if cnt == 1 {
                continue;
            }
            let mut next = Vec::with_capacity(cells.len() * cnt);
            for cell in &cells {
                let s = cell.sides[axis] / cnt as f64;
                for i in 0..cnt {
                    let mut c = cell.clone();
                    c.corner[axis] = cell.corner[axis] + i as f64 * s;
                    c.sides[axis] = s;
                    next.push(c);
                }
            }
            cells = next;
        }
        Partition::new(cells)
    }

    /// Smallest side weight A with sides written as a_j^i · M^{-1/d}.
    pub fn min_weight(&self) -> f64 {
        let m = self.cells.len().max(1) as f64;
        let scale = m.powf(1.0 / self.cells[0].corner.len() as f64);
        self.cells
            .iter()
            .flat_map(|c| c.sides.iter().map(move |&s| s * scale))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Which family the prior space belongs to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// span{e_k : ‖k‖_∞ ≤ B}, dimension (2B+1)^d.
    Bandlimited { b: usize },
    /// span of normalized indicators of the partition cells.
    Piecewise { partition: Partition },
    /// Tensor Haar functions up to `level`; spans the same functions as the
    /// dyadic piecewise partition with 2^{level·d} cells.
    Haar { level: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceSpec {
    pub family: Family,
    pub d: usize,
}

impl SubspaceSpec {
    pub fn bandlimited(d: usize, b: usize) -> Self {
        Self {
            family: Family::Bandlimited { b },
            d,
        }
    }

    pub fn piecewise(d: usize, partition: Partition) -> Self {
        Self {
            family: Family::Piecewise { partition },
            d,
        }
    }

    pub fn haar(d: usize, level: u32) -> Self {
        Self {
            family: Family::Haar { level },
            d,
        }
    }

    pub fn dimension(&self) -> usize {
        match &self.family {
            Family::Bandlimited { b } => (2 * b + 1).pow(self.d as u32),
            Family::Piecewise { partition } => partition.cells.len(),
            Family::Haar { level } => 1usize << (*level as usize * self.d),
        }
    }
}

/// Sup-norm box W_R = {q ∈ W : ‖q‖_∞ ≤ R}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxConstraint {
    pub r: f64,
}

impl BoxConstraint {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Config(format!("box radius must be positive, got {r}")));
        }
        Ok(Self { r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_partition_counts_cells() {
        let p = Partition::dyadic(3, 1);
        assert_eq!(p.cells.len(), 8);
        let total: f64 = p.cells.iter().map(|c| c.volume()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn overlap_detection() {
        let bad = Partition::new(vec![
            Cell {
                corner: vec![0.0, 0.0, 0.0],
                sides: vec![0.6, 1.0, 1.0],
            },
            Cell {
                corner: vec![0.5, 0.0, 0.0],
                sides: vec![0.5, 1.0, 1.0],
            },
        ]);
        assert!(matches!(bad, Err(Error::OverlappingCells { .. })));
    }

    #[test]
    fn out_of_range_cell_rejected() {
        let bad = Partition::new(vec![Cell {
            corner: vec![0.8, 0.0, 0.0],
            sides: vec![0.5, 1.0, 1.0],
        }]);
        assert!(matches!(bad, Err(Error::CellOutOfRange { index: 0 })));
    }

    #[test]
    fn uniform_boxes_match_expected_shapes() {
        let p2 = Partition::uniform_boxes(3, &[2]).unwrap();
        assert_eq!(p2.cells.len(), 2);
        assert_eq!(p2.cells[0].sides, vec![0.5, 1.0, 1.0]);
        let p8 = Partition::uniform_boxes(3, &[2, 2, 2]).unwrap();
        assert_eq!(p8.cells.len(), 8);
        assert_eq!(p8.cells[7].corner, vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn dimensions() {
        assert_eq!(SubspaceSpec::bandlimited(3, 1).dimension(), 27);
        assert_eq!(SubspaceSpec::bandlimited(3, 2).dimension(), 125);
        assert_eq!(SubspaceSpec::haar(3, 1).dimension(), 8);
    }
}
