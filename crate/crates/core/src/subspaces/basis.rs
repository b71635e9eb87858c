//! Orthonormal bases of the prior subspaces, with exact Fourier coefficients.

use super::{Cell, Family, Partition, SubspaceSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::spectral::fourier::exp_field;
use crate::spectral::grid::TorusGrid;
use num_complex::Complex;
use num_traits::Zero;
use std::f64::consts::PI;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Exact Fourier coefficient ∫_cell e^{-2πik·x} dx, as a product of
/// one-dimensional integrals s·sinc(πks)·e^{-2πik(c+s/2)}.
pub fn char_fourier(cell: &Cell, k: &[i64]) -> Complex<f64> {
    debug_assert_eq!(cell.corner.len(), k.len());
    let mut out = Complex::new(1.0, 0.0);
    for ((&c, &s), &kj) in cell.corner.iter().zip(&cell.sides).zip(k) {
        let kj = kj as f64;
        let amp = s * sinc(PI * kj * s);
        let phase = -2.0 * PI * kj * (c + 0.5 * s);
        out *= Complex::from_polar(amp, phase);
    }
    out
}

/// Closed-form Fourier coefficients of a basis element.
#[derive(Clone, Debug)]
pub enum CoeffForm {
    /// ŵ(k) = δ_{k,k0}.
    Exponential { k0: Vec<i64> },
    /// ŵ(k) = Σ_i weight_i · ∫_{cell_i} e^{-2πik·x} dx.
    Cells { terms: Vec<(f64, Cell)> },
}

impl CoeffForm {
    pub fn eval<T: Scalar>(&self, k: &[i64]) -> Complex<T> {
        match self {
            CoeffForm::Exponential { k0 } => {
                if k0.as_slice() == k {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::zero()
                }
            }
            CoeffForm::Cells { terms } => {
                let mut acc = Complex::new(0.0, 0.0);
                for (w, cell) in terms {
                    acc += char_fourier(cell, k).scale(*w);
                }
                Complex::new(T::cast(acc.re), T::cast(acc.im))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BasisElement<T: Scalar> {
    pub samples: Field<T>,
    pub coeff: CoeffForm,
}

/// An orthonormal family spanning the prior space, carried both as grid
/// samples and as closed-form Fourier coefficients.
#[derive(Clone, Debug)]
pub struct SubspaceBasis<T: Scalar> {
    spec: SubspaceSpec,
    grid: TorusGrid,
    elements: Vec<BasisElement<T>>,
}

impl<T: Scalar> SubspaceBasis<T> {
    pub fn spec(&self) -> &SubspaceSpec {
        &self.spec
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &BasisElement<T> {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[BasisElement<T>] {
        &self.elements
    }

    /// Exact Fourier coefficient ŵ_i(k).
    pub fn coeff(&self, i: usize, k: &[i64]) -> Complex<T> {
        self.elements[i].coeff.eval(k)
    }

    /// Whether members of span(W) are piecewise constant, so the sup-norm
    /// projection decouples into per-cell clipping.
    pub fn clips_pointwise(&self) -> bool {
        matches!(
            self.spec.family,
            Family::Piecewise { .. } | Family::Haar { .. }
        )
    }
}

fn aligned_index(x: f64, n: usize, cell_index: usize) -> Result<usize> {
    let scaled = x * n as f64;
    let rounded = scaled.round();
    if (scaled - rounded).abs() > 1e-9 {
        return Err(Error::MisalignedPartition {
            index: cell_index,
            n,
        });
    }
    Ok(rounded as usize)
}

/// Grid index ranges [lo, hi) of a grid-aligned cell.
fn cell_index_ranges(
    cell: &Cell,
    grid: &TorusGrid,
    cell_index: usize,
) -> Result<Vec<(usize, usize)>> {
    let n = grid.points_per_axis();
    cell.corner
        .iter()
        .zip(&cell.sides)
        .map(|(&c, &s)| {
            let lo = aligned_index(c, n, cell_index)?;
            let hi = aligned_index(c + s, n, cell_index)?;
            Ok((lo, hi))
        })
        .collect()
}

fn indicator_samples<T: Scalar>(
    cell: &Cell,
    grid: &TorusGrid,
    cell_index: usize,
    scale: f64,
) -> Result<Field<T>> {
    let ranges = cell_index_ranges(cell, grid, cell_index)?;
    let d = grid.dim();
    let mut idx = vec![0usize; d];
    let mut values = vec![Complex::zero(); grid.len()];
    let mut mask = vec![false; grid.len()];
    let v = Complex::new(T::cast(scale), T::zero());
    for (flat, out) in values.iter_mut().enumerate() {
        grid.decode(flat, &mut idx);
        let inside = idx.iter().zip(&ranges).all(|(&j, &(lo, hi))| j >= lo && j < hi);
        if inside {
            *out = v;
            mask[flat] = true;
        }
    }
    Field::from_values(*grid, values)?.with_support(mask)
}

fn build_bandlimited<T: Scalar>(
    d: usize,
    b: usize,
    grid: &TorusGrid,
) -> Result<Vec<BasisElement<T>>> {
    let half = grid.points_per_axis() / 2;
    if b >= half {
        return Err(Error::BandwidthExceedsGrid { b, half });
    }
    let bi = b as i64;
    let mut elements = Vec::with_capacity((2 * b + 1).pow(d as u32));
    let mut k = vec![-bi; d];
    loop {
        elements.push(BasisElement {
            samples: exp_field(grid, &k, 1.0),
            coeff: CoeffForm::Exponential { k0: k.clone() },
        });
        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(elements);
            }
            axis -= 1;
            k[axis] += 1;
            if k[axis] <= bi {
                break;
            }
            k[axis] = -bi;
        }
    }
}

fn build_piecewise<T: Scalar>(
    partition: &Partition,
    grid: &TorusGrid,
) -> Result<Vec<BasisElement<T>>> {
    partition
        .cells
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let vol = cell.volume();
            let w = 1.0 / vol.sqrt();
            Ok(BasisElement {
                samples: indicator_samples(cell, grid, i, w)?,
                coeff: CoeffForm::Cells {
                    terms: vec![(w, cell.clone())],
                },
            })
        })
        .collect()
}

/// Values of the 1-D Haar system at resolution 2^level on the dyadic
/// intervals [i/2^level, (i+1)/2^level). Row r = 0 is the constant; row
/// r = 2^j + m is the scale-j wavelet shifted by m.
fn haar_1d_table(level: u32) -> Vec<Vec<f64>> {
    let res = 1usize << level;
    let mut table = vec![vec![0.0; res]; res];
    table[0] = vec![1.0; res];
    for j in 0..level {
        let scale = (2f64).powf(j as f64 / 2.0);
        let width = 1usize << (level - j); // intervals per wavelet support
        for m in 0..(1usize << j) {
            let r = (1usize << j) + m;
            let start = m * width;
            for i in 0..width {
                table[r][start + i] = if i < width / 2 { scale } else { -scale };
            }
        }
    }
    table
}

fn build_haar<T: Scalar>(
    d: usize,
    level: u32,
    grid: &TorusGrid,
) -> Result<Vec<BasisElement<T>>> {
    let res = 1usize << level;
    let n = grid.points_per_axis();
    if n % res != 0 {
        return Err(Error::HaarLevelExceedsGrid { level, n });
    }
    let table = haar_1d_table(level);
    let dyadic = Partition::dyadic(d, level);
    let nodes_per_cell = n / res;

    let mut elements = Vec::with_capacity(res.pow(d as u32));
    let mut r = vec![0usize; d];
    let mut idx = vec![0usize; d];
    loop {
        // weight of this tensor element on each dyadic cell
        let mut terms = Vec::new();
        let mut cell_weights = Vec::with_capacity(dyadic.cells.len());
        for (ci, cell) in dyadic.cells.iter().enumerate() {
            let mut w = 1.0;
            for a in 0..d {
                let interval = (cell.corner[a] * res as f64).round() as usize;
                w *= table[r[a]][interval];
            }
            cell_weights.push(w);
            if w != 0.0 {
                terms.push((w, dyadic.cells[ci].clone()));
            }
        }
        let mut values = vec![Complex::zero(); grid.len()];
        for (flat, out) in values.iter_mut().enumerate() {
            grid.decode(flat, &mut idx);
            let mut cell_flat = 0usize;
            for &j in idx.iter() {
                cell_flat = cell_flat * res + j / nodes_per_cell;
            }
            *out = Complex::new(T::cast(cell_weights[cell_flat]), T::zero());
        }
        elements.push(BasisElement {
            samples: Field::from_values(*grid, values)?,
            coeff: CoeffForm::Cells { terms },
        });

        let mut axis = d;
        loop {
            if axis == 0 {
                return Ok(elements);
            }
            axis -= 1;
            r[axis] += 1;
            if r[axis] < res {
                break;
            }
            r[axis] = 0;
        }
    }
}

/// Build the orthonormal basis of a prior space on a grid.
pub fn build_basis<T: Scalar>(spec: &SubspaceSpec, grid: &TorusGrid) -> Result<SubspaceBasis<T>> {
    if spec.d != grid.dim() {
        return Err(Error::GridMismatch);
    }
    let elements = match &spec.family {
        Family::Bandlimited { b } => build_bandlimited(spec.d, *b, grid)?,
        Family::Piecewise { partition } => build_piecewise(partition, grid)?,
        Family::Haar { level } => build_haar(spec.d, *level, grid)?,
    };
    Ok(SubspaceBasis {
        spec: spec.clone(),
        grid: *grid,
        elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fourier::forward_transform;
    use crate::spectral::make_ordering;
    use crate::spectral::OrderingKind;

    fn grid() -> TorusGrid {
        TorusGrid::new(3, 16).unwrap()
    }

    fn gram_max_error<T: Scalar>(basis: &SubspaceBasis<T>) -> f64 {
        let m = basis.len();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let g = basis
                    .element(i)
                    .samples
                    .inner(&basis.element(j).samples)
                    .unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                let err = (Complex::new(g.re.to_f64_lossy(), g.im.to_f64_lossy())
                    - Complex::new(want, 0.0))
                .norm();
                worst = worst.max(err);
            }
        }
        worst
    }

    #[test]
    fn bandlimited_gram_is_identity() {
        let basis = build_basis::<f64>(&SubspaceSpec::bandlimited(3, 1), &grid()).unwrap();
        assert_eq!(basis.len(), 27);
        assert!(gram_max_error(&basis) < 1e-12);
    }

    #[test]
    fn bandwidth_must_fit_grid() {
        let err = build_basis::<f64>(&SubspaceSpec::bandlimited(3, 8), &grid());
        assert!(matches!(err, Err(Error::BandwidthExceedsGrid { b: 8, half: 8 })));
    }

    #[test]
    fn dyadic_indicators_normalized() {
        let spec = SubspaceSpec::piecewise(3, Partition::dyadic(3, 1));
        let basis = build_basis::<f64>(&spec, &grid()).unwrap();
        assert_eq!(basis.len(), 8);
        // cells of volume 1/8 carry weight sqrt(8)
        let sup = basis.element(0).samples.sup_norm();
        assert!((sup - 8f64.sqrt()).abs() < 1e-12);
        assert!(gram_max_error(&basis) < 1e-12);
    }

    #[test]
    fn misaligned_partition_rejected() {
        let p = Partition::new(vec![Cell {
            corner: vec![0.0, 0.0, 0.0],
            sides: vec![0.3, 1.0, 1.0],
        }])
        .unwrap();
        let err = build_basis::<f64>(&SubspaceSpec::piecewise(3, p), &grid());
        assert!(matches!(err, Err(Error::MisalignedPartition { index: 0, .. })));
    }

    #[test]
    fn haar_gram_is_identity() {
        let basis = build_basis::<f64>(&SubspaceSpec::haar(3, 1), &grid()).unwrap();
        assert_eq!(basis.len(), 8);
        assert!(gram_max_error(&basis) < 1e-12);
        // every element real-valued
        for el in basis.elements() {
            let max_im = el
                .samples
                .values()
                .iter()
                .map(|v| v.im.abs())
                .fold(0.0, f64::max);
            assert_eq!(max_im, 0.0);
        }
    }

    #[test]
    fn char_fourier_hand_value() {
        // cell [0,1/2]^3, k = (1,0,0): 1/(πi)·(1/2)·(1/2) = 1/(4πi)
        let cell = Cell {
            corner: vec![0.0, 0.0, 0.0],
            sides: vec![0.5, 0.5, 0.5],
        };
        let got = char_fourier(&cell, &[1, 0, 0]);
        let want = Complex::new(0.0, -1.0 / (4.0 * PI));
        assert!((got - want).norm() < 1e-14, "got {got}");
        assert!((got.norm() - 1.0 / (4.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn char_fourier_at_zero_is_volume() {
        let cell = Cell {
            corner: vec![0.125, 0.25, 0.5],
            sides: vec![0.25, 0.5, 0.375],
        };
        let got = char_fourier(&cell, &[0, 0, 0]);
        assert!((got - Complex::new(cell.volume(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn char_fourier_matches_fft_at_zero_mode_for_aligned_cell() {
        // node counting makes the zero mode (cell volume) exact on aligned
        // cells; nonzero modes carry O(1/n) quadrature error, checked below
        let g = grid();
        let cell = Cell {
            corner: vec![0.25, 0.0, 0.5],
            sides: vec![0.5, 0.25, 0.25],
        };
        let ind = indicator_samples::<f64>(&cell, &g, 0, 1.0).unwrap();
        let spec = forward_transform(&ind);
        let got = spec.get(&[0, 0, 0]).unwrap();
        assert!((got - Complex::new(cell.volume(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn char_fourier_matches_fft_to_quadrature_accuracy() {
        // the indicator is discontinuous, so the grid transform carries an
        // O(|k|/n) quadrature error; for aligned cells the error is a pure
        // geometric-sum mismatch and halves when n doubles
        // (k chosen so no per-axis sinc factor vanishes)
        let k = [1i64, -1, 3];
        let err_at = |cell: &Cell, n: usize| {
            let g = TorusGrid::new(3, n).unwrap();
            let mut x = vec![0.0; 3];
            let mut values = vec![Complex::new(0.0, 0.0); g.len()];
            for (flat, v) in values.iter_mut().enumerate() {
                g.node_at(flat, &mut x);
                if cell.contains(&x) {
                    *v = Complex::new(1.0, 0.0);
                }
            }
            let f = Field::from_values(g, values).unwrap();
            (forward_transform(&f).get(&k).unwrap() - char_fourier(cell, &k)).norm()
        };

        let unaligned = Cell {
            corner: vec![0.11, 0.03, 0.47],
            sides: vec![0.31, 0.55, 0.22],
        };
        assert!(err_at(&unaligned, 16) < 10.0 / 16.0);

        let aligned = Cell {
            corner: vec![0.25, 0.0, 0.5],
            sides: vec![0.5, 0.25, 0.25],
        };
        let e16 = err_at(&aligned, 16);
        let e32 = err_at(&aligned, 32);
        assert!(e16 < 10.0 / 16.0, "error at n=16 is {e16}");
        assert!(e32 < 0.7 * e16, "no first-order decay: {e16} -> {e32}");
    }

    #[test]
    fn chi_modulus_bound_over_orderings() {
        // |ŵ(k_l)| ≤ ∏_j min(1/|π s_j k_j|, 1) for indicator cells
        let p = Partition::uniform_boxes(3, &[2, 2]).unwrap();
        let ordering = make_ordering(OrderingKind::Hyperbolic, 3, 500);
        for cell in &p.cells {
            for k in ordering.iter() {
                let lhs = char_fourier(cell, k).norm();
                let mut rhs = 1.0;
                for (&s, &kj) in cell.sides.iter().zip(k) {
                    if kj != 0 {
                        rhs *= (1.0 / (PI * s * kj.abs() as f64)).min(1.0);
                    }
                }
                assert!(lhs <= rhs + 1e-14, "cell {cell:?} k {k:?}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn haar_spans_dyadic_piecewise_space() {
        // projections agree, so the spanned spaces coincide
        let g = grid();
        let haar = build_basis::<f64>(&SubspaceSpec::haar(3, 1), &g).unwrap();
        let pw = build_basis::<f64>(
            &SubspaceSpec::piecewise(3, Partition::dyadic(3, 1)),
            &g,
        )
        .unwrap();
        let f = Field::from_fn(g, |x| {
            Complex::new((x[0] * 7.0).sin() + x[1], (x[2] * 3.0).cos())
        });
        let ph = crate::subspaces::project_subspace(&f, &haar).unwrap();
        let pp = crate::subspaces::project_subspace(&f, &pw).unwrap();
        assert!(ph.sub(&pp).unwrap().l2_norm() < 1e-12);
    }
}
