//! Orderings ρ: ℕ → ℤ^d of the measurement frequencies.
//!
//! Two kinds are provided. The box ordering enumerates by max-norm shells;
//! the hyperbolic ordering is non-decreasing in the cross key
//! ∏_j max(|k_j|,1). Ties are broken by |k|² and then lexicographically, so
//! both orderings are fully deterministic.
//!
//! Measured growth over the first 10⁴ elements in d = 3 (asserted in tests):
//! ‖k_l‖₂ ≤ 2·l^{1/3} for the box kind and ‖k_l‖₂ ≤ 10·l^{1/3} for the
//! hyperbolic kind.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingKind {
    Box,
    Hyperbolic,
}

impl std::fmt::Display for OrderingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrderingKind::Box => write!(f, "box"),
            OrderingKind::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

/// The first `len` lattice points of an ordering, stored flat with stride d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreqOrdering {
    kind: OrderingKind,
    d: usize,
    points: Vec<i64>,
}

impl FreqOrdering {
    pub fn kind(&self) -> OrderingKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// 0-based access; element l of the ordering ρ(l+1) in 1-based terms.
    pub fn point(&self, l: usize) -> &[i64] {
        &self.points[l * self.d..(l + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.points.chunks_exact(self.d)
    }

    /// Largest ‖k‖_∞ among the first `upto` elements.
    pub fn max_inf_norm(&self, upto: usize) -> i64 {
        self.iter()
            .take(upto)
            .flat_map(|k| k.iter().map(|&c| c.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// Hyperbolic cross key ∏_j max(|k_j|, 1).
pub fn hyperbolic_key(k: &[i64]) -> u128 {
    k.iter().map(|&c| c.unsigned_abs().max(1) as u128).product()
}

fn box_key(k: &[i64]) -> u128 {
    k.iter().map(|&c| c.unsigned_abs() as u128).max().unwrap_or(0)
}

fn norm_sq(k: &[i64]) -> u128 {
    k.iter().map(|&c| (c as i128 * c as i128) as u128).sum()
}

/// All points with hyperbolic key ≤ budget, appended to `out`.
fn enumerate_cross(d: usize, budget: u128, prefix: &mut Vec<i64>, out: &mut Vec<i64>) {
    if prefix.len() == d {
        out.extend_from_slice(prefix);
        return;
    }
    let bound = budget as i64;
    for c in -bound..=bound {
        let factor = c.unsigned_abs().max(1) as u128;
        if factor > budget {
            continue;
        }
        prefix.push(c);
        enumerate_cross(d, budget / factor, prefix, out);
        prefix.pop();
    }
}

fn enumerate_box(d: usize, radius: i64, prefix: &mut Vec<i64>, out: &mut Vec<i64>) {
    if prefix.len() == d {
        out.extend_from_slice(prefix);
        return;
    }
    for c in -radius..=radius {
        prefix.push(c);
        enumerate_box(d, radius, prefix, out);
        prefix.pop();
    }
}

/// First `count` elements of the requested ordering.
pub fn make_ordering(kind: OrderingKind, d: usize, count: usize) -> FreqOrdering {
    let mut raw: Vec<i64> = Vec::new();
    match kind {
        OrderingKind::Box => {
            let mut radius = 0i64;
            while ((2 * radius + 1) as usize).pow(d as u32) < count {
                radius += 1;
            }
            enumerate_box(d, radius, &mut Vec::with_capacity(d), &mut raw);
        }
        OrderingKind::Hyperbolic => {
            let mut budget = 1u128;
            loop {
                raw.clear();
                enumerate_cross(d, budget, &mut Vec::with_capacity(d), &mut raw);
                if raw.len() / d >= count {
                    break;
                }
                budget *= 2;
            }
        }
    }

    let key = |k: &[i64]| -> u128 {
        match kind {
            OrderingKind::Box => box_key(k),
            OrderingKind::Hyperbolic => hyperbolic_key(k),
        }
    };
    let mut index: Vec<usize> = (0..raw.len() / d).collect();
    index.sort_unstable_by(|&a, &b| {
        let ka = &raw[a * d..(a + 1) * d];
        let kb = &raw[b * d..(b + 1) * d];
        (key(ka), norm_sq(ka), ka).cmp(&(key(kb), norm_sq(kb), kb))
    });

    let take = count.min(index.len());
    let mut points = Vec::with_capacity(take * d);
    for &i in index.iter().take(take) {
        points.extend_from_slice(&raw[i * d..(i + 1) * d]);
    }
    FreqOrdering { kind, d, points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn box_ordering_starts_at_origin() {
        let o = make_ordering(OrderingKind::Box, 3, 1);
        assert_eq!(o.point(0), &[0, 0, 0]);
    }

    #[test]
    fn box_first_shells_complete() {
        // the first (2B+1)^3 box-ordered points are exactly the cube ‖k‖∞ ≤ B
        for b in 1..=2i64 {
            let count = ((2 * b + 1) as usize).pow(3);
            let o = make_ordering(OrderingKind::Box, 3, count);
            let got: HashSet<Vec<i64>> = o.iter().map(|k| k.to_vec()).collect();
            assert_eq!(got.len(), count);
            for k in got {
                assert!(k.iter().all(|c| c.abs() <= b));
            }
        }
    }

    #[test]
    fn hyperbolic_first_27_is_unit_cube_sorted_by_norm_then_lex() {
        // exhaustive oracle over ‖k‖∞ ≤ 2: exactly the 27 points of {-1,0,1}³
        // have key 1, ordered by |k|² and then lexicographically
        let o = make_ordering(OrderingKind::Hyperbolic, 3, 27);
        let mut expected: Vec<Vec<i64>> = Vec::new();
        for a in -1i64..=1 {
            for b in -1i64..=1 {
                for c in -1i64..=1 {
                    expected.push(vec![a, b, c]);
                }
            }
        }
        expected.sort_by(|x, y| (norm_sq(x), x.clone()).cmp(&(norm_sq(y), y.clone())));
        let got: Vec<Vec<i64>> = o.iter().map(|k| k.to_vec()).collect();
        assert_eq!(got, expected);
        assert_eq!(got[0], vec![0, 0, 0]);
    }

    #[test]
    fn orderings_are_injective() {
        for kind in [OrderingKind::Box, OrderingKind::Hyperbolic] {
            let o = make_ordering(kind, 3, 10_000);
            let set: HashSet<Vec<i64>> = o.iter().map(|k| k.to_vec()).collect();
            assert_eq!(set.len(), 10_000);
        }
    }

    #[test]
    fn hyperbolic_key_is_non_decreasing() {
        let o = make_ordering(OrderingKind::Hyperbolic, 3, 10_000);
        let mut prev = 0u128;
        for k in o.iter() {
            let key = hyperbolic_key(k);
            assert!(key >= prev);
            prev = key;
        }
    }

    #[test]
    fn growth_bound_on_first_200() {
        for kind in [OrderingKind::Box, OrderingKind::Hyperbolic] {
            let o = make_ordering(kind, 3, 200);
            for (i, k) in o.iter().enumerate() {
                let l = (i + 1) as f64;
                let norm = (norm_sq(k) as f64).sqrt();
                assert!(norm <= 6.0 * l.cbrt(), "{kind:?} l={l} k={k:?}");
            }
        }
    }

    #[test]
    fn documented_growth_constants_over_10k() {
        let cases = [(OrderingKind::Box, 2.0), (OrderingKind::Hyperbolic, 10.0)];
        for (kind, c_rho) in cases {
            let o = make_ordering(kind, 3, 10_000);
            for (i, k) in o.iter().enumerate() {
                let l = (i + 1) as f64;
                let norm = (norm_sq(k) as f64).sqrt();
                assert!(norm <= c_rho * l.cbrt(), "{kind:?} l={l} k={k:?}");
            }
        }
    }

    #[test]
    fn deterministic_across_calls() {
        let a = make_ordering(OrderingKind::Hyperbolic, 3, 500);
        let b = make_ordering(OrderingKind::Hyperbolic, 3, 500);
        assert_eq!(a, b);
    }

    #[test]
    fn works_in_dimension_four() {
        let o = make_ordering(OrderingKind::Hyperbolic, 4, 100);
        assert_eq!(o.len(), 100);
        assert_eq!(o.point(0), &[0, 0, 0, 0]);
    }
}
