use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellSet, DyadicLattice, GridInterval};
use crate::scalar::Real;

/// A Whitney interval. Unresolved intervals are single cells of `Ω` too close
/// to the boundary for any grid-aligned interval to meet the distance ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhitneyInterval {
    pub interval: GridInterval,
    pub resolved: bool,
    /// Distance to `Ω^c` in cells.
    pub gap: usize,
}

impl WhitneyInterval {
    /// `dist(I, Ω^c)/diam(I)`.
    pub fn ratio(&self) -> f64 {
        self.gap as f64 / self.interval.len() as f64
    }
}

/// Whitney decomposition of `Ω ⊂ [0, n_cells)` into dyadic intervals with
/// `5R ≤ dist(I, Ω^c)/|I| ≤ 15R` (for `R ≥ 1/5`), returned left to right.
///
/// Selected intervals are the maximal dyadic `I ⊆ Ω` with `dist(I, Ω^c) ≥ 5R|I|`;
/// remaining cells of `Ω` are returned one by one with `resolved = false`,
/// so the output always tiles `Ω` exactly.
pub fn whitney<T: Real>(omega: &CellSet, n_cells: usize, r: T) -> Result<Vec<WhitneyInterval>> {
    if !(r > T::zero()) {
        return Err(Error::InvalidParameter(format!("Whitney dilation must be positive, got {r}")));
    }
    let root = GridInterval::new(0, n_cells)?;
    let lattice = DyadicLattice::new(root)?;
    if omega.is_empty() {
        return Ok(Vec::new());
    }
    if !omega.is_subset_of(root) {
        return Err(Error::IntervalOutOfRange { lo: 0, hi: omega.runs().last().map_or(0, |r| r.hi()), n: n_cells });
    }
    if omega.contains(0) || omega.contains(n_cells - 1) {
        return Err(Error::BoundaryContact("Whitney set"));
    }
    let ratio = T::lit(5.0) * r;
    let component = |iv: GridInterval| -> Option<GridInterval> {
        let runs = omega.runs();
        let idx = runs.partition_point(|c| c.hi() <= iv.lo());
        runs.get(idx).copied().filter(|c| c.contains(&iv))
    };
    let mut out = Vec::new();
    let mut stack = vec![lattice.root()];
    while let Some(iv) = stack.pop() {
        if omega.count_within(iv) == 0 {
            continue;
        }
        if let Some(c) = component(iv) {
            let gap = (iv.lo() - c.lo()).min(c.hi() - iv.hi());
            if T::count(gap) >= ratio * T::count(iv.len()) {
                out.push(WhitneyInterval { interval: iv, resolved: true, gap });
                continue;
            }
            if iv.len() == 1 {
                out.push(WhitneyInterval { interval: iv, resolved: false, gap });
                continue;
            }
        }
        if let Some([left, right]) = DyadicLattice::children(&iv) {
            stack.push(right);
            stack.push(left);
        }
    }
    Ok(out)
}

/// `max_x Σ_j χ_{R·I_j}(x)` over cell centers, resolved intervals only.
pub fn whitney_overlap<T: Real>(intervals: &[WhitneyInterval], n_cells: usize, r: T) -> usize {
    let mut count = vec![0usize; n_cells];
    let half = T::lit(0.5);
    for w in intervals.iter().filter(|w| w.resolved) {
        let iv = w.interval;
        let mid = T::count(iv.lo() + iv.hi()) * half;
        let radius = r * T::count(iv.len()) * half;
        for (k, slot) in count.iter_mut().enumerate() {
            let c = T::count(k) + half;
            if (c - mid).abs() < radius {
                *slot += 1;
            }
        }
    }
    count.into_iter().max().unwrap_or(0)
}
