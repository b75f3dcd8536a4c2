//! Uniform grids, grid-aligned intervals, the dyadic lattice and exact
//! quadrature for piecewise-constant samples.

mod function;
mod interval;
mod search;

pub use function::{PiecewiseLinear, PrefixSums, SampledFunction};
pub use interval::{CellSet, GridInterval};
pub use search::{candidate_intervals, sup_all, sup_field, sup_field_within, SearchMode};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform partition of `[x_min, x_max]` into a power-of-two number of cells.
///
/// Cell `k` covers `[x_min + k h, x_min + (k + 1) h)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    x_min: T,
    x_max: T,
    n_cells: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(x_min: T, x_max: T, n_cells: usize) -> Result<Self> {
        if !n_cells.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n_cells));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidDomain { lo: x_min.as_f64(), hi: x_max.as_f64() });
        }
        Ok(Self { x_min, x_max, n_cells })
    }

    #[inline]
    pub fn x_min(&self) -> T {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Cell width.
    #[inline]
    pub fn h(&self) -> T {
        (self.x_max - self.x_min) / T::count(self.n_cells)
    }

    /// Lattice depth, `log2(n_cells)`.
    pub fn max_depth(&self) -> usize {
        self.n_cells.trailing_zeros() as usize
    }

    /// Left end of cell `k` (`k == n_cells` gives `x_max`).
    #[inline]
    pub fn node(&self, k: usize) -> T {
        if k == self.n_cells {
            return self.x_max;
        }
        self.x_min + T::count(k) * self.h()
    }

    #[inline]
    pub fn center(&self, k: usize) -> T {
        self.x_min + (T::count(k) + T::lit(0.5)) * self.h()
    }

    pub fn contains_point(&self, x: T) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Index of the half-open cell containing `x`; `x_max` maps to the last cell.
    pub fn cell_of(&self, x: T) -> Result<usize> {
        if !self.contains_point(x) {
            return Err(Error::PointOutOfDomain(x.as_f64()));
        }
        let k = ((x - self.x_min) / self.h()).floor().to_usize().unwrap_or(0);
        Ok(k.min(self.n_cells - 1))
    }

    /// Center of the cell containing `x`.
    pub fn snap(&self, x: T) -> Result<T> {
        Ok(self.center(self.cell_of(x)?))
    }

    /// Nearest node index to `x`.
    pub fn nearest_node(&self, x: T) -> Result<usize> {
        if !self.contains_point(x) {
            return Err(Error::PointOutOfDomain(x.as_f64()));
        }
        let k = ((x - self.x_min) / self.h()).round().to_usize().unwrap_or(0);
        Ok(k.min(self.n_cells))
    }

    /// Grid-aligned interval with ends snapped to the nearest nodes.
    pub fn interval_between(&self, a: T, b: T) -> Result<GridInterval> {
        GridInterval::new(self.nearest_node(a)?, self.nearest_node(b)?)
    }

    /// Whole domain.
    pub fn full(&self) -> GridInterval {
        GridInterval::new(0, self.n_cells).expect("non-empty grid")
    }

    /// Physical length `|I|`.
    pub fn length(&self, interval: GridInterval) -> T {
        T::count(interval.len()) * self.h()
    }

    pub fn lattice(&self) -> DyadicLattice {
        DyadicLattice::new(self.full()).expect("power-of-two grid")
    }

    /// Grids with equal geometry.
    pub fn same_as(&self, other: &Grid<T>) -> bool {
        self.n_cells == other.n_cells && self.x_min == other.x_min && self.x_max == other.x_max
    }

    pub fn sample(&self, f: impl Fn(T) -> T) -> SampledFunction<T> {
        SampledFunction::from_fn(*self, f)
    }
}

/// Dyadic tree rooted at a power-of-two run of cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicLattice {
    root: GridInterval,
    max_depth: usize,
}

impl DyadicLattice {
    pub fn new(root: GridInterval) -> Result<Self> {
        if !root.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(root.len()));
        }
        Ok(Self { root, max_depth: root.len().trailing_zeros() as usize })
    }

    pub fn root(&self) -> GridInterval {
        self.root
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    /// `index`-th interval at `depth`, counted from the left.
    pub fn interval(&self, depth: usize, index: usize) -> GridInterval {
        let len = self.root.len() >> depth;
        let lo = self.root.lo() + index * len;
        GridInterval::new(lo, lo + len).expect("dyadic interval is non-empty")
    }

    /// Depth of `iv` if it belongs to the lattice.
    pub fn depth_of(&self, iv: &GridInterval) -> Option<usize> {
        let len = iv.len();
        if !len.is_power_of_two() || !self.root.contains(iv) {
            return None;
        }
        if !(iv.lo() - self.root.lo()).is_multiple_of(len) {
            return None;
        }
        Some((self.root.len() / len).trailing_zeros() as usize)
    }

    pub fn contains(&self, iv: &GridInterval) -> bool {
        self.depth_of(iv).is_some()
    }

    pub fn children(iv: &GridInterval) -> Option<[GridInterval; 2]> {
        if iv.len() < 2 {
            return None;
        }
        let mid = iv.lo() + iv.len() / 2;
        Some([
            GridInterval::new(iv.lo(), mid).expect("half"),
            GridInterval::new(mid, iv.hi()).expect("half"),
        ])
    }

    pub fn parent(&self, iv: &GridInterval) -> Option<GridInterval> {
        let depth = self.depth_of(iv)?;
        if depth == 0 {
            return None;
        }
        let len = iv.len() * 2;
        let lo = self.root.lo() + (iv.lo() - self.root.lo()) / len * len;
        GridInterval::new(lo, lo + len).ok()
    }

    /// Dyadic intervals containing `cell`, from the root down to the cell itself.
    pub fn ancestors(&self, cell: usize) -> Vec<GridInterval> {
        (0..=self.max_depth)
            .map(|d| {
                let len = self.root.len() >> d;
                self.interval(d, (cell - self.root.lo()) / len)
            })
            .collect()
    }

    /// Every interval of the tree ordered by `(depth, lo)`; `2 |root| - 1` items.
    pub fn iter(&self) -> impl Iterator<Item = GridInterval> + '_ {
        (0..=self.max_depth).flat_map(move |d| (0..(1usize << d)).map(move |i| self.interval(d, i)))
    }

    pub fn node_count(&self) -> usize {
        2 * self.root.len() - 1
    }
}
