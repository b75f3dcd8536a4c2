use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-open run of cells `[lo, hi)` on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridInterval {
    lo: usize,
    hi: usize,
}

impl GridInterval {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    /// A single cell.
    pub fn cell(k: usize) -> Self {
        Self { lo: k, hi: k + 1 }
    }

    #[inline]
    pub fn lo(&self) -> usize {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> usize {
        self.hi
    }

    /// Number of cells.
    #[inline]
    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains_cell(&self, k: usize) -> bool {
        self.lo <= k && k < self.hi
    }

    #[inline]
    pub fn contains(&self, other: &GridInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &GridInterval) -> Option<GridInterval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(GridInterval { lo, hi })
    }

    pub fn check_within(&self, n_cells: usize) -> Result<()> {
        if self.hi > n_cells {
            return Err(Error::IntervalOutOfRange { lo: self.lo, hi: self.hi, n: n_cells });
        }
        Ok(())
    }

    /// Concentric dilation by an odd integer factor, clipped to `[0, n_cells)`.
    pub fn dilate(&self, factor: u64, n_cells: usize) -> GridInterval {
        debug_assert!(factor % 2 == 1, "odd dilation keeps the interval grid-aligned");
        let pad = (factor.saturating_sub(1) / 2).saturating_mul(self.len() as u64);
        let pad = usize::try_from(pad).unwrap_or(usize::MAX);
        GridInterval {
            lo: self.lo.saturating_sub(pad),
            hi: self.hi.saturating_add(pad).min(n_cells),
        }
    }

    /// `3^kappa` dilation clipped to the grid.
    pub fn dilate_pow3(&self, kappa: u32, n_cells: usize) -> GridInterval {
        let factor = 3u64.checked_pow(kappa).unwrap_or(u64::MAX | 1);
        self.dilate(factor, n_cells)
    }

    pub fn cells(&self) -> std::ops::Range<usize> {
        self.lo..self.hi
    }
}

impl std::fmt::Display for GridInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

/// Finite set of cells stored as sorted, disjoint, non-adjacent runs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSet {
    runs: Vec<GridInterval>,
}

impl CellSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        Self::from_mask_offset(mask, 0)
    }

    /// Mask whose first entry is cell `offset`.
    pub fn from_mask_offset(mask: &[bool], offset: usize) -> Self {
        let mut runs = Vec::new();
        let mut start = None;
        for (i, &inside) in mask.iter().enumerate() {
            match (inside, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    runs.push(GridInterval { lo: s + offset, hi: i + offset });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            runs.push(GridInterval { lo: s + offset, hi: mask.len() + offset });
        }
        Self { runs }
    }

    /// Union of arbitrary intervals.
    pub fn from_intervals(intervals: impl IntoIterator<Item = GridInterval>) -> Self {
        let mut v: Vec<GridInterval> = intervals.into_iter().collect();
        v.sort();
        let mut runs: Vec<GridInterval> = Vec::with_capacity(v.len());
        for iv in v {
            match runs.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => runs.push(iv),
            }
        }
        Self { runs }
    }

    pub fn runs(&self) -> &[GridInterval] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// Number of cells.
    pub fn count(&self) -> usize {
        self.runs.iter().map(GridInterval::len).sum()
    }

    pub fn contains(&self, k: usize) -> bool {
        let idx = self.runs.partition_point(|r| r.hi <= k);
        self.runs.get(idx).is_some_and(|r| r.lo <= k)
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.runs.iter().flat_map(GridInterval::cells)
    }

    pub fn to_mask(&self, n_cells: usize) -> Vec<bool> {
        let mut mask = vec![false; n_cells];
        for k in self.cells() {
            mask[k] = true;
        }
        mask
    }

    /// Cells of `interval` that are not in `self`.
    pub fn complement_within(&self, interval: GridInterval) -> CellSet {
        let mut runs = Vec::new();
        let mut cursor = interval.lo;
        for r in &self.runs {
            if r.hi <= interval.lo || r.lo >= interval.hi {
                continue;
            }
            if r.lo > cursor {
                runs.push(GridInterval { lo: cursor, hi: r.lo });
            }
            cursor = cursor.max(r.hi);
        }
        if cursor < interval.hi {
            runs.push(GridInterval { lo: cursor, hi: interval.hi });
        }
        CellSet { runs }
    }

    /// Number of cells shared with `interval`.
    pub fn count_within(&self, interval: GridInterval) -> usize {
        self.runs.iter().filter_map(|r| r.intersect(&interval)).map(|r| r.len()).sum()
    }

    pub fn is_subset_of(&self, interval: GridInterval) -> bool {
        self.runs.iter().all(|r| interval.contains(r))
    }
}
