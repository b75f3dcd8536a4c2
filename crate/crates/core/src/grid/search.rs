use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{DyadicLattice, GridInterval};

/// Which grid-aligned intervals a supremum ranges over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// The dyadic tree only.
    Dyadic,
    /// Dyadic intervals and their 3-fold dilations.
    #[default]
    Dilated,
    /// Every grid-aligned interval, `O(n²)` of them.
    Exhaustive,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dyadic" => Ok(Self::Dyadic),
            "dilated" => Ok(Self::Dilated),
            "exhaustive" | "full" => Ok(Self::Exhaustive),
            other => Err(Error::InvalidParameter(format!("unknown search mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for SearchMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dyadic => "dyadic",
            Self::Dilated => "dilated",
            Self::Exhaustive => "exhaustive",
        })
    }
}

/// Deterministic interval search set over `[0, n_cells)`.
///
/// With `cell = Some(k)` only intervals containing `k` are returned. Dyadic
/// intervals come first (root to leaf), then the mode's extra intervals in
/// `(len desc, lo asc)` order until `budget` intervals have been emitted.
pub fn candidate_intervals(
    n_cells: usize,
    cell: Option<usize>,
    mode: SearchMode,
    budget: usize,
) -> Result<Vec<GridInterval>> {
    if budget < n_cells {
        return Err(Error::InvalidParameter(format!(
            "search budget {budget} is below the cell count {n_cells}"
        )));
    }
    let root = GridInterval::new(0, n_cells)?;
    let lattice = DyadicLattice::new(root)?;
    if let Some(k) = cell {
        if k >= n_cells {
            return Err(Error::IntervalOutOfRange { lo: k, hi: k + 1, n: n_cells });
        }
    }
    let keep = |iv: &GridInterval| cell.is_none_or(|k| iv.contains_cell(k));
    let mut out: Vec<GridInterval> = match cell {
        Some(k) => lattice.ancestors(k),
        None => lattice.iter().collect(),
    };
    match mode {
        SearchMode::Dyadic => {}
        SearchMode::Dilated => {
            let mut extra: Vec<GridInterval> = lattice
                .iter()
                .map(|iv| iv.dilate(3, n_cells))
                .filter(|iv| keep(iv) && !lattice.contains(iv))
                .collect();
            extra.sort_by(|a, b| b.len().cmp(&a.len()).then(a.lo().cmp(&b.lo())));
            extra.dedup();
            for iv in extra {
                if out.len() >= budget {
                    break;
                }
                out.push(iv);
            }
        }
        SearchMode::Exhaustive => {
            'outer: for len in (1..=n_cells).rev() {
                for lo in 0..=(n_cells - len) {
                    let iv = GridInterval::new(lo, lo + len)?;
                    if !keep(&iv) || lattice.contains(&iv) {
                        continue;
                    }
                    if out.len() >= budget {
                        break 'outer;
                    }
                    out.push(iv);
                }
            }
        }
    }
    Ok(out)
}

/// Per-cell supremum `F(k) = max { φ(I) : I ∋ k }` over the search set rooted at `root`.
///
/// `Dyadic` needs a power-of-two `root`; a non-dyadic root falls back to the
/// exhaustive scan. The returned vector is indexed relative to `root.lo()`.
pub fn sup_field_within<T: Real>(
    root: GridInterval,
    mode: SearchMode,
    mut phi: impl FnMut(GridInterval) -> T,
) -> Vec<T> {
    let n = root.len();
    let off = root.lo();
    let lattice = match (mode, DyadicLattice::new(root)) {
        (SearchMode::Exhaustive, _) | (_, Err(_)) => return exhaustive_field(root, phi),
        (_, Ok(lat)) => lat,
    };
    let neg = T::neg_infinity();
    let mut field = vec![neg; n];
    if mode == SearchMode::Dyadic {
        // Top-down: each node inherits the running max of its ancestors.
        let mut inherited = vec![neg; 2 * n];
        inherited[1] = phi(root).max(neg);
        for d in 0..lattice.max_depth() {
            for i in 0..(1usize << d) {
                let parent = inherited[(1 << d) + i];
                for c in 0..2 {
                    let child = lattice.interval(d + 1, 2 * i + c);
                    inherited[(1 << (d + 1)) + 2 * i + c] = parent.max(phi(child));
                }
            }
        }
        field.copy_from_slice(&inherited[n..2 * n]);
        return field;
    }
    for iv in lattice.iter() {
        let v = phi(iv);
        update_range(&mut field, iv, off, v);
        let wide = dilate_within(iv, root);
        if wide != iv {
            let v = phi(wide);
            update_range(&mut field, wide, off, v);
        }
    }
    field
}

/// [`sup_field_within`] over the whole grid `[0, n_cells)`.
pub fn sup_field<T: Real>(
    n_cells: usize,
    mode: SearchMode,
    phi: impl FnMut(GridInterval) -> T,
) -> Result<Vec<T>> {
    let root = GridInterval::new(0, n_cells)?;
    if !n_cells.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n_cells));
    }
    Ok(sup_field_within(root, mode, phi))
}

/// `max { φ(I) }` over the whole search set rooted at `root`, with the maximiser.
pub fn sup_all<T: Real>(
    root: GridInterval,
    mode: SearchMode,
    mut phi: impl FnMut(GridInterval) -> T,
) -> (T, GridInterval) {
    let mut best = (T::neg_infinity(), root);
    let mut visit = |iv: GridInterval, best: &mut (T, GridInterval)| {
        let v = phi(iv);
        if v > best.0 {
            *best = (v, iv);
        }
    };
    match (mode, DyadicLattice::new(root)) {
        (SearchMode::Exhaustive, _) | (_, Err(_)) => {
            for len in 1..=root.len() {
                for lo in root.lo()..=(root.hi() - len) {
                    visit(GridInterval::new(lo, lo + len).expect("non-empty"), &mut best);
                }
            }
        }
        (mode, Ok(lattice)) => {
            for iv in lattice.iter() {
                visit(iv, &mut best);
                if mode == SearchMode::Dilated {
                    let wide = dilate_within(iv, root);
                    if wide != iv {
                        visit(wide, &mut best);
                    }
                }
            }
        }
    }
    best
}

fn dilate_within(iv: GridInterval, root: GridInterval) -> GridInterval {
    let len = iv.len();
    let lo = iv.lo().saturating_sub(len).max(root.lo());
    let hi = (iv.hi() + len).min(root.hi());
    GridInterval::new(lo, hi).expect("dilation contains the interval")
}

fn update_range<T: Real>(field: &mut [T], iv: GridInterval, off: usize, v: T) {
    for slot in &mut field[iv.lo() - off..iv.hi() - off] {
        if v > *slot {
            *slot = v;
        }
    }
}

/// `O(n²)` scan. `W_len(lo)` is the max of φ over intervals containing
/// `[lo, lo+len)`, so `W_len(lo) = max(φ([lo, lo+len)), W_{len+1}(lo-1), W_{len+1}(lo))`.
fn exhaustive_field<T: Real>(root: GridInterval, mut phi: impl FnMut(GridInterval) -> T) -> Vec<T> {
    let n = root.len();
    let off = root.lo();
    let mut prev: Vec<T> = Vec::new();
    let mut cur: Vec<T> = Vec::with_capacity(n);
    for len in (1..=n).rev() {
        cur.clear();
        for lo in 0..=(n - len) {
            let mut v = phi(GridInterval::new(off + lo, off + lo + len).expect("non-empty"));
            if len < n {
                if lo > 0 {
                    v = v.max(prev[lo - 1]);
                }
                if lo < prev.len() {
                    v = v.max(prev[lo]);
                }
            }
            cur.push(v);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}
