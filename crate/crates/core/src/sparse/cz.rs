use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellSet, DyadicLattice, GridInterval};
use crate::scalar::Real;

/// Result of a Calderón–Zygmund selection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CzOutcome {
    /// Maximal dyadic `P ⊊ Q₀` with `|P ∩ E| > level·|P|`, ordered left to right.
    Cubes(Vec<GridInterval>),
    /// `|E| > level·|Q₀|`: `Q₀` itself is the stopping cube.
    Degenerate,
}

impl CzOutcome {
    pub fn cubes(&self) -> Option<&[GridInterval]> {
        match self {
            Self::Cubes(c) => Some(c),
            Self::Degenerate => None,
        }
    }
}

/// Stopping-time selection of `χ_E` on the dyadic interval `q0` at `level ∈ (0, 1)`.
pub fn cz_select<T: Real>(e: &CellSet, q0: GridInterval, level: T) -> Result<CzOutcome> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::InvalidParameter(format!("selection level must be in (0, 1), got {level}")));
    }
    if !q0.len().is_power_of_two() {
        return Err(Error::NotDyadic { lo: q0.lo(), hi: q0.hi() });
    }
    if !e.is_subset_of(q0) {
        return Err(Error::InvalidParameter(format!("selection set is not contained in {q0}")));
    }
    let heavy = |iv: GridInterval| T::count(e.count_within(iv)) > level * T::count(iv.len());
    if heavy(q0) {
        return Ok(CzOutcome::Degenerate);
    }
    let mut out = Vec::new();
    let mut stack = vec![q0];
    while let Some(node) = stack.pop() {
        let Some([left, right]) = DyadicLattice::children(&node) else { continue };
        // Right child first so that popping yields left-to-right order.
        for child in [right, left] {
            if heavy(child) {
                out.push(child);
            } else if child.len() > 1 && e.count_within(child) > 0 {
                stack.push(child);
            }
        }
    }
    out.sort();
    Ok(CzOutcome::Cubes(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_set_selects_left_half() {
        let e = CellSet::from_intervals([GridInterval::new(0, 4).unwrap()]);
        let q0 = GridInterval::new(0, 16).unwrap();
        assert_eq!(cz_select(&e, q0, 0.25).unwrap(), CzOutcome::Cubes(vec![GridInterval::new(0, 8).unwrap()]));
        assert_eq!(cz_select(&CellSet::empty(), q0, 0.25).unwrap(), CzOutcome::Cubes(vec![]));
        let big = CellSet::from_intervals([GridInterval::new(0, 5).unwrap()]);
        assert_eq!(cz_select(&big, q0, 0.25).unwrap(), CzOutcome::Degenerate);
        assert!(cz_select(&e, GridInterval::new(0, 12).unwrap(), 0.25).is_err());
    }
}
