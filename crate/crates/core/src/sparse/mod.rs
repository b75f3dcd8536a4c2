//! Dyadic decompositions, sparse families and the sparse domination recursion.

mod cz;
mod domination;
mod endpoint;
mod whitney;

pub use cz::{cz_select, CzOutcome};
pub use domination::{sparse_dominate, C2Policy, DominationDiagnostics, NodeRecord};
pub use endpoint::{endpoint_decompose, EndpointDecomposition};
pub use whitney::{whitney, whitney_overlap, WhitneyInterval};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CellSet, GridInterval, SampledFunction};
use crate::maximal::luxemburg;
use crate::scalar::Real;

/// One cube of a sparse family: `Q`, its clipped dilation `Q^κ`, and the set `E_Q ⊂ Q` it owns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseEntry {
    pub depth: usize,
    pub q: GridInterval,
    pub q_kappa: GridInterval,
    pub e: CellSet,
}

/// Line-oriented summary of an entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseRecord {
    pub depth: usize,
    pub i_lo: usize,
    pub i_hi: usize,
    pub kappa_lo: usize,
    pub kappa_hi: usize,
    pub e_cells_count: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseFamily {
    pub entries: Vec<SparseEntry>,
    pub eta: f64,
    pub kappa: u32,
}

impl SparseFamily {
    pub fn new(entries: Vec<SparseEntry>, eta: f64, kappa: u32) -> Self {
        let mut out = Self { entries, eta, kappa };
        out.sort();
        out
    }

    /// Orders entries by `(depth, lo)`.
    pub fn sort(&mut self) {
        self.entries.sort_by_key(|e| (e.depth, e.q.lo(), e.q.hi()));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn records(&self) -> Vec<SparseRecord> {
        self.entries
            .iter()
            .map(|e| SparseRecord {
                depth: e.depth,
                i_lo: e.q.lo(),
                i_hi: e.q.hi(),
                kappa_lo: e.q_kappa.lo(),
                kappa_hi: e.q_kappa.hi(),
                e_cells_count: e.e.count(),
            })
            .collect()
    }

    /// One JSON record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.records() {
            out.push_str(&serde_json::to_string(&r).expect("plain record"));
            out.push('\n');
        }
        out
    }

    pub fn max_depth(&self) -> usize {
        self.entries.iter().map(|e| e.depth).max().unwrap_or(0)
    }
}

/// Why a family is not `η`-sparse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SparsityViolation {
    /// Entries `first` and `second` both own `cell`.
    Overlap { first: usize, second: usize, cell: usize },
    /// `E_Q` leaves `Q`.
    Escapes { index: usize, cell: usize },
    /// `|E_Q| < η|Q|`.
    TooSmall { index: usize, e_cells: usize, q_cells: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityCertificate {
    pub eta: f64,
    pub entries: usize,
    pub min_ratio: f64,
    pub violation: Option<SparsityViolation>,
}

impl SparsityCertificate {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exact check that the sets `E_Q` are pairwise disjoint, lie in `Q`, and have `|E_Q| ≥ η|Q|`.
pub fn verify_sparsity(family: &SparseFamily, eta: f64) -> SparsityCertificate {
    let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    let mut min_ratio = f64::INFINITY;
    let mut violation = None;
    for (i, entry) in family.entries.iter().enumerate() {
        let e_cells = entry.e.count();
        let ratio = e_cells as f64 / entry.q.len() as f64;
        min_ratio = min_ratio.min(ratio);
        if violation.is_some() {
            continue;
        }
        if let Some(cell) = entry.e.cells().find(|&k| !entry.q.contains_cell(k)) {
            violation = Some(SparsityViolation::Escapes { index: i, cell });
            continue;
        }
        if (e_cells as f64) < eta * entry.q.len() as f64 {
            violation = Some(SparsityViolation::TooSmall { index: i, e_cells, q_cells: entry.q.len() });
            continue;
        }
        for k in entry.e.cells() {
            if let Some(&first) = owner.get(&k) {
                violation = Some(SparsityViolation::Overlap { first, second: i, cell: k });
                break;
            }
            owner.insert(k, i);
        }
    }
    SparsityCertificate {
        eta,
        entries: family.entries.len(),
        min_ratio: if family.entries.is_empty() { 1.0 } else { min_ratio },
        violation,
    }
}

fn check_inputs<T: Real>(inputs: &[SampledFunction<T>], beta: &[T]) -> Result<()> {
    if inputs.is_empty() || inputs.len() != beta.len() {
        return Err(Error::LengthMismatch { expected: inputs.len().max(1), got: beta.len() });
    }
    let g = inputs[0].grid();
    if inputs.iter().any(|f| !f.grid().same_as(g)) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// `∏_j ‖f_j‖_{L(log L)^{β_j}, Q^κ}` for one entry.
pub fn entry_weight<T: Real>(entry: &SparseEntry, inputs: &[SampledFunction<T>], beta: &[T]) -> Result<T> {
    let mut prod = T::one();
    for (f, &b) in inputs.iter().zip(beta) {
        prod = prod * luxemburg(f, entry.q_kappa, b)?;
        if prod == T::zero() {
            break;
        }
    }
    Ok(prod)
}

/// `Σ_{Q ∈ S, x ∈ Q} ∏_j ‖f_j‖_{L(log L)^{β_j}, Q^κ}` at the cell of `x`.
pub fn sparse_apply<T: Real>(family: &SparseFamily, inputs: &[SampledFunction<T>], beta: &[T], x: T) -> Result<T> {
    check_inputs(inputs, beta)?;
    let k = inputs[0].grid().cell_of(x)?;
    let mut acc = T::zero();
    for entry in family.entries.iter().filter(|e| e.q.contains_cell(k)) {
        acc = acc + entry_weight(entry, inputs, beta)?;
    }
    Ok(acc)
}

/// [`sparse_apply`] at every cell.
pub fn sparse_apply_field<T: Real>(family: &SparseFamily, inputs: &[SampledFunction<T>], beta: &[T]) -> Result<Vec<T>> {
    check_inputs(inputs, beta)?;
    let mut out = vec![T::zero(); inputs[0].grid().n_cells()];
    for entry in &family.entries {
        let w = entry_weight(entry, inputs, beta)?;
        for slot in &mut out[entry.q.lo()..entry.q.hi()] {
            *slot = *slot + w;
        }
    }
    Ok(out)
}
