use serde::{Deserialize, Serialize};

use super::cz::{cz_select, CzOutcome};
use super::{SparseEntry, SparseFamily};
use crate::error::{Error, Result};
use crate::grid::{CellSet, GridInterval, SearchMode};
use crate::maximal::{luxemburg, GrandMaxContext, InputSet, MultiSublinear};
use crate::scalar::Real;

/// Threshold escalation for the exceptional set at each node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct C2Policy {
    /// Starting value of `C₂`.
    pub initial: f64,
    /// Doublings allowed before the node is reported as a fault.
    pub max_doublings: u32,
    /// Search set for the localized grand maximal function.
    pub search: SearchMode,
}

impl Default for C2Policy {
    fn default() -> Self {
        Self { initial: 2.0, max_doublings: 64, search: SearchMode::Dyadic }
    }
}

/// What happened at one node of the recursion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub depth: usize,
    pub q: GridInterval,
    /// `∏_j ‖f_j‖_{L(log L)^{β_j}, Q^κ}`.
    pub norm: f64,
    pub c2: f64,
    pub doublings: u32,
    pub e_cells: usize,
    pub children: usize,
    pub children_cells: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DominationDiagnostics {
    pub nodes: Vec<NodeRecord>,
}

impl DominationDiagnostics {
    pub fn max_c2(&self) -> f64 {
        self.nodes.iter().map(|n| n.c2).fold(0.0, f64::max)
    }

    /// Largest `Σ|P_j|/|Q|` over nodes.
    pub fn max_child_fraction(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.children_cells as f64 / n.q.len() as f64)
            .fold(0.0, f64::max)
    }
}

/// Builds a sparse family for `U` on the dyadic interval `q0` by recursive
/// Calderón–Zygmund stopping.
///
/// At a node `Q` with `N = ∏_j ‖f_j‖_{L(log L)^{β_j}, Q^κ}`, the exceptional set
/// `E = {∏|f_j| > C₂N} ∪ {M_{U,Q}^κ > C₂N}` is formed with `C₂` doubled until
/// `|E| ≤ |Q|/8`; the stopping intervals of `χ_E` at level `1/4` become the
/// children, and `E_Q = Q \ ∪P_j`. Single cells are leaves.
pub fn sparse_dominate<T: Real, U: MultiSublinear<T>>(
    u: &U,
    inputs: &InputSet<T>,
    q0: GridInterval,
    kappa: u32,
    beta: &[T],
    policy: C2Policy,
) -> Result<(SparseFamily, DominationDiagnostics)> {
    let g = *inputs.grid();
    let n = g.n_cells();
    if beta.len() != inputs.len() || u.arity() != inputs.len() {
        return Err(Error::LengthMismatch { expected: inputs.len(), got: beta.len() });
    }
    let lattice = g.lattice();
    let root_depth = lattice.depth_of(&q0).ok_or(Error::NotDyadic { lo: q0.lo(), hi: q0.hi() })?;
    if !(policy.initial > 0.0) {
        return Err(Error::InvalidParameter(format!("initial C2 must be positive, got {}", policy.initial)));
    }
    let quarter = T::lit(0.25);
    let mut entries = Vec::new();
    let mut diag = DominationDiagnostics::default();
    let mut stack = vec![(q0, 0usize)];
    while let Some((q, depth)) = stack.pop() {
        if root_depth + depth > lattice.max_depth() {
            return Err(Error::RecursionDepth { depth: root_depth + depth, max: lattice.max_depth() });
        }
        let q_kappa = q.dilate_pow3(kappa, n);
        let mut norm = T::one();
        for (f, &b) in inputs.functions().iter().zip(beta) {
            norm = norm * luxemburg(f, q_kappa, b)?;
        }
        let mut record = NodeRecord {
            depth,
            q,
            norm: norm.as_f64(),
            c2: policy.initial,
            doublings: 0,
            e_cells: 0,
            children: 0,
            children_cells: 0,
        };
        if q.len() == 1 || norm == T::zero() {
            entries.push(SparseEntry { depth, q, q_kappa, e: CellSet::from_intervals([q]) });
            diag.nodes.push(record);
            continue;
        }
        let ctx = GrandMaxContext::new(u, inputs, kappa, q_kappa, q)?;
        let local = ctx.field_within(q, policy.search)?;
        let size: Vec<T> = q.cells().map(|k| inputs.product_abs(k).max(local[k - q.lo()])).collect();
        let mut c2 = T::lit(policy.initial);
        let mut doublings = 0u32;
        let mask = loop {
            let level = c2 * norm;
            let mask: Vec<bool> = size.iter().map(|&v| v > level).collect();
            let count = mask.iter().filter(|&&b| b).count();
            if 8 * count <= q.len() {
                break mask;
            }
            if doublings >= policy.max_doublings {
                return Err(Error::Escalation {
                    lo: q.lo(),
                    hi: q.hi(),
                    e_cells: count,
                    doublings,
                    c2: c2.as_f64(),
                });
            }
            c2 = c2 + c2;
            doublings += 1;
        };
        let e = CellSet::from_mask_offset(&mask, q.lo());
        let cubes = match cz_select(&e, q, quarter)? {
            CzOutcome::Cubes(c) => c,
            CzOutcome::Degenerate => unreachable!("|E| ≤ |Q|/8 is below the selection level"),
        };
        let children = CellSet::from_intervals(cubes.iter().copied());
        record.c2 = c2.as_f64();
        record.doublings = doublings;
        record.e_cells = e.count();
        record.children = cubes.len();
        record.children_cells = children.count();
        entries.push(SparseEntry { depth, q, q_kappa, e: children.complement_within(q) });
        diag.nodes.push(record);
        for p in cubes.into_iter().rev() {
            let d = lattice.depth_of(&p).ok_or(Error::NotDyadic { lo: p.lo(), hi: p.hi() })?;
            stack.push((p, d - root_depth));
        }
    }
    let family = SparseFamily::new(entries, 0.5, kappa);
    diag.nodes.sort_by_key(|r| (r.depth, r.q.lo()));
    Ok((family, diag))
}
