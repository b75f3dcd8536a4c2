//! Sparse domination of `C_{m+1,A}` on the full grid.

use std::time::Instant;

use anyhow::Result;
use calclab_core::kernels::CommutatorOperator;
use calclab_core::sparse::{sparse_apply_field, sparse_dominate, verify_sparsity, C2Policy, SparsityCertificate};
use calclab_core::{Grid, SearchMode};

use super::commutator_a_field;
use crate::inputs::generate_inputs;
use crate::report::Check;
use crate::scenario::Scenario;

const SPARSE_ANCHOR: &str = "each Q in S owns E_Q ⊂ Q, pairwise disjoint, |E_Q| ≥ η|Q| with η = 1/2";
const DOMINATION_ANCHOR: &str =
    "|C_{m+1,A}(a⃗; f)(x)| ≤ C Σ_{Q∈S} ∏_j ‖f_j‖_{L(log L)^{β_j}, Q^κ} χ_Q(x), β⃗ = (0,…,0,1)";

/// One sparse domination run.
#[derive(Clone, Debug)]
pub struct DominationRun {
    pub n: usize,
    pub seed: u64,
    /// `max_x |U(x)|/S(x)` over cells where `U ≠ 0`.
    pub c_dom: f64,
    /// Cells with `U ≠ 0` but no sparse mass.
    pub uncovered: usize,
    pub certificate: SparsityCertificate,
    pub family_len: usize,
    pub max_c2: f64,
    pub runtime_s: f64,
}

pub fn domination_run(seed: u64, m: usize, grid: Grid, kappa: u32, mode: SearchMode) -> Result<DominationRun> {
    let start = Instant::now();
    let inp = generate_inputs(seed, m, grid, mode);
    let set = inp.input_set()?;
    let op = CommutatorOperator::with_remainder(m, inp.a.clone());
    let mut beta = vec![0.0; m];
    beta.push(1.0);
    let (family, diag) = sparse_dominate(&op, &set, grid.full(), kappa, &beta, C2Policy::default())?;
    let certificate = verify_sparsity(&family, 0.5);
    let u = commutator_a_field(&inp)?;
    let s = sparse_apply_field(&family, set.functions(), &beta)?;
    let mut c_dom = 0.0f64;
    let mut uncovered = 0;
    for (&uv, &sv) in u.iter().zip(&s) {
        if uv == 0.0 {
            continue;
        }
        if sv > 0.0 {
            c_dom = c_dom.max(uv.abs() / sv);
        } else {
            uncovered += 1;
        }
    }
    Ok(DominationRun {
        n: grid.n_cells(),
        seed,
        c_dom: if uncovered > 0 { f64::INFINITY } else { c_dom },
        uncovered,
        certificate,
        family_len: family.len(),
        max_c2: diag.max_c2(),
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

/// Runs every seed on the fine and coarse grids.
pub fn run(s: &Scenario) -> Result<Vec<Check>> {
    let start = Instant::now();
    let mut fine = Vec::new();
    let mut coarse = Vec::new();
    for seed in s.seed_list() {
        fine.push(domination_run(seed, s.m, s.grid()?, s.kappa, s.search)?);
        coarse.push(domination_run(seed, s.m, s.coarse_grid()?, s.kappa, s.search)?);
    }
    Ok(checks(&fine, &coarse, start))
}

/// Sparsity, pointwise domination, refinement and runtime checks for paired runs.
pub fn checks(fine: &[DominationRun], coarse: &[DominationRun], start: Instant) -> Vec<Check> {
    let all = || fine.iter().chain(coarse);
    let min_ratio = all().map(|r| r.certificate.min_ratio).fold(f64::INFINITY, f64::min);
    let sparse_ok = all().all(|r| r.certificate.passed());
    let c_fine = fine.iter().map(|r| r.c_dom).fold(0.0, f64::max);
    let c_coarse = coarse.iter().map(|r| r.c_dom).fold(0.0, f64::max);
    let refinement = fine.iter().zip(coarse).map(|(f, c)| f.c_dom / c.c_dom).fold(0.0, f64::max);
    let runtime = all().map(|r| r.runtime_s).fold(0.0, f64::max);
    let uncovered: usize = all().map(|r| r.uncovered).sum();
    vec![
        Check::at_least("domination/sparsity", SPARSE_ANCHOR, min_ratio, 0.5)
            .require(sparse_ok)
            .detail("families", all().map(|r| (r.n, r.seed, r.family_len)).collect::<Vec<_>>())
            .detail("max_c2", all().map(|r| r.max_c2).fold(0.0, f64::max))
            .timed(start),
        Check::at_most("domination/pointwise", DOMINATION_ANCHOR, c_fine, f64::INFINITY)
            .require(uncovered == 0 && c_fine.is_finite() && c_coarse.is_finite())
            .detail("c_dom_fine", fine.iter().map(|r| r.c_dom).collect::<Vec<_>>())
            .detail("c_dom_coarse", coarse.iter().map(|r| r.c_dom).collect::<Vec<_>>())
            .detail("uncovered_cells", uncovered)
            .timed(start),
        Check::at_most("domination/refinement", "C_dom(fine)/C_dom(coarse) ≤ 2 for every seed", refinement, 2.0)
            .timed(start),
        Check::at_most("domination/runtime", "wall time per (m, seed, grid) in seconds", runtime, 600.0).timed(start),
    ]
}
