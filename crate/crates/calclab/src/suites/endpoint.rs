//! Weak endpoint estimate and the local `τ`-average estimate for `C_{m+1,A}`.

use std::time::Instant;

use anyhow::{ensure, Result};
use calclab_core::kernels::commutator_a;
use calclab_core::maximal::luxemburg;
use calclab_core::{Grid, GridInterval, SearchMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{commutator_a_field, level_measure, log_spaced, max_of, spread};
use crate::inputs::{generate_inputs, SampledInputs};
use crate::report::Check;
use crate::scenario::Scenario;

const WEAK_ANCHOR: &str = "|{|C_{m+1,A}(a⃗; f)| > λ}| ≤ C (Σ_j ∫|a_j|/μ + ∫ (|f|/μ) log(e + |f|/μ)), μ = λ^{1/(m+1)}";
const LOCAL_ANCHOR: &str =
    "(|I|⁻¹ ∫_I |C_{m+1,A}(a⃗; fχ_I)|^τ)^{1/τ} ≤ C ‖f‖_{L log L, 4I} ∏_j ⟨|a_j|⟩_{4I}, τ = 1/(2(m+2))";

/// Random (interval, input) draws for the local estimate.
pub const LOCAL_DRAWS: usize = 50;

/// Number of levels in the weak-type scan.
pub const LEVELS: usize = 12;

/// Levels spanning `max|U|·[10^{-2.5}, 10^{-0.1}]`.
pub fn levels_for(field: &[f64]) -> Vec<f64> {
    let top = max_of(field.iter().map(|v| v.abs()));
    log_spaced(top * 10f64.powf(-2.5), top * 10f64.powf(-0.1), LEVELS)
}

/// `|{|U| > λ}|` divided by the rescaled right-hand side, per level.
pub fn weak_ratios(inputs: &SampledInputs, field: &[f64], levels: &[f64]) -> Vec<f64> {
    let m = inputs.a_funcs.len();
    let h = inputs.f.grid().h();
    levels
        .iter()
        .map(|&lambda| {
            let mu = lambda.powf(1.0 / (m + 1) as f64);
            let a_term: f64 = inputs.a_funcs.iter().map(|a| a.abs().integral() / mu).sum();
            let f_term = h * inputs
                .f
                .values()
                .iter()
                .map(|v| {
                    let t = v.abs() / mu;
                    t * (std::f64::consts::E + t).ln()
                })
                .sum::<f64>();
            level_measure(field, h, lambda) / (a_term + f_term)
        })
        .collect()
}

/// Per-seed weak-type constants on two grids with shared levels.
#[derive(Clone, Debug)]
pub struct WeakConstants {
    pub fine: Vec<f64>,
    pub coarse: Vec<f64>,
}

pub fn weak_constants(seeds: &[u64], m: usize, fine: Grid, coarse: Grid, mode: SearchMode) -> Result<WeakConstants> {
    let mut out = WeakConstants { fine: Vec::new(), coarse: Vec::new() };
    for &seed in seeds {
        let ci = generate_inputs(seed, m, coarse, mode);
        let cf = commutator_a_field(&ci)?;
        let levels = levels_for(&cf);
        out.coarse.push(max_of(weak_ratios(&ci, &cf, &levels)));
        let fi = generate_inputs(seed, m, fine, mode);
        let ff = commutator_a_field(&fi)?;
        out.fine.push(max_of(weak_ratios(&fi, &ff, &levels)));
    }
    Ok(out)
}

/// `4I`, the concentric interval of four times the length.
pub fn quadruple(iv: GridInterval, n: usize) -> Option<GridInterval> {
    let pad = 3 * iv.len() / 2;
    if !iv.len().is_multiple_of(2) || iv.lo() < pad || iv.hi() + pad > n {
        return None;
    }
    GridInterval::new(iv.lo() - pad, iv.hi() + pad).ok()
}

/// A random even-length interval `I` on a grid of `n` cells with `4I` inside the grid.
pub fn random_local_interval(rng: &mut impl Rng, n: usize) -> GridInterval {
    let half = rng.gen_range(1..=n / 8);
    let lo = rng.gen_range(3 * half..=n - 5 * half);
    GridInterval::new(lo, lo + 2 * half).expect("nonempty interval")
}

/// The local estimate ratio for one interval.
pub fn local_ratio(inputs: &SampledInputs, iv: GridInterval) -> Result<f64> {
    let g = *inputs.f.grid();
    let m = inputs.a_funcs.len();
    let four = quadruple(iv, g.n_cells()).ok_or_else(|| anyhow::anyhow!("4I leaves the grid for {iv}"))?;
    let tau = 1.0 / (2.0 * (m + 2) as f64);
    let f_i = inputs.f.restrict(iv);
    let mut acc = 0.0;
    for k in iv.cells() {
        let v = commutator_a(&inputs.a, &inputs.a_list, &f_i, g.center(k))?;
        acc += v.abs().powf(tau);
    }
    let lhs = (acc / iv.len() as f64).powf(1.0 / tau);
    let mut rhs = luxemburg(&inputs.f, four, 1.0)?;
    for a in &inputs.a_funcs {
        rhs *= a.abs().average(four)?;
    }
    ensure!(rhs > 0.0 || lhs == 0.0, "local estimate has zero right side on {iv}");
    Ok(if lhs == 0.0 { 0.0 } else { lhs / rhs })
}

/// Local ratios for `count` (seed, interval) draws starting at `seed`.
///
/// Intervals are drawn on `reference` and mapped to the same physical
/// interval on `grid`, which must refine `reference`.
pub fn local_ratios(seed: u64, count: usize, m: usize, grid: Grid, reference: Grid, mode: SearchMode) -> Result<Vec<f64>> {
    let scale = grid.n_cells() / reference.n_cells();
    ensure!(scale >= 1 && scale * reference.n_cells() == grid.n_cells(), "grid does not refine the reference");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x10ca1);
    (0..count as u64)
        .map(|i| {
            let inp = generate_inputs(seed.wrapping_add(i), m, grid, mode);
            let iv = random_local_interval(&mut rng, reference.n_cells());
            local_ratio(&inp, GridInterval::new(iv.lo() * scale, iv.hi() * scale)?)
        })
        .collect()
}

pub fn run(s: &Scenario) -> Result<Vec<Check>> {
    let start = Instant::now();
    let seeds = s.seed_list();
    let w = weak_constants(&seeds, s.m, s.grid()?, s.coarse_grid()?, s.search)?;
    let half = seeds.len().div_ceil(2);
    let c_all = max_of(w.fine.iter().copied());
    let c_half = max_of(w.fine[..half].iter().copied());
    let c_coarse = max_of(w.coarse.iter().copied());
    let mut checks = vec![
        Check::at_most("endpoint/weak-seeds", WEAK_ANCHOR, c_all / c_half, 2.0)
            .detail("c_fine", c_all)
            .detail("c_first_half", c_half)
            .detail("per_seed_fine", &w.fine)
            .timed(start),
        Check::at_most("endpoint/weak-refinement", WEAK_ANCHOR, spread(c_all, c_coarse), 2.0)
            .detail("c_fine", c_all)
            .detail("c_coarse", c_coarse)
            .detail("per_seed_coarse", &w.coarse)
            .timed(start),
    ];
    let t = Instant::now();
    let count = s.samples.clamp(5, LOCAL_DRAWS);
    let coarse = s.coarse_grid()?;
    let rf = local_ratios(s.seed, count, s.m, s.grid()?, coarse, s.search)?;
    let rc = local_ratios(s.seed, count, s.m, coarse, coarse, s.search)?;
    let (cf, cc) = (max_of(rf.iter().copied()), max_of(rc.iter().copied()));
    checks.push(
        Check::at_most("endpoint/local", LOCAL_ANCHOR, spread(cf, cc), 2.0)
            .require(cf.is_finite() && cf > 0.0)
            .detail("draws", count)
            .detail("c_fine", cf)
            .detail("c_coarse", cc)
            .detail("c_fine_first_5", max_of(rf[..5].iter().copied()))
            .timed(t),
    );
    Ok(checks)
}
