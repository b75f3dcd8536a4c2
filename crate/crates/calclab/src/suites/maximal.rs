//! Weak-type and pointwise bounds for the maximal operators.

use std::time::Instant;

use anyhow::Result;
use calclab_core::kernels::CommutatorOperator;
use calclab_core::maximal::{grand_max_field, hl_max_field, m_orlicz_field, m_s_field, sharp_max_field};
use calclab_core::{Grid, SearchMode};
use serde::Serialize;

use super::{commutator_a_field, level_measure, log_spaced, max_of, spread, tail_sup};
use crate::inputs::{generate_inputs, RandomScenario};
use crate::report::Check;
use crate::scenario::Scenario;

const ORLICZ_ANCHOR: &str = "|{M_{L(log L)^γ} f > λ}| ≤ C ∫ (|f|/λ) log^γ(e + |f|/λ)";
const MS_ANCHOR: &str = "|{M_s h > λ}| ≤ C λ⁻¹ sup_{t ≥ 2^{−1/s}λ} t |{|h| > t}|";
const DOUBLING_ANCHOR: &str = "sup_λ Φ(λ)|{|h| > λ}| ≤ C sup_λ Φ(λ)|{M^♯_{0,s} h > λ}|, Φ(t) = t^p, s = 0.01";
const SHARP_ANCHOR: &str = "M^♯_{0,s}(C_{m+1,A}(a⃗; f))(x) ≤ C M_{L log L} f(x) ∏_j M a_j(x)";
const GRAND_ANCHOR: &str = "|U(F)(x)| ≤ C (∏_j |f_j(x)| + M^κ_U(F)(x)), U = C_{m+1,A}, κ = 3";

/// Number of random functions in the weak-type suite.
pub const FUNCTIONS: usize = 20;

fn f_samples(seeds: &[u64], domain: [f64; 2]) -> Vec<crate::inputs::TrigProfile> {
    seeds.iter().map(|&s| RandomScenario::new(s, 1, domain).f).collect()
}

/// Weak-type constants on one grid.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct WeakConstants {
    pub orlicz: [f64; 2],
    pub ms: [f64; 2],
    pub doubling: [f64; 2],
}

/// Levels are taken relative to `max|f|` on `reference` so both grids see the same `λ`.
pub fn weak_constants(seeds: &[u64], m: usize, grid: Grid, reference: Grid, mode: SearchMode) -> Result<WeakConstants> {
    let domain = [grid.x_min(), grid.x_max()];
    let h = grid.h();
    let s_levels = [0.5, 1.0 / (m + 2) as f64];
    let mut c = WeakConstants::default();
    for prof in f_samples(seeds, domain) {
        let f = prof.sample(grid);
        let top = prof.sample(reference).max_abs();
        let levels = log_spaced(0.05 * top, 0.95 * top, 10);
        for (gi, gamma) in [0.0, 1.0].into_iter().enumerate() {
            let mf = m_orlicz_field(&f, gamma, mode)?;
            for &lambda in &levels {
                let rhs = h * f
                    .values()
                    .iter()
                    .map(|v| {
                        let t = v.abs() / lambda;
                        t * (std::f64::consts::E + t).ln().powf(gamma)
                    })
                    .sum::<f64>();
                c.orlicz[gi] = c.orlicz[gi].max(level_measure(&mf, h, lambda) / rhs);
            }
        }
        for (si, &s) in s_levels.iter().enumerate() {
            let ms = m_s_field(&f, s, mode)?;
            for &lambda in &levels {
                let tail = tail_sup(f.values(), h, 1.0, 2f64.powf(-1.0 / s) * lambda);
                c.ms[si] = c.ms[si].max(level_measure(&ms, h, lambda) * lambda / tail);
            }
        }
        let sharp = sharp_max_field(&f, 0.01, mode)?;
        for (pi, p) in [0.5, 1.0].into_iter().enumerate() {
            let num = tail_sup(f.values(), h, p, 0.0);
            let den = tail_sup(&sharp, h, p, 0.0);
            c.doubling[pi] = c.doubling[pi].max(num / den);
        }
    }
    Ok(c)
}

pub fn weak_checks(fine: &WeakConstants, coarse: &WeakConstants, start: Instant) -> Vec<Check> {
    let mut out = Vec::new();
    for (i, gamma) in ["0", "1"].iter().enumerate() {
        out.push(
            Check::at_most(&format!("maximal/orlicz-weak-gamma{gamma}"), ORLICZ_ANCHOR, spread(fine.orlicz[i], coarse.orlicz[i]), 2.0)
                .require(fine.orlicz[i].is_finite())
                .detail("c_fine", fine.orlicz[i])
                .detail("c_coarse", coarse.orlicz[i])
                .timed(start),
        );
    }
    for (i, s) in ["1/2", "1/(m+2)"].iter().enumerate() {
        out.push(
            Check::at_most(&format!("maximal/ms-weak-s={s}"), MS_ANCHOR, spread(fine.ms[i], coarse.ms[i]), 2.0)
                .require(fine.ms[i].is_finite())
                .detail("c_fine", fine.ms[i])
                .detail("c_coarse", coarse.ms[i])
                .timed(start),
        );
    }
    for (i, p) in ["1/2", "1"].iter().enumerate() {
        out.push(
            Check::at_most(&format!("maximal/sharp-doubling-p={p}"), DOUBLING_ANCHOR, spread(fine.doubling[i], coarse.doubling[i]), 2.0)
                .require(fine.doubling[i].is_finite())
                .detail("c_fine", fine.doubling[i])
                .detail("c_coarse", coarse.doubling[i])
                .timed(start),
        );
    }
    out
}

/// Pointwise ratios `|sharp(U)|/(M_{L log L} f ∏ M a_j)` at every cell.
pub fn sharp_ratios(seed: u64, m: usize, s: f64, grid: Grid, mode: SearchMode) -> Result<Vec<f64>> {
    let inp = generate_inputs(seed, m, grid, mode);
    let u = calclab_core::SampledFunction::new(grid, commutator_a_field(&inp)?)?;
    let lhs = sharp_max_field(&u, s, mode)?;
    let mut rhs = m_orlicz_field(&inp.f, 1.0, mode)?;
    for a in &inp.a_funcs {
        for (r, v) in rhs.iter_mut().zip(hl_max_field(a, mode)?) {
            *r *= v;
        }
    }
    Ok(lhs.iter().zip(&rhs).map(|(&l, &r)| ratio(l, r)).collect())
}

/// Pointwise ratios `|U(F)|/(∏|f_j| + M^κ_U F)` at every cell.
pub fn grand_ratios(seed: u64, m: usize, kappa: u32, grid: Grid, mode: SearchMode) -> Result<Vec<f64>> {
    let inp = generate_inputs(seed, m, grid, mode);
    let set = inp.input_set()?;
    let op = CommutatorOperator::with_remainder(m, inp.a.clone());
    let u = commutator_a_field(&inp)?;
    let gm = grand_max_field(&op, &set, kappa, SearchMode::Dyadic)?;
    Ok((0..grid.n_cells()).map(|k| ratio(u[k].abs(), set.product_abs(k) + gm[k])).collect())
}

fn ratio(l: f64, r: f64) -> f64 {
    if l == 0.0 {
        0.0
    } else if r > 0.0 {
        l / r
    } else {
        f64::INFINITY
    }
}

/// Calibrates on the coarse grid and reports `max_fine / C_coarse` with the
/// fraction of fine cells that lie under `2·C_coarse`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Calibration {
    pub c_coarse: f64,
    pub c_fine: f64,
    pub covered: f64,
}

pub fn calibrate(coarse: &[Vec<f64>], fine: &[Vec<f64>]) -> Calibration {
    let c_coarse = max_of(coarse.iter().flatten().copied());
    let total: usize = fine.iter().map(Vec::len).sum();
    let under = fine.iter().flatten().filter(|&&r| r <= 2.0 * c_coarse).count();
    Calibration { c_coarse, c_fine: max_of(fine.iter().flatten().copied()), covered: under as f64 / total as f64 }
}

pub fn calibration_check(name: &str, anchor: &str, cal: Calibration, start: Instant) -> Check {
    Check::at_most(name, anchor, cal.c_fine / cal.c_coarse, 2.0)
        .require(cal.covered == 1.0 && cal.c_coarse > 0.0 && cal.c_coarse.is_finite())
        .detail("calibration", cal)
        .timed(start)
}

pub fn run(s: &Scenario) -> Result<Vec<Check>> {
    let start = Instant::now();
    let (grid, coarse) = (s.grid()?, s.coarse_grid()?);
    let seeds: Vec<u64> = (0..FUNCTIONS as u64).map(|i| s.seed.wrapping_add(i)).collect();
    let wf = weak_constants(&seeds, s.m, grid, coarse, s.search)?;
    let wc = weak_constants(&seeds, s.m, coarse, coarse, s.search)?;
    let mut checks = weak_checks(&wf, &wc, start);

    let t = Instant::now();
    let (mut cf, mut cc) = (Vec::new(), Vec::new());
    for seed in s.seed_list() {
        cf.push(sharp_ratios(seed, s.m, s.s, grid, s.search)?);
        cc.push(sharp_ratios(seed, s.m, s.s, coarse, s.search)?);
    }
    checks.push(calibration_check("maximal/sharp-pointwise", SHARP_ANCHOR, calibrate(&cc, &cf), t).detail("s", s.s));

    let t = Instant::now();
    let (mut gf, mut gc) = (Vec::new(), Vec::new());
    for seed in s.seed_list() {
        gf.push(grand_ratios(seed, s.m, s.kappa, grid, s.search)?);
        gc.push(grand_ratios(seed, s.m, s.kappa, coarse, s.search)?);
    }
    checks.push(calibration_check("maximal/grand-pointwise", GRAND_ANCHOR, calibrate(&gc, &gf), t));
    Ok(checks)
}
