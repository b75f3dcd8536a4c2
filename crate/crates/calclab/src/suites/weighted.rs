//! Weighted bounds for `C_{m+1,A}` with power weights.

use std::time::Instant;

use anyhow::{bail, Result};
use calclab_core::weights::{ainf_constant, multi_ap_constant, nu};
use calclab_core::{Grid, SampledFunction, SearchMode, Weight, WeightVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{commutator_a_field, log_spaced, max_of, spread};
use crate::inputs::{generate_inputs, parse_weight};
use crate::report::Check;
use crate::scenario::Scenario;

const STRONG_ANCHOR: &str = "‖C_{m+1,A}(a⃗; f)‖_{L^p(ν_w⃗)} ≤ C [w⃗]_{A_P⃗}^{max(1, p_j′/p)} [σ_m]_{A_∞} ‖f‖_{L^{p_{m+1}}(w_{m+1})} ∏_j ‖a_j‖_{L^{p_j}(w_j)}";
const PRODUCT_ANCHOR: &str = "same bound with ∏_j [σ_j]_{A_∞} in place of [σ_m]_{A_∞}";
const WEAK_ANCHOR: &str = "ν_w⃗({|C_{m+1,A}| > λ}) ≤ C ∏_{j ≤ m+1} (∫ Φ(|f_j|/μ) w_j)^{1/(m+1)}, Φ(t) = t log(e + t), μ = λ^{1/(m+1)}";

/// Exponents of the power weights offered to every slot.
pub const POWERS: [f64; 5] = [0.0, 0.25, -0.25, 0.5, -0.5];

/// Exponent tuples `(p₁, …, p_{m+1})` for the strong bound.
pub fn exponent_tuples() -> Vec<Vec<f64>> {
    vec![vec![2.0, 2.0], vec![2.0, 2.0, 2.0], vec![3.0, 1.5]]
}

/// One weight configuration: `w_j = |x − x_j|^{a_j}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerCombo {
    pub exponents: Vec<f64>,
    pub centers: Vec<f64>,
    pub powers: Vec<f64>,
    pub seed: u64,
}

impl PowerCombo {
    pub fn m(&self) -> usize {
        self.exponents.len() - 1
    }

    pub fn weights(&self, grid: Grid) -> Result<Vec<Weight>> {
        self.centers.iter().zip(&self.powers).map(|(&x0, &a)| Ok(Weight::power(grid, x0, a)?)).collect()
    }
}

/// `a` keeps `|x|^a ∈ A_p` exactly when `−1 < a < p − 1`; for `p = 1` the range is `(−1, 0]`.
pub fn admissible(a: f64, p: f64) -> bool {
    a > -1.0 && if p == 1.0 { a <= 0.0 } else { a < p - 1.0 }
}

/// `per_tuple` random combos for each exponent tuple.
pub fn random_combos(seed: u64, tuples: &[Vec<f64>], per_tuple: usize) -> Vec<PowerCombo> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3e16);
    let mut out = Vec::new();
    for (t, ps) in tuples.iter().enumerate() {
        for i in 0..per_tuple {
            let powers = ps
                .iter()
                .map(|&p| {
                    let ok: Vec<f64> = POWERS.iter().copied().filter(|&a| admissible(a, p)).collect();
                    *ok.choose(&mut rng).expect("zero is always admissible")
                })
                .collect();
            let centers = ps.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            let seed = seed.wrapping_add((t * per_tuple + i) as u64);
            out.push(PowerCombo { exponents: ps.clone(), centers, powers, seed });
        }
    }
    out
}

/// Both strong-bound ratios for one weight vector and one input draw.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StrongRatio {
    /// With `[σ_m]_{A_∞}`.
    pub slot: f64,
    /// With `∏_j [σ_j]_{A_∞}`.
    pub product: f64,
}

pub fn strong_ratio(weights: Vec<Weight>, exponents: &[f64], seed: u64, grid: Grid, mode: SearchMode) -> Result<StrongRatio> {
    let m = exponents.len() - 1;
    if exponents.iter().any(|&p| !(p > 1.0)) {
        bail!("strong bound needs every exponent above 1, got {exponents:?}");
    }
    let inp = generate_inputs(seed, m, grid, mode);
    let wv = WeightVector::new(weights, exponents.to_vec())?;
    let p = wv.p();
    let u = commutator_a_field(&inp)?;
    let nu = nu(&wv)?;
    let lhs = SampledFunction::new(grid, u)?.lp_norm(p, Some(nu.function()))?;
    let mut norms = 1.0;
    for (k, w) in wv.weights().iter().enumerate() {
        let f = if k < m { &inp.a_funcs[k] } else { &inp.f };
        norms *= f.lp_norm(exponents[k], Some(w.function()))?;
    }
    let power = exponents.iter().map(|&pj| pj / (pj - 1.0) / p).fold(1.0, f64::max);
    let w_const = multi_ap_constant(&wv, mode)?.powf(power);
    let mut sigma = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let s = wv.dual(k)?.expect("exponent above 1");
        sigma.push(ainf_constant(&s, mode)?);
    }
    let base = lhs / (w_const * norms);
    Ok(StrongRatio { slot: base / sigma[m - 1], product: base / sigma.iter().product::<f64>() })
}

/// Weak ratio for `p_j = 1`, maximized over levels.
pub fn weak_ratio(weights: &[Weight], seed: u64, grid: Grid, mode: SearchMode) -> Result<f64> {
    let m = weights.len() - 1;
    let inp = generate_inputs(seed, m, grid, mode);
    let wv = WeightVector::new(weights.to_vec(), vec![1.0; m + 1])?;
    let nu = nu(&wv)?;
    let u = commutator_a_field(&inp)?;
    let top = max_of(u.iter().map(|v| v.abs()));
    let h = grid.h();
    let mut best = 0.0f64;
    for lambda in log_spaced(top * 1e-2, top * 0.8, 8) {
        let mu = lambda.powf(1.0 / (m + 1) as f64);
        let lhs = h * u.iter().zip(nu.values()).filter(|(v, _)| v.abs() > lambda).map(|(_, w)| w).sum::<f64>();
        let mut rhs = 1.0;
        for (k, w) in weights.iter().enumerate() {
            let f = if k < m { &inp.a_funcs[k] } else { &inp.f };
            let orlicz: f64 = h * f
                .values()
                .iter()
                .zip(w.values())
                .map(|(v, wk)| {
                    let t = v.abs() / mu;
                    t * (std::f64::consts::E + t).ln() * wk
                })
                .sum::<f64>();
            rhs *= orlicz.powf(1.0 / (m + 1) as f64);
        }
        best = best.max(lhs / rhs);
    }
    Ok(best)
}

/// Strong-bound constants on one grid.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StrongConstants {
    pub ratios: Vec<StrongRatio>,
}

impl StrongConstants {
    pub fn slot(&self) -> f64 {
        max_of(self.ratios.iter().map(|r| r.slot))
    }

    pub fn product(&self) -> f64 {
        max_of(self.ratios.iter().map(|r| r.product))
    }

    /// Slot-form constant over the even-indexed combos.
    pub fn slot_even(&self) -> f64 {
        max_of(self.ratios.iter().step_by(2).map(|r| r.slot))
    }
}

pub fn strong_constants(combos: &[PowerCombo], grid: Grid, mode: SearchMode) -> Result<StrongConstants> {
    let mut out = StrongConstants::default();
    for c in combos {
        out.ratios.push(strong_ratio(c.weights(grid)?, &c.exponents, c.seed, grid, mode)?);
    }
    Ok(out)
}

/// Strong-bound checks from paired fine and coarse constants.
pub fn strong_checks(combos: &[PowerCombo], fine: &StrongConstants, coarse: &StrongConstants, start: Instant) -> Vec<Check> {
    vec![
        Check::at_most("weighted/strong-one-constant", STRONG_ANCHOR, fine.slot() / fine.slot_even(), 2.0)
            .require(fine.slot().is_finite())
            .detail("combos", combos.len())
            .detail("c_slot", fine.slot())
            .detail("c_slot_even_half", fine.slot_even())
            .timed(start),
        Check::at_most("weighted/strong-refinement", STRONG_ANCHOR, spread(fine.slot(), coarse.slot()), 2.0)
            .detail("c_fine", fine.slot())
            .detail("c_coarse", coarse.slot())
            .timed(start),
        Check::at_most("weighted/strong-product-variant", PRODUCT_ANCHOR, spread(fine.product(), coarse.product()), 2.0)
            .detail("c_product_fine", fine.product())
            .detail("c_product_coarse", coarse.product())
            .detail("c_slot_fine", fine.slot())
            .timed(start),
    ]
}

pub fn run(s: &Scenario) -> Result<Vec<Check>> {
    let start = Instant::now();
    let (grid, coarse) = (s.grid()?, s.coarse_grid()?);
    let mut checks = Vec::new();
    if !s.weights.is_empty() {
        // User-supplied weights: one strong-bound evaluation per seed.
        if s.weights.len() != s.m + 1 || s.exponents.len() != s.m + 1 {
            bail!("weighted suite needs m + 1 weights and exponents");
        }
        let mut fine = StrongConstants::default();
        let mut crs = StrongConstants::default();
        for seed in s.seed_list() {
            let wf = s.weights.iter().map(|w| parse_weight(w, grid)).collect::<Result<Vec<_>>>()?;
            let wc = s.weights.iter().map(|w| parse_weight(w, coarse)).collect::<Result<Vec<_>>>()?;
            fine.ratios.push(strong_ratio(wf, &s.exponents, seed, grid, s.search)?);
            crs.ratios.push(strong_ratio(wc, &s.exponents, seed, coarse, s.search)?);
        }
        checks.push(
            Check::at_most("weighted/strong-refinement", STRONG_ANCHOR, spread(fine.slot(), crs.slot()), 2.0)
                .detail("weights", &s.weights)
                .detail("c_fine", fine.slot())
                .detail("c_coarse", crs.slot())
                .detail("c_product_fine", fine.product())
                .timed(start),
        );
        return Ok(checks);
    }
    let combos = random_combos(s.seed, &exponent_tuples(), 8);
    let fine = strong_constants(&combos, grid, s.search)?;
    let crs = strong_constants(&combos, coarse, s.search)?;
    checks.extend(strong_checks(&combos, &fine, &crs, start));

    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0xa1);
    let (mut wf, mut wc) = (0.0f64, 0.0f64);
    for i in 0..6u64 {
        let powers: Vec<f64> = (0..=s.m).map(|_| *[0.0, -0.25, -0.5].choose(&mut rng).expect("nonempty")).collect();
        let centers: Vec<f64> = (0..=s.m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let make = |g: Grid| -> Result<Vec<Weight>> {
            centers.iter().zip(&powers).map(|(&x0, &a)| Ok(Weight::power(g, x0, a)?)).collect()
        };
        wf = wf.max(weak_ratio(&make(grid)?, s.seed.wrapping_add(i), grid, s.search)?);
        wc = wc.max(weak_ratio(&make(coarse)?, s.seed.wrapping_add(i), coarse, s.search)?);
    }
    checks.push(
        Check::at_most("weighted/weak-endpoint", WEAK_ANCHOR, spread(wf, wc), 2.0)
            .require(wf.is_finite())
            .detail("c_fine", wf)
            .detail("c_coarse", wc)
            .detail("weight_factor", "single w_j per slot")
            .timed(t),
    );
    Ok(checks)
}
