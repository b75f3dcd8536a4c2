//! Pointwise kernel bounds on random tuples and closed-form commutator values.

use std::time::Instant;

use anyhow::Result;
use calclab_core::kernels::{bump, commutator, commutator_a, kernel_k, kernel_ka, smoothed_kernel_kaj};
use calclab_core::{Grid, LipschitzData, SampledFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::spread;
use crate::inputs::generate_inputs;
use crate::report::Check;
use crate::scenario::Scenario;

const SIZE_ANCHOR: &str = "|K(x; y⃗)| ≤ (m+1)^{m+1} (Σ_j |x − y_j|)^{−(m+1)}";
const SMOOTH_ANCHOR: &str =
    "|K(x; y⃗) − K(x′; y⃗)| ≤ C |x − x′| (Σ_j |x − y_j|)^{−(m+2)} for 12|x − x′| < min_j |x − y_j|";
const KA_ANCHOR: &str = "|K_A(x; y⃗)| ≤ C |P₂(A; x, y_{m+1})| (Σ_j |x − y_j|)^{−(m+2)}";
const SMOOTHED_ANCHOR: &str = "|K_A − K^j_{A,t}| ≤ C |P₂(A; x, y_{m+1})| (Σ_i |x − y_i|)^{−(m+2)} φ(|y_{m+1} − y_j|/t) for 2t ≤ |x − y_j|";

/// Largest ratios over a batch of random tuples.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct KernelConstants {
    pub size: f64,
    pub smoothness: f64,
    pub ka_size: f64,
    pub smoothed: f64,
    /// Tuples where `φ = 0` but the smoothed kernel differs from `K_A`.
    pub smoothed_leaks: usize,
}

impl KernelConstants {
    fn merge(&mut self, o: &Self) {
        self.size = self.size.max(o.size);
        self.smoothness = self.smoothness.max(o.smoothness);
        self.ka_size = self.ka_size.max(o.ka_size);
        self.smoothed = self.smoothed.max(o.smoothed);
        self.smoothed_leaks += o.smoothed_leaks;
    }
}

fn dist_sum(x: f64, y: &[f64]) -> f64 {
    y.iter().map(|&yj| (x - yj).abs()).sum()
}

/// `x`, and `y` with `y_{m+1}` at distance in `[0.05, 1.5]` and most `y_j` between.
fn random_tuple(rng: &mut impl Rng, m: usize, span: f64) -> (f64, Vec<f64>) {
    let x = rng.gen_range(-span..span);
    let d = rng.gen_range(0.05..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let last = x + d;
    let mut y: Vec<f64> = (0..m)
        .map(|_| {
            if rng.gen_bool(0.8) {
                x + d * rng.gen_range(0.0..1.0)
            } else {
                x + rng.gen_range(-2.0..2.0)
            }
        })
        .map(|v| if v == x { x + d * 0.5 } else { v })
        .collect();
    y.push(last);
    (x, y)
}

/// Ratios over `samples` random tuples; `a` supplies `P₂` on a grid around the origin.
pub fn kernel_constants(a: &LipschitzData, m: usize, samples: usize, seed: u64) -> Result<KernelConstants> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = KernelConstants::default();
    let span = 0.5 * (a.grid().x_max() - a.grid().x_min()) - 2.0;
    for _ in 0..samples {
        let (x, y) = random_tuple(&mut rng, m, span);
        let s = dist_sum(x, &y);
        let k = kernel_k(m, x, &y)?;
        c.size = c.size.max(k.abs() * s.powi(m as i32 + 1));

        let dmin = y.iter().map(|&yj| (x - yj).abs()).fold(f64::INFINITY, f64::min);
        let dx = rng.gen_range(-1.0..1.0) * dmin / 12.0 * 0.999;
        if dx != 0.0 {
            let kp = kernel_k(m, x + dx, &y)?;
            c.smoothness = c.smoothness.max((k - kp).abs() * s.powi(m as i32 + 2) / dx.abs());
        }

        let p2 = a.p2(x, y[m])?;
        if p2 != 0.0 {
            let ka = kernel_ka(a, m, x, &y)?;
            c.ka_size = c.ka_size.max(ka.abs() * s.powi(m as i32 + 2) / p2.abs());
        }

        // Slot j placed near y_{m+1} half the time so that φ > 0 is exercised.
        let j = rng.gen_range(0..m);
        let d = (x - y[m]).abs();
        let t = (rng.gen_range(0.01..0.3) * d).max(2.0 * a.grid().h());
        let mut ys = y.clone();
        if rng.gen_bool(0.5) {
            ys[j] = y[m] + rng.gen_range(-1.0..1.0) * t;
        }
        if (x - ys[j]).abs() < 2.0 * t {
            continue;
        }
        let ka = kernel_ka(a, m, x, &ys)?;
        let kt = smoothed_kernel_kaj(a, m, t, j, x, &ys)?;
        let phi = bump((ys[m] - ys[j]).abs() / t);
        let sm = dist_sum(x, &ys);
        if phi == 0.0 {
            if ka != kt {
                c.smoothed_leaks += 1;
            }
        } else if p2 != 0.0 {
            c.smoothed = c.smoothed.max((ka - kt).abs() * sm.powi(m as i32 + 2) / (p2.abs() * phi));
        }
    }
    Ok(c)
}

/// Constants from `samples/10` and `samples` tuples.
pub fn kernel_constants_pair(a: &LipschitzData, m: usize, samples: usize, seed: u64) -> Result<(KernelConstants, KernelConstants)> {
    let small = kernel_constants(a, m, samples / 10, seed)?;
    let mut large = small;
    large.merge(&kernel_constants(a, m, samples - samples / 10, seed.wrapping_add(1))?);
    Ok((small, large))
}

/// `C₂(1, ·)` applied to `χ_{[−1,1]}` at `x = 2` is `ln 3`, and `C_{2,A}` with `A(x) = x²` is `2`.
pub fn closed_form_errors(grid: Grid) -> Result<(f64, f64)> {
    let one = LipschitzData::new(SampledFunction::constant(grid, 1.0));
    let f = SampledFunction::indicator(grid, -1.0, 1.0)?;
    let ln3 = (commutator(std::slice::from_ref(&one), &f, 2.0)? - 3f64.ln()).abs();
    let quad = LipschitzData::new(grid.sample(|x| 2.0 * x));
    let two = (commutator_a(&quad, &[one], &f, 2.0)? - 2.0).abs();
    Ok((ln3, two))
}

pub fn run(s: &Scenario) -> Result<Vec<Check>> {
    let start = Instant::now();
    let inp = generate_inputs(s.seed, s.m, s.grid()?, s.search);
    let bound = ((s.m + 1) as f64).powi(s.m as i32 + 1);
    let (small, large) = kernel_constants_pair(&inp.a, s.m, s.samples.max(10), s.seed)?;
    let mut checks = vec![
        Check::at_most("kernels/size", SIZE_ANCHOR, large.size, bound).detail("samples", s.samples).timed(start),
        Check::at_most("kernels/smoothness", SMOOTH_ANCHOR, spread(large.smoothness, small.smoothness), 2.0)
            .detail("c_small", small.smoothness)
            .detail("c_large", large.smoothness)
            .timed(start),
        Check::at_most("kernels/remainder-size", KA_ANCHOR, spread(large.ka_size, small.ka_size), 2.0)
            .detail("c_small", small.ka_size)
            .detail("c_large", large.ka_size)
            .timed(start),
        Check::at_most("kernels/smoothed", SMOOTHED_ANCHOR, spread(large.smoothed, small.smoothed), 2.0)
            .require(large.smoothed_leaks == 0)
            .detail("c_small", small.smoothed)
            .detail("c_large", large.smoothed)
            .detail("leaks_where_phi_vanishes", large.smoothed_leaks)
            .timed(start),
    ];
    let t = Instant::now();
    let g = Grid::new(-4.0, 4.0, s.n_cells.max(1024))?;
    let (ln3, two) = closed_form_errors(g)?;
    checks.push(
        Check::at_most("kernels/ln3", "C₂(1; χ_{[−1,1]})(2) = ln 3, error ≤ 2h", ln3 / g.h(), 2.0)
            .detail("abs_error", ln3)
            .timed(t),
    );
    checks.push(
        Check::at_most("kernels/quadratic-remainder", "C_{2,A}(1; χ_{[−1,1]})(2) = 2 for A(x) = x², error ≤ 4h", two / g.h(), 4.0)
            .detail("abs_error", two)
            .timed(t),
    );
    Ok(checks)
}
