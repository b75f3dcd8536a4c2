//! Seeded random inputs and weight specs.

use std::f64::consts::PI;

use anyhow::{bail, Context, Result};
use calclab_core::kernels::bump;
use calclab_core::{Grid, InputSet, LipschitzData, SampledFunction, SearchMode, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of Fourier modes in every generated input.
pub const MODES: usize = 4;

/// A trigonometric polynomial on the domain, optionally multiplied by a
/// smooth cutoff that vanishes on the outer eighth at each end.
#[derive(Clone, Debug)]
pub struct TrigProfile {
    lo: f64,
    hi: f64,
    offset: f64,
    cos: [f64; MODES],
    sin: [f64; MODES],
    cutoff: bool,
}

impl TrigProfile {
    pub fn random(rng: &mut impl Rng, lo: f64, hi: f64, cutoff: bool) -> Self {
        let mut cos = [0.0; MODES];
        let mut sin = [0.0; MODES];
        for k in 0..MODES {
            cos[k] = rng.gen_range(-1.0..1.0);
            sin[k] = rng.gen_range(-1.0..1.0);
        }
        Self { lo, hi, offset: rng.gen_range(-1.0..1.0), cos, sin, cutoff }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mid = 0.5 * (self.lo + self.hi);
        let half = 0.5 * (self.hi - self.lo);
        let u = (x - mid) / half;
        let mut v = self.offset;
        for k in 0..MODES {
            let w = (k + 1) as f64 * PI * u;
            v += self.cos[k] * w.cos() + self.sin[k] * w.sin();
        }
        if self.cutoff {
            v *= bump(u / 0.75);
        }
        v
    }

    pub fn sample(&self, grid: Grid) -> SampledFunction {
        grid.sample(|x| self.eval(x))
    }
}

/// Inputs for one seed. The profiles do not depend on the grid, so the same
/// seed sampled on two grids is a refinement of one continuous scenario.
#[derive(Clone, Debug)]
pub struct RandomScenario {
    pub aprime: TrigProfile,
    pub a_list: Vec<TrigProfile>,
    pub f: TrigProfile,
}

impl RandomScenario {
    pub fn new(seed: u64, m: usize, domain: [f64; 2]) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [lo, hi] = domain;
        let aprime = TrigProfile::random(&mut rng, lo, hi, false);
        let a_list = (0..m).map(|_| TrigProfile::random(&mut rng, lo, hi, true)).collect();
        let f = TrigProfile::random(&mut rng, lo, hi, true);
        Self { aprime, a_list, f }
    }

    pub fn sample(&self, grid: Grid, mode: SearchMode) -> SampledInputs {
        let a = LipschitzData::normalized(self.aprime.sample(grid), mode);
        let a_funcs: Vec<SampledFunction> = self.a_list.iter().map(|p| p.sample(grid)).collect();
        let a_list = a_funcs.iter().map(|f| LipschitzData::new(f.clone())).collect();
        SampledInputs { a, a_funcs, a_list, f: self.f.sample(grid) }
    }
}

/// A random scenario sampled on a grid.
#[derive(Clone, Debug)]
pub struct SampledInputs {
    /// `A` with `‖A′‖_BMO = 1`.
    pub a: LipschitzData,
    /// The `a_j`.
    pub a_funcs: Vec<SampledFunction>,
    /// `A_j` as antiderivatives of the `a_j`.
    pub a_list: Vec<LipschitzData>,
    pub f: SampledFunction,
}

impl SampledInputs {
    /// `(a₁, …, a_m, f)` in evaluator slot order.
    pub fn input_set(&self) -> Result<InputSet> {
        let mut fs = self.a_funcs.clone();
        fs.push(self.f.clone());
        Ok(InputSet::new(fs)?)
    }
}

pub fn generate_inputs(seed: u64, m: usize, grid: Grid, mode: SearchMode) -> SampledInputs {
    RandomScenario::new(seed, m, [grid.x_min(), grid.x_max()]).sample(grid, mode)
}

/// Parses `power:x0:a`, `constant:c` or `file:path` into a weight on `grid`.
///
/// A file holds one positive value per line, one line per cell; blank lines
/// and lines starting with `#` are ignored.
pub fn parse_weight(spec: &str, grid: Grid) -> Result<Weight> {
    let mut parts = spec.splitn(3, ':');
    let kind = parts.next().unwrap_or_default();
    let num = |s: Option<&str>, what: &str| -> Result<f64> {
        s.with_context(|| format!("weight spec {spec:?} is missing {what}"))?
            .trim()
            .parse::<f64>()
            .with_context(|| format!("weight spec {spec:?}: bad {what}"))
    };
    let w = match kind {
        "power" => {
            let x0 = num(parts.next(), "x0")?;
            let a = num(parts.next(), "exponent")?;
            Weight::power(grid, x0, a)?
        }
        "constant" => {
            let c = num(parts.next(), "value")?;
            Weight::constant(grid, c)?
        }
        "file" => {
            let path = spec.strip_prefix("file:").unwrap_or_default();
            let text = std::fs::read_to_string(path).with_context(|| format!("reading weight file {path}"))?;
            let values = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| l.parse::<f64>().with_context(|| format!("bad weight value {l:?} in {path}")))
                .collect::<Result<Vec<_>>>()?;
            Weight::new(SampledFunction::new(grid, values)?)?
        }
        _ => bail!("unknown weight kind {kind:?} in {spec:?}"),
    };
    Ok(w)
}
