//! Verification suites. Each suite turns a [`Scenario`] into a [`Report`].

use std::time::Instant;

use anyhow::{bail, Result};
use calclab_core::kernels::CommutatorOperator;
use calclab_core::MultiSublinear;

use crate::inputs::SampledInputs;
use crate::report::Report;
use crate::scenario::Scenario;

pub mod decompositions;
pub mod domination;
pub mod endpoint;
pub mod kernels;
pub mod maximal;
pub mod weighted;
pub mod weights_sanity;

pub const SUITES: [&str; 7] =
    ["domination", "endpoint", "weighted", "kernels", "maximal", "weights-sanity", "decompositions"];

/// Runs the suite named by `scenario.suite`.
pub fn run_suite(scenario: &Scenario) -> Result<Report> {
    scenario.validate()?;
    let start = Instant::now();
    let checks = match scenario.suite.as_str() {
        "domination" => domination::run(scenario)?,
        "endpoint" => endpoint::run(scenario)?,
        "weighted" => weighted::run(scenario)?,
        "kernels" => kernels::run(scenario)?,
        "maximal" => maximal::run(scenario)?,
        "weights-sanity" => weights_sanity::run(scenario)?,
        "decompositions" => decompositions::run(scenario)?,
        other => bail!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")),
    };
    let mut report = Report { checks, ..Report::default() };
    report.meta("scenario", scenario);
    report.meta("version", env!("CARGO_PKG_VERSION"));
    report.meta("runtime_s", start.elapsed().as_secs_f64());
    Ok(report)
}

/// `|{|v| > λ}|` for cell values with spacing `h`.
pub fn level_measure(values: &[f64], h: f64, lambda: f64) -> f64 {
    h * values.iter().filter(|v| v.abs() > lambda).count() as f64
}

/// `k` levels from `lo` to `hi`, evenly spaced in log scale.
pub fn log_spaced(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..k).map(|i| (a + (b - a) * i as f64 / (k - 1) as f64).exp()).collect()
}

/// `sup_{t ≥ t0} t^p·|{|v| > t}|` for cell values with spacing `h`.
///
/// Between consecutive values the product increases in `t`, so the supremum
/// is the larger of the value at `t0` and the left limits `u^p·|{|v| ≥ u}|`
/// at every value `u > t0`.
pub fn tail_sup(values: &[f64], h: f64, p: f64, t0: f64) -> f64 {
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    let above_t0 = abs.iter().filter(|&&u| u > t0).count();
    let mut best = t0.powf(p) * h * above_t0 as f64;
    for (i, &u) in abs.iter().enumerate().take(above_t0) {
        let ge = i + 1 + abs[i + 1..].iter().take_while(|&&w| w == u).count();
        best = best.max(u.powf(p) * h * ge as f64);
    }
    best
}

/// `max(r, 1/r)`: how far two constants are from agreeing.
pub fn spread(a: f64, b: f64) -> f64 {
    if a == b {
        return 1.0;
    }
    let r = a / b;
    if r.is_finite() && r > 0.0 {
        r.max(r.recip())
    } else {
        f64::INFINITY
    }
}

pub fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// `C_{m+1,A}(a⃗; f)` at every cell center.
pub fn commutator_a_field(inputs: &SampledInputs) -> Result<Vec<f64>> {
    let op = CommutatorOperator::with_remainder(inputs.a_funcs.len(), inputs.a.clone());
    let set = inputs.input_set()?;
    let full = set.grid().full();
    Ok(op.eval_field(&set, full, full)?)
}
