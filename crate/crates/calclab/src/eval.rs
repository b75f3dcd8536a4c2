//! Single-operator evaluation on the inputs a scenario generates.

use anyhow::{bail, Result};
use calclab_core::kernels::{commutator, commutator_a, CommutatorOperator};
use calclab_core::maximal::{grand_max, hl_max, m_orlicz, m_s, sharp_max};
use calclab_core::weights::{ainf_constant, ap_constant};

use crate::inputs::{generate_inputs, parse_weight};
use crate::scenario::Scenario;

pub const OPS: [&str; 9] =
    ["commutator", "commutator_A", "hl_max", "m_s", "m_orlicz", "sharp_max", "grand_max", "ap", "ainf"];

/// `(x, value)` pairs for `op`. Pointwise operators run at `scenario.points`
/// (every cell center when empty); `ap` and `ainf` return one row per weight
/// spec with `x` set to the slot index.
pub fn evaluate(op: &str, s: &Scenario) -> Result<Vec<(f64, f64)>> {
    s.validate()?;
    let g = s.grid()?;
    if op == "ap" || op == "ainf" {
        if s.weights.is_empty() {
            bail!("{op} needs at least one weight spec");
        }
        return s
            .weights
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let w = parse_weight(spec, g)?;
                let v = if op == "ap" {
                    let p = s.exponents.get(i).copied().unwrap_or(2.0);
                    ap_constant(&w, p, s.search)?
                } else {
                    ainf_constant(&w, s.search)?
                };
                Ok((i as f64, v))
            })
            .collect();
    }
    let inp = generate_inputs(s.seed, s.m, g, s.search);
    let points: Vec<f64> = if s.points.is_empty() { (0..g.n_cells()).map(|k| g.center(k)).collect() } else { s.points.clone() };
    let set = inp.input_set()?;
    let op_a = CommutatorOperator::with_remainder(s.m, inp.a.clone());
    points
        .iter()
        .map(|&x| {
            let v = match op {
                "commutator" => commutator(&inp.a_list, &inp.f, x)?,
                "commutator_A" => commutator_a(&inp.a, &inp.a_list, &inp.f, x)?,
                "hl_max" => hl_max(&inp.f, x, s.search)?,
                "m_s" => m_s(&inp.f, s.s.min(1.0), x, s.search)?,
                "m_orlicz" => m_orlicz(&inp.f, s.gamma, x, s.search)?,
                "sharp_max" => sharp_max(&inp.f, s.s, x, s.search)?,
                "grand_max" => grand_max(&op_a, &set, s.kappa, x, s.search)?,
                other => bail!("unknown operator {other:?}; expected one of {}", OPS.join(", ")),
            };
            Ok((x, v))
        })
        .collect()
}

/// Plot-ready `x,value` CSV.
pub fn to_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("x,value\n");
    for (x, v) in rows {
        out.push_str(&format!("{x},{v}\n"));
    }
    out
}
