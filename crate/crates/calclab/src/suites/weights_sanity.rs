//! Exact identities of the weight constants.

use std::time::Instant;

use anyhow::Result;
use calclab_core::weights::{ainf_constant, ap_constant, multi_ap_constant};
use calclab_core::{Grid, SearchMode, Weight, WeightVector};

use crate::inputs::parse_weight;
use crate::report::Check;
use crate::scenario::Scenario;

const MODES: [SearchMode; 3] = [SearchMode::Dyadic, SearchMode::Dilated, SearchMode::Exhaustive];

/// `max |c − 1|` over every constant of the all-ones weight.
pub fn all_ones_defect(grid: Grid) -> Result<f64> {
    let one = Weight::constant(grid, 1.0)?;
    let mut worst = 0.0f64;
    for mode in MODES {
        for p in [1.5, 2.0, 3.0] {
            worst = worst.max((ap_constant(&one, p, mode)? - 1.0).abs());
        }
        worst = worst.max((ainf_constant(&one, mode)? - 1.0).abs());
        for ps in [vec![1.0, 1.0], vec![2.0, 2.0], vec![1.0, 2.0], vec![3.0, 1.5], vec![2.0, 2.0, 2.0]] {
            let wv = WeightVector::new(vec![one.clone(); ps.len()], ps)?;
            worst = worst.max((multi_ap_constant(&wv, mode)? - 1.0).abs());
        }
    }
    Ok(worst)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// Worst relative change of `[w]_{A_p}`, `[w]_{A_∞}` and `[w⃗]_{A_P⃗}` under `w ↦ c·w`.
pub fn scale_defect(grid: Grid, mode: SearchMode) -> Result<f64> {
    let ws = [Weight::power(grid, 0.0, 0.5)?, Weight::power(grid, 0.3, -0.25)?, Weight::new(grid.sample(|x| 2.0 + x.sin()))?];
    let mut worst = 0.0f64;
    for c in [1e-3, 7.5, 1e4] {
        for w in &ws {
            let cw = w.scale(c)?;
            for p in [1.5, 2.0, 3.0] {
                worst = worst.max(rel(ap_constant(w, p, mode)?, ap_constant(&cw, p, mode)?));
            }
            worst = worst.max(rel(ainf_constant(w, mode)?, ainf_constant(&cw, mode)?));
        }
        for ps in [vec![2.0, 2.0], vec![3.0, 1.5], vec![1.0, 2.0]] {
            let wv = WeightVector::new(ws[..2].to_vec(), ps)?;
            let base = multi_ap_constant(&wv, mode)?;
            // Each slot scales ν by c^{p/p_k} and its dual factor by c^{−p/p_k}.
            for scaled in [wv.scale_slot(0, c)?, wv.scale_slot(1, c)?.scale_slot(0, 1.0 / c)?] {
                worst = worst.max(rel(base, multi_ap_constant(&scaled, mode)?));
            }
        }
    }
    Ok(worst)
}

/// `[|x|^{1/2}]_{A_2}` on `[−1, 1]` with exhaustive and dyadic search.
pub fn a2_search_gap(n: usize) -> Result<(f64, f64)> {
    let g = Grid::new(-1.0, 1.0, n)?;
    let w = Weight::power(g, 0.0, 0.5)?;
    Ok((ap_constant(&w, 2.0, SearchMode::Exhaustive)?, ap_constant(&w, 2.0, SearchMode::Dyadic)?))
}

pub fn run(s: &Scenario) -> Result<Vec<Check>> {
    let start = Instant::now();
    let grid = Grid::new(s.domain[0], s.domain[1], s.n_cells.min(256))?;
    let ones = all_ones_defect(grid)?;
    let mut checks = vec![
        Check::at_most("weights/all-ones", "[1]_{A_p} = [1]_{A_∞} = [1⃗]_{A_P⃗} = 1", ones, 0.0).timed(start),
    ];
    let t = Instant::now();
    let scale = scale_defect(grid, s.search)?;
    checks.push(
        Check::at_most("weights/scale-invariance", "[c·w]_{A_p} = [w]_{A_p}, [c·w]_{A_∞} = [w]_{A_∞}, [c·w⃗]_{A_P⃗} = [w⃗]_{A_P⃗}", scale, 1e-12)
            .timed(t),
    );
    let t = Instant::now();
    let (exh, dy) = a2_search_gap(512)?;
    checks.push(
        Check::at_most("weights/search-gap", "([w]_{A_2}^{all} − [w]_{A_2}^{dyadic})/[w]_{A_2}^{all} ≤ 1/4 for |x|^{1/2}, n = 512", (exh - dy) / exh, 0.25)
            .detail("exhaustive", exh)
            .detail("dyadic", dy)
            .timed(t),
    );
    if !s.weights.is_empty() {
        let t = Instant::now();
        let g = s.grid()?;
        let mut worst = 0.0f64;
        let mut values = Vec::new();
        for spec in &s.weights {
            let w = parse_weight(spec, g)?;
            let c = ap_constant(&w, 2.0, s.search)?;
            let cw = ap_constant(&w.scale(3.0)?, 2.0, s.search)?;
            worst = worst.max(rel(c, cw));
            values.push(c);
        }
        checks.push(
            Check::at_most("weights/given-scale-invariance", "[c·w]_{A_2} = [w]_{A_2} for the configured weights", worst, 1e-12)
                .detail("a2_constants", values)
                .timed(t),
        );
    }
    Ok(checks)
}
