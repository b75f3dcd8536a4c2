//! Whitney, Calderón–Zygmund and endpoint decompositions against their defining properties.

use std::time::Instant;

use anyhow::Result;
use calclab_core::sparse::{cz_select, endpoint_decompose, whitney, whitney_overlap, CzOutcome, WhitneyInterval};
use calclab_core::{CellSet, DyadicLattice, Grid, GridInterval};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::Check;
use crate::scenario::Scenario;

const WHITNEY_ANCHOR: &str = "Ω = ⊔ I_j dyadic, 5R|I_j| ≤ dist(I_j, Ω^c) ≤ 15R|I_j|, Σ_j χ_{R I_j} ≤ C";
const CZ_ANCHOR: &str = "maximal dyadic P ⊊ Q₀ with |E ∩ P| > level·|P|";
const ENDPOINT_ANCHOR: &str = "a = a¹ + a² + a³ on Ω = {M(|a|^p) > 1}, ‖a¹‖_∞ ≤ 1";

/// A union of one to four intervals kept away from both ends of `[0, n)`.
pub fn random_open_set(rng: &mut impl Rng, n: usize) -> CellSet {
    let parts = rng.gen_range(1..=4);
    let margin = n / 16;
    let ivs = (0..parts).map(|_| {
        let len = rng.gen_range(1..=n / 4);
        let lo = rng.gen_range(margin..n - margin - len);
        GridInterval::new(lo, lo + len).expect("nonempty")
    });
    CellSet::from_intervals(ivs)
}

/// Distance in cells from `iv` to the complement of `omega` inside `[0, n)`.
fn brute_gap(omega: &[bool], iv: GridInterval) -> usize {
    let n = omega.len();
    let mut best = usize::MAX;
    for (k, &inside) in omega.iter().enumerate() {
        if inside {
            continue;
        }
        let d = if k < iv.lo() { iv.lo() - k - 1 } else if k >= iv.hi() { k - iv.hi() } else { 0 };
        best = best.min(d);
    }
    // The grid edges count as complement.
    best.min(iv.lo()).min(n - iv.hi())
}

/// Every defining property of the decomposition; returns a description of the first failure.
pub fn whitney_violation(omega: &CellSet, n: usize, r: f64, ws: &[WhitneyInterval]) -> Option<String> {
    let mask = omega.to_mask(n);
    let mut cover = vec![0u8; n];
    for w in ws {
        for k in w.interval.cells() {
            cover[k] += 1;
        }
    }
    if (0..n).any(|k| cover[k] != u8::from(mask[k])) {
        return Some("intervals do not tile Ω".into());
    }
    let admissible = |iv: GridInterval| iv.cells().all(|k| mask[k]) && brute_gap(&mask, iv) as f64 >= 5.0 * r * iv.len() as f64;
    let lattice = DyadicLattice::new(GridInterval::new(0, n).expect("nonempty")).expect("power of two");
    for w in ws {
        let iv = w.interval;
        if lattice.depth_of(&iv).is_none() {
            return Some(format!("{iv} is not dyadic"));
        }
        if brute_gap(&mask, iv) != w.gap {
            return Some(format!("{iv}: gap {} but brute force {}", w.gap, brute_gap(&mask, iv)));
        }
        if w.resolved {
            if !admissible(iv) || w.ratio() > 15.0 * r {
                return Some(format!("{iv}: ratio {} outside [5R, 15R]", w.ratio()));
            }
            if lattice.parent(&iv).is_some_and(admissible) {
                return Some(format!("{iv} is not maximal"));
            }
        } else if lattice.ancestors(iv.lo()).into_iter().any(admissible) {
            return Some(format!("{iv} is unresolved but lies in an admissible interval"));
        }
    }
    None
}

/// Pass count and the largest overlap over `count` random sets.
pub fn whitney_trials(seed: u64, count: usize, n: usize, r: f64) -> Result<(usize, usize, Vec<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut overlap, mut failures) = (0, 0, Vec::new());
    for _ in 0..count {
        let omega = random_open_set(&mut rng, n);
        let ws = whitney(&omega, n, r)?;
        match whitney_violation(&omega, n, r, &ws) {
            None => ok += 1,
            Some(e) => failures.push(e),
        }
        overlap = overlap.max(whitney_overlap(&ws, n, r));
    }
    Ok((ok, overlap, failures))
}

/// Stopping intervals by exhaustive enumeration of the dyadic subintervals of `q0`.
pub fn cz_brute(e: &CellSet, q0: GridInterval, level: f64) -> CzOutcome {
    let density = |iv: GridInterval| e.count_within(iv) as f64 / iv.len() as f64;
    if density(q0) > level {
        return CzOutcome::Degenerate;
    }
    let lattice = DyadicLattice::new(q0).expect("dyadic root");
    let mut out: Vec<GridInterval> = lattice
        .iter()
        .filter(|&p| p != q0 && density(p) > level)
        .filter(|&p| {
            let mut anc = lattice.parent(&p);
            while let Some(a) = anc {
                if a != q0 && density(a) > level {
                    return false;
                }
                anc = lattice.parent(&a);
            }
            true
        })
        .collect();
    out.sort_by_key(|p| p.lo());
    CzOutcome::Cubes(out)
}

/// Mismatches between `cz_select` and brute force on `count` random cases, `n = 16`.
pub fn cz_trials(seed: u64, count: usize) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc2);
    let n = 16;
    let lattice = DyadicLattice::new(GridInterval::new(0, n)?)?;
    let mut mismatches = 0;
    for _ in 0..count {
        let depth = rng.gen_range(0..lattice.max_depth());
        let q0 = lattice.interval(depth, rng.gen_range(0..1 << depth));
        let density = rng.gen_range(0.0..0.6);
        let mask: Vec<bool> = q0.cells().map(|_| rng.gen_bool(density)).collect();
        let e = CellSet::from_mask_offset(&mask, q0.lo());
        let level = if rng.gen_bool(0.5) { 0.25 } else { rng.gen_range(0.05..0.9) };
        if cz_select(&e, q0, level)? != cz_brute(&e, q0, level) {
            mismatches += 1;
        }
    }
    Ok(mismatches)
}

/// Worst identity defect (relative to `max|a|`), worst `‖a¹‖_∞` and level constant
/// over random tall bumps near the middle of `grid`, which should span about `[−8, 8]`.
pub fn endpoint_trials(seed: u64, count: usize, grid: Grid) -> Result<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe9);
    let (mut defect, mut a1_max, mut level) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..count {
        let c = rng.gen_range(-1.5..1.5);
        let width = rng.gen_range(4.0..16.0);
        let height = rng.gen_range(1.5..3.0);
        let freq = rng.gen_range(1.0..10.0);
        let a = grid.sample(|x| height * (-width * (x - c) * (x - c)).exp() * (1.0 + 0.5 * (freq * x).sin()));
        let p = if i % 2 == 0 { 1.0 } else { 2.0 };
        let dec = endpoint_decompose(&a, p)?;
        defect = defect.max(dec.identity_defect(&a) / a.max_abs());
        a1_max = a1_max.max(dec.a1.max_abs());
        level = level.max(dec.level_constant);
    }
    Ok((defect, a1_max, level))
}

pub fn run(s: &Scenario) -> Result<Vec<Check>> {
    let start = Instant::now();
    let n = s.n_cells;
    let trials = 100;
    let (ok, overlap, failures) = whitney_trials(s.seed, trials, n, 1.0)?;
    let (ok2, overlap2, failures2) = whitney_trials(s.seed, trials, n, 2.0)?;
    let mut checks = vec![
        Check::at_least("decompositions/whitney", WHITNEY_ANCHOR, (ok + ok2) as f64 / (2 * trials) as f64, 1.0)
            .detail("sets", trials)
            .detail("overlap_r1", overlap)
            .detail("overlap_r2", overlap2)
            .detail("failures", failures.iter().chain(&failures2).take(5).collect::<Vec<_>>())
            .timed(start),
        Check::at_most("decompositions/whitney-overlap", "max_x Σ_j χ_{I_j}(x) for R = 1", overlap as f64, 1.0).timed(start),
    ];
    let t = Instant::now();
    let cases = s.samples.max(1);
    let mismatches = cz_trials(s.seed, cases)?;
    checks.push(Check::at_most("decompositions/cz-select", CZ_ANCHOR, mismatches as f64, 0.0).detail("cases", cases).timed(t));
    let t = Instant::now();
    let (defect, a1, level) = endpoint_trials(s.seed, 10, Grid::new(-8.0, 8.0, n)?)?;
    checks.push(
        Check::at_most("decompositions/endpoint-identity", ENDPOINT_ANCHOR, defect, 4.0 * f64::EPSILON)
            .detail("level_constant", level)
            .timed(t),
    );
    checks.push(Check::at_most("decompositions/endpoint-a1", ENDPOINT_ANCHOR, a1, 1.0).detail("level_constant", level).timed(t));
    Ok(checks)
}
